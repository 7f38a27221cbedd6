#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "livemodel/instance.hpp"

namespace livemodel {

/// Name-level description of an instance before atoms are assigned to top-level sigs.
struct RawInstance {
    std::vector<std::pair<std::string, std::vector<std::string>>> sigs;
    std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> fields;
};

/// Atoms of each top-level sig are numbered in order of first appearance, scanning top-level
/// sig entries, then the other sig entries in declaration order, then field tuples. Omitted top-level
/// sigs hold every atom of their hierarchy; omitted sigs and fields are empty.
Instance build_instance(const RawInstance& raw, std::shared_ptr<const Schema> schema);

/// Assignment text: one `Name = a + b` (or `no Name`) line per sig, each followed by its fields.
std::string instance_to_text(const Instance& inst);
/// Accepts the assignment text; `+` continuation lines and `{}` are allowed.
Instance instance_from_text(std::string_view text, std::shared_ptr<const Schema> schema);

/// {"sigs": {name: [atom...]}, "fields": {name: [[atom...]...]}}
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j, std::shared_ptr<const Schema> schema);

}  // namespace livemodel
