#pragma once

#include <json.hpp>

#include "livemodel/complete.hpp"
#include "livemodel/finder.hpp"
#include "livemodel/proximity.hpp"

namespace livemodel {

using nlohmann::json;

/// {severity, span: {begin, end}, message, code[, expected]}
json to_json(const Diagnostic& d);
json to_json(const std::vector<Diagnostic>& ds);

/// {error: code name, message}
json error_json(const Error& e);

/// {items: [{text, type, value, rank}], overflow}. `value` is the rendered tuple set over
/// inst, or null when the suggestion carries no value.
json to_json(const SuggestionList& list, const Schema& schema, const Instance* inst);

/// {overall, perFormula: [{id, value}]}
json to_json(const CheckResult& r);

/// Rows with spans; atoms in contexts and bindings are named through the instances.
json to_json(const BreakdownReport& r, const Instance& a, const Instance& b);

/// {instance, distance, candidates}
json to_json(const ClosestResult& r);

/// Scope as {default, perSig: {name: bound}}.
json to_json(const Scope& s);
Scope scope_from_json(const json& j);

}  // namespace livemodel
