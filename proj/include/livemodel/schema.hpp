#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "livemodel/ast.hpp"

namespace livemodel {

struct SigInfo {
    std::string name;
    SigKind kind = SigKind::Top;
    int parent = -1;
    bool is_abstract = false;
    SigMult mult = SigMult::Default;
    int top = -1;          // sig id of the top-level ancestor
    int top_ordinal = -1;  // position of that ancestor among top-level sigs
    std::vector<int> extends_children;
    std::vector<int> in_children;
};

struct FieldInfo {
    std::string name;
    int owner = -1;
    std::vector<int> columns;  // sig ids, owner first
    FieldMult mult = FieldMult::Set;
    bool ternary = false;

    int arity() const { return static_cast<int>(columns.size()); }
};

/// Resolved signature/field tables of a model. Sig ids follow declaration order,
/// field ids follow declaration order across all sigs.
class Schema {
public:
    static Schema build(const Model& model);

    std::vector<SigInfo> sigs;
    std::vector<FieldInfo> fields;
    std::vector<int> tops;  // top-level sig ids in declaration order

    int find_sig(std::string_view name) const;
    int find_field(std::string_view name) const;

    bool is_ancestor_or_self(int ancestor, int sig) const;
    /// Join compatibility: true iff the two sigs may share an atom in some instance.
    bool may_overlap(int a, int b) const;
    /// The more specific of two overlapping sigs (left operand when neither contains the other).
    int meet(int a, int b) const;

    /// Non-top sigs ordered so every parent precedes its children.
    const std::vector<int>& subsig_order() const { return subsig_order_; }

    bool operator==(const Schema& other) const;

private:
    int anchor(int sig) const;
    std::vector<int> subsig_order_;
};

}  // namespace livemodel
