#include "livemodel/wire.hpp"

#include "livemodel/instance_io.hpp"

namespace livemodel {

namespace {

json span_json(const Span& s) { return {{"begin", s.begin}, {"end", s.end}}; }

json truth(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

std::string atom_name(Atom a, const Instance& x, const Instance& y) {
    if (atom_index(a) < x.universe.count(atom_top(a))) return x.universe.atom_name(a);
    return y.universe.atom_name(a);
}

json bindings_json(const Bindings& bs, const Instance& a, const Instance& b) {
    json out = json::array();
    for (const auto& [name, atom] : bs) out.push_back({{"var", name}, {"atom", atom_name(atom, a, b)}});
    return out;
}

}  // namespace

json to_json(const Diagnostic& d) {
    json j = {{"severity", d.is_error() ? "error" : "warning"},
              {"span", span_json(d.span)},
              {"message", d.message},
              {"code", d.code}};
    if (!d.expected.empty()) j["expected"] = d.expected;
    return j;
}

json to_json(const std::vector<Diagnostic>& ds) {
    json out = json::array();
    for (const auto& d : ds) out.push_back(to_json(d));
    return out;
}

json error_json(const Error& e) { return {{"error", to_string(e.code())}, {"message", e.what()}}; }

json to_json(const SuggestionList& list, const Schema& schema, const Instance* inst) {
    json items = json::array();
    for (const auto& s : list.items) {
        items.push_back({{"text", s.text},
                         {"type", render_type(s.type, schema)},
                         {"value", s.value && inst ? json(inst->render(*s.value)) : json(nullptr)},
                         {"rank", s.rank}});
    }
    return {{"items", items}, {"overflow", list.overflow}};
}

json to_json(const CheckResult& r) {
    json per = json::array();
    for (const auto& [id, v] : r.per_formula) per.push_back({{"id", id}, {"value", v}});
    return {{"overall", r.overall}, {"perFormula", per}};
}

json to_json(const BreakdownReport& r, const Instance& a, const Instance& b) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json per = json::array();
        for (const auto& pb : row.per_binding)
            per.push_back({{"bindings", bindings_json(pb.bindings, a, b)},
                           {"valueA", truth(pb.value_a)},
                           {"valueB", truth(pb.value_b)}});
        rows.push_back({{"id", row.id},
                        {"span", span_json(row.span)},
                        {"formula", row.formula},
                        {"context", bindings_json(row.context, a, b)},
                        {"valueA", truth(row.value_a)},
                        {"valueB", truth(row.value_b)},
                        {"perBinding", per}});
    }
    return {{"rows", rows}};
}

json to_json(const ClosestResult& r) {
    return {{"instance", instance_to_json(r.instance)}, {"distance", r.distance}, {"candidates", r.candidates}};
}

json to_json(const Scope& s) {
    json per = json::object();
    for (const auto& [name, n] : s.per_sig) per[name] = n;
    return {{"default", s.default_bound}, {"perSig", per}};
}

Scope scope_from_json(const json& j) {
    Scope s;
    if (j.is_number_integer()) {
        s.default_bound = j.get<int>();
        return s;
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "scope must be an integer or an object");
    if (j.contains("default")) s.default_bound = j.at("default").get<int>();
    if (j.contains("perSig"))
        for (const auto& [name, n] : j.at("perSig").items()) s.per_sig.emplace_back(name, n.get<int>());
    return s;
}

}  // namespace livemodel
