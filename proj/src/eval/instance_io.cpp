#include "livemodel/instance_io.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "livemodel/diagnostic.hpp"

namespace livemodel {

namespace {

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::StructuralMismatch, what); }
[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
        size_t k = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, k == std::string_view::npos ? std::string_view::npos : k - pos)));
        if (k == std::string_view::npos) break;
        pos = k + sep.size();
    }
    return out;
}

bool is_name(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$')) return false;
    return true;
}

}  // namespace

Instance build_instance(const RawInstance& raw, std::shared_ptr<const Schema> schema) {
    const Schema& s = *schema;
    std::map<std::string, const std::vector<std::string>*> sig_entries;
    for (const auto& [name, atoms] : raw.sigs) {
        if (s.find_sig(name) < 0) mismatch("unknown signature '" + name + "'");
        if (!sig_entries.emplace(name, &atoms).second) malformed("signature '" + name + "' assigned twice");
    }
    std::map<std::string, const std::vector<std::vector<std::string>>*> field_entries;
    for (const auto& [name, tuples] : raw.fields) {
        if (s.find_field(name) < 0) mismatch("unknown field '" + name + "'");
        if (!field_entries.emplace(name, &tuples).second) malformed("field '" + name + "' assigned twice");
    }

    std::map<std::string, int> top_of;
    std::vector<std::vector<std::string>> order(s.tops.size());
    auto assign = [&](const std::string& atom, int top, const std::string& where) {
        auto [it, fresh] = top_of.emplace(atom, top);
        if (fresh) order[top].push_back(atom);
        else if (it->second != top)
            mismatch("atom '" + atom + "' in " + where + " belongs to " + s.sigs[s.tops[it->second]].name);
    };
    std::vector<int> sig_scan = s.tops;
    for (size_t i = 0; i < s.sigs.size(); ++i)
        if (s.sigs[i].kind != SigKind::Top) sig_scan.push_back(static_cast<int>(i));
    for (int id : sig_scan) {
        const SigInfo& sig = s.sigs[id];
        auto it = sig_entries.find(sig.name);
        if (it == sig_entries.end()) continue;
        for (const auto& a : *it->second) assign(a, sig.top_ordinal, sig.name);
    }
    for (const auto& f : s.fields) {
        auto it = field_entries.find(f.name);
        if (it == field_entries.end()) continue;
        for (const auto& t : *it->second) {
            if (static_cast<int>(t.size()) != f.arity())
                mismatch("field '" + f.name + "' expects tuples of arity " + std::to_string(f.arity()));
            for (int c = 0; c < f.arity(); ++c) assign(t[c], s.sigs[f.columns[c]].top_ordinal, f.name);
        }
    }

    Universe u;
    u.names = order;
    auto atom_of = [&](const std::string& name) {
        int top = top_of.at(name);
        const auto& names = order[top];
        int idx = static_cast<int>(std::find(names.begin(), names.end(), name) - names.begin());
        return make_atom(top, idx);
    };
    Instance inst = Instance::empty(schema, std::move(u));
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        auto it = sig_entries.find(s.sigs[i].name);
        if (it == sig_entries.end()) continue;
        std::vector<Atom> atoms;
        for (const auto& a : *it->second) atoms.push_back(atom_of(a));
        TupleSet set = TupleSet::unary(atoms);
        if (s.sigs[i].kind == SigKind::Top) {
            if (!(set == inst.sig_sets[i]))
                mismatch("'" + s.sigs[i].name + "' must list every atom of its hierarchy");
            continue;
        }
        inst.sig_sets[i] = std::move(set);
    }
    for (size_t i = 0; i < s.fields.size(); ++i) {
        auto it = field_entries.find(s.fields[i].name);
        if (it == field_entries.end()) continue;
        std::vector<Tuple> tuples;
        for (const auto& t : *it->second) {
            Tuple tt;
            tt.arity = static_cast<uint8_t>(t.size());
            for (size_t c = 0; c < t.size(); ++c) tt.atoms[c] = atom_of(t[c]);
            tuples.push_back(tt);
        }
        inst.field_rels[i] = TupleSet::from(s.fields[i].arity(), std::move(tuples));
    }
    validate_shape(inst);
    return inst;
}

std::string instance_to_text(const Instance& inst) {
    const Schema& s = *inst.schema;
    std::string out;
    auto line = [&](const std::string& name, const TupleSet& set) {
        if (set.empty()) out += "no " + name + "\n";
        else out += name + " = " + inst.render(set) + "\n";
    };
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        line(s.sigs[i].name, inst.sig_sets[i]);
        for (size_t f = 0; f < s.fields.size(); ++f)
            if (s.fields[f].owner == static_cast<int>(i)) line(s.fields[f].name, inst.field_rels[f]);
    }
    return out;
}

Instance instance_from_text(std::string_view text, std::shared_ptr<const Schema> schema) {
    // Join continuation lines onto their statement.
    std::vector<std::string> statements;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view raw_line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        size_t comment = raw_line.find("//");
        if (comment != std::string_view::npos) raw_line = raw_line.substr(0, comment);
        std::string l = trim(raw_line);
        if (!l.empty()) {
            if (l[0] == '+' && !statements.empty()) statements.back() += " " + l;
            else statements.push_back(l);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }

    RawInstance raw;
    for (const auto& st : statements) {
        std::string name;
        std::string rhs;
        if (st.rfind("no ", 0) == 0 || st.rfind("no\t", 0) == 0) {
            name = trim(st.substr(3));
            rhs = "{}";
        } else {
            size_t eq = st.find('=');
            if (eq == std::string::npos) malformed("expected 'Name = value' or 'no Name', found '" + st + "'");
            name = trim(std::string_view(st).substr(0, eq));
            rhs = trim(std::string_view(st).substr(eq + 1));
        }
        if (!is_name(name)) malformed("invalid name '" + name + "'");
        std::vector<std::vector<std::string>> tuples;
        if (rhs != "{}") {
            for (const auto& term : split(rhs, "+")) {
                std::vector<std::string> atoms = split(term, "->");
                for (const auto& a : atoms)
                    if (!is_name(a)) malformed("invalid atom '" + a + "' in '" + st + "'");
                tuples.push_back(std::move(atoms));
            }
        }
        if (schema->find_sig(name) >= 0) {
            std::vector<std::string> atoms;
            for (auto& t : tuples) {
                if (t.size() != 1) mismatch("signature '" + name + "' holds atoms, not tuples");
                atoms.push_back(t[0]);
            }
            raw.sigs.emplace_back(name, std::move(atoms));
        } else if (schema->find_field(name) >= 0) {
            raw.fields.emplace_back(name, std::move(tuples));
        } else {
            mismatch("unknown name '" + name + "'");
        }
    }
    return build_instance(raw, std::move(schema));
}

nlohmann::json instance_to_json(const Instance& inst) {
    const Schema& s = *inst.schema;
    nlohmann::json sigs = nlohmann::json::object();
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& t : inst.sig_sets[i]) atoms.push_back(inst.universe.atom_name(t[0]));
        sigs[s.sigs[i].name] = std::move(atoms);
    }
    nlohmann::json fields = nlohmann::json::object();
    for (size_t i = 0; i < s.fields.size(); ++i) {
        nlohmann::json tuples = nlohmann::json::array();
        for (const auto& t : inst.field_rels[i]) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < t.arity; ++c) row.push_back(inst.universe.atom_name(t[c]));
            tuples.push_back(std::move(row));
        }
        fields[s.fields[i].name] = std::move(tuples);
    }
    return {{"sigs", std::move(sigs)}, {"fields", std::move(fields)}};
}

Instance instance_from_json(const nlohmann::json& j, std::shared_ptr<const Schema> schema) {
    if (!j.is_object()) malformed("instance must be a JSON object");
    RawInstance raw;
    try {
        if (j.contains("sigs"))
            for (const auto& [name, atoms] : j.at("sigs").items())
                raw.sigs.emplace_back(name, atoms.get<std::vector<std::string>>());
        if (j.contains("fields"))
            for (const auto& [name, tuples] : j.at("fields").items())
                raw.fields.emplace_back(name, tuples.get<std::vector<std::vector<std::string>>>());
    } catch (const nlohmann::json::exception& e) {
        malformed(std::string("malformed instance: ") + e.what());
    }
    // Keep the schema's order so atom numbering does not depend on JSON key order.
    return build_instance(raw, std::move(schema));
}

}  // namespace livemodel
