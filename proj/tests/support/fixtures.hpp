#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "livemodel/eval.hpp"
#include "livemodel/instance_io.hpp"
#include "livemodel/lang.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(LIVEMODEL_FIXTURE_DIR) + "/" + name; }

inline std::string read(const std::string& name) {
    std::ifstream in(path(name));
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::shared_ptr<const livemodel::TypedModel> compile_text(const std::string& text) {
    auto r = livemodel::compile(text);
    if (!r.model) {
        std::string msg = "fixture does not compile:";
        for (const auto& d : r.diagnostics) msg += "\n  " + d.message;
        throw std::runtime_error(msg);
    }
    return r.model;
}

inline std::shared_ptr<const livemodel::TypedModel> model(const std::string& name) { return compile_text(read(name)); }

inline livemodel::Instance instance(const livemodel::TypedModel& m, const std::string& name) {
    return livemodel::instance_from_text(read(name), m.schema);
}

inline livemodel::Formula pred(const livemodel::TypedModel& m, const std::string& name) {
    const auto* b = m.find_pred(name);
    if (!b) throw std::runtime_error("missing pred " + name);
    return livemodel::conjunction(b->body);
}

inline livemodel::Expr expr(const livemodel::TypedModel& m, const std::string& text,
                            const std::vector<livemodel::ScopedVar>& vars = {}) {
    auto r = livemodel::parse_expr(text, m, vars);
    if (!r.expr) throw std::runtime_error("expression does not compile: " + text);
    return *r.expr;
}

inline livemodel::Formula formula(const livemodel::TypedModel& m, const std::string& text) {
    auto r = livemodel::parse_formula(text, m);
    if (!r.formula) throw std::runtime_error("formula does not compile: " + text);
    return *r.formula;
}

}  // namespace fixtures
