#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "livemodel/complete.hpp"
#include "livemodel/instance_io.hpp"
#include "livemodel/service.hpp"
#include "livemodel/wire.hpp"

namespace py = pybind11;
using namespace livemodel;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::shared_ptr<const TypedModel> compiled(const std::string& text) {
    auto r = compile(text);
    if (!r.model) {
        std::string msg = "model does not compile";
        for (const auto& d : r.diagnostics)
            if (d.is_error()) msg += "; " + d.message;
        throw Error(ErrorCode::InvalidArgument, msg);
    }
    return r.model;
}

Instance parse_instance(const std::string& text, const TypedModel& m) {
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, "instance is not valid JSON");
        return instance_from_json(j, m.schema);
    }
    return instance_from_text(text, m.schema);
}

Formula goal_of(const TypedModel& m, const std::optional<std::string>& pred) {
    if (pred) {
        const Block* b = m.find_pred(*pred);
        if (!b) throw Error(ErrorCode::InvalidArgument, "no predicate '" + *pred + "'");
        return conjunction(b->body);
    }
    return m.model.commands.empty() ? Formula{} : m.command_goal(0);
}

std::string goal_id(const TypedModel& m, const std::optional<std::string>& pred) {
    if (pred) return *pred;
    if (!m.model.commands.empty() && !m.model.commands[0].pred.empty()) return m.model.commands[0].pred;
    return "$goal";
}

Scope scope_of(const TypedModel& m, std::optional<int> bound) {
    Scope s;
    if (!m.model.commands.empty()) s = Scope::from(m.command_scope(0));
    if (bound) s.default_bound = *bound;
    return s;
}

Category category_arg(const std::string& s) {
    auto c = category_from_string(s);
    if (!c) throw Error(ErrorCode::InvalidArgument, "unknown category '" + s + "'");
    return *c;
}

Polarity polarity_arg(const std::string& s) {
    auto p = polarity_from_string(s);
    if (!p) throw Error(ErrorCode::InvalidArgument, "expected must be 'valid' or 'invalid'");
    return *p;
}

json take(SolutionCursor& cursor, size_t limit) {
    json list = json::array();
    size_t n = 0;
    for (; n < limit; ++n) {
        auto inst = cursor.next();
        if (!inst) break;
        list.push_back(instance_to_json(*inst));
    }
    return {{"instances", list}, {"exhausted", n < limit || cursor.exhausted()}};
}

py::dict compile_py(const std::string& text) {
    auto r = compile(text);
    py::dict out;
    out["ok"] = static_cast<bool>(r.model);
    out["diagnostics"] = to_py(to_json(r.diagnostics));
    return out;
}

py::object check_py(const std::string& model, const std::string& instance, std::optional<std::string> pred) {
    auto m = compiled(model);
    Instance inst = parse_instance(instance, *m);
    return to_py(to_json(check_instance(*m, inst, goal_of(*m, pred), goal_id(*m, pred))));
}

py::object enumerate_py(const std::string& model, std::optional<std::string> pred, std::optional<int> scope,
                        size_t limit) {
    auto m = compiled(model);
    json out;
    {
        py::gil_scoped_release release;
        auto cursor = enumerate(m, goal_of(*m, pred), scope_of(*m, scope));
        out = take(cursor, limit);
    }
    return to_py(out);
}

py::object categorize_py(const std::string& old_model, const std::string& new_model, std::optional<std::string> pred,
                         std::optional<int> scope, size_t limit) {
    auto a = compiled(old_model);
    auto b = compiled(new_model);
    auto old_goal = parse_formula(to_text(goal_of(*a, pred)), *b);
    if (!old_goal.formula) throw Error(ErrorCode::InvalidArgument, "the old goal does not type against the new model");
    json out = json::object();
    {
        py::gil_scoped_release release;
        auto streams = categorize(b, *old_goal.formula, goal_of(*b, pred), scope_of(*b, scope));
        for (Category c : kCategories) out[to_string(c)] = take(streams.at(c), limit);
    }
    return to_py(out);
}

py::object closest_py(const std::string& model, const std::string& instance, const std::string& expected,
                      std::optional<std::string> pred, std::optional<int> scope) {
    auto m = compiled(model);
    Instance target = parse_instance(instance, *m);
    Polarity pol = polarity_arg(expected);
    Formula goal = goal_of(*m, pred);
    json out;
    {
        py::gil_scoped_release release;
        auto r = closest(*m, goal, target, pol, scope_of(*m, scope));
        if (!r) {
            out = {{"closest", nullptr}, {"breakdown", nullptr}};
        } else {
            auto report = breakdown(*m, goal, target, r->instance, goal_id(*m, pred));
            out = {{"closest", to_json(*r)}, {"breakdown", to_json(report, target, r->instance)}};
        }
    }
    return to_py(out);
}

py::object suggest_py(const std::string& model, const std::string& prefix, std::optional<std::string> instance) {
    auto m = compiled(model);
    std::optional<Instance> inst;
    if (instance) inst = parse_instance(*instance, *m);
    auto list = suggest(*m, prefix_context(prefix, *m), inst ? &*inst : nullptr);
    return to_py(to_json(list, *m->schema, inst ? &*inst : nullptr));
}

ServiceOptions service_options(int debounce_ms, int solve_delay_ms, std::optional<int> scope) {
    ServiceOptions o;
    o.debounce = std::chrono::milliseconds(debounce_ms);
    o.solve_delay = std::chrono::milliseconds(solve_delay_ms);
    o.scope = scope;
    return o;
}

py::dict edit_py(const EditResult& r) {
    py::dict out;
    out["generation"] = r.generation;
    out["diagnostics"] = to_py(to_json(r.diagnostics));
    return out;
}

}  // namespace

PYBIND11_MODULE(_livemodel, m) {
    m.doc() = "Live relational modeling engine";

    static py::exception<Error> error(m, "LivemodelError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::tuple args = py::make_tuple(to_string(e.code()), e.what());
            PyErr_SetObject(error.ptr(), args.ptr());
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("compile", &compile_py, py::arg("text"));
    m.def("check", &check_py, py::arg("model"), py::arg("instance"), py::arg("pred") = py::none());
    m.def("enumerate", &enumerate_py, py::arg("model"), py::arg("pred") = py::none(), py::arg("scope") = py::none(),
          py::arg("limit") = 10);
    m.def("categorize", &categorize_py, py::arg("old_model"), py::arg("new_model"), py::arg("pred") = py::none(),
          py::arg("scope") = py::none(), py::arg("limit") = 10);
    m.def("closest", &closest_py, py::arg("model"), py::arg("instance"), py::arg("expected") = "valid",
          py::arg("pred") = py::none(), py::arg("scope") = py::none());
    m.def("suggest", &suggest_py, py::arg("model"), py::arg("prefix"), py::arg("instance") = py::none());

    py::class_<Workbench>(m, "Workbench")
        .def(py::init([](int debounce_ms, int solve_delay_ms, std::optional<int> scope) {
                 return std::make_unique<Workbench>(service_options(debounce_ms, solve_delay_ms, scope));
             }),
             py::arg("debounce_ms") = 300, py::arg("solve_delay_ms") = 0, py::arg("scope") = py::none())
        .def(
            "open_session",
            [](Workbench& wb, std::string text) {
                auto r = wb.open_session(std::move(text));
                py::dict out;
                out["id"] = r.id;
                out["generation"] = r.generation;
                out["compiled"] = r.compiled;
                out["diagnostics"] = to_py(to_json(r.diagnostics));
                return out;
            },
            py::arg("text"))
        .def("close_session", &Workbench::close_session, py::arg("id"))
        .def("sessions", &Workbench::sessions)
        .def("text", &Workbench::text, py::arg("id"))
        .def("generation", &Workbench::generation, py::arg("id"))
        .def(
            "apply_edit",
            [](Workbench& wb, const std::string& id, size_t begin, size_t end, std::string text) {
                return edit_py(wb.apply_edit(id, {begin, end, std::move(text)}));
            },
            py::arg("id"), py::arg("begin"), py::arg("end"), py::arg("text"))
        .def(
            "replace_text",
            [](Workbench& wb, const std::string& id, std::string text) {
                return edit_py(wb.replace_text(id, std::move(text)));
            },
            py::arg("id"), py::arg("text"))
        .def("flush", &Workbench::flush, py::arg("id"))
        .def(
            "wait_idle",
            [](Workbench& wb, const std::string& id, int timeout_ms) {
                py::gil_scoped_release release;
                return wb.wait_idle(id, std::chrono::milliseconds(timeout_ms));
            },
            py::arg("id"), py::arg("timeout_ms") = 60000)
        .def(
            "view",
            [](Workbench& wb, const std::string& id, const std::string& category) {
                return to_py(to_json(wb.category_view(id, category_arg(category))));
            },
            py::arg("id"), py::arg("category"))
        .def(
            "advance",
            [](Workbench& wb, const std::string& id, const std::string& category) {
                CategoryView v;
                {
                    py::gil_scoped_release release;
                    v = wb.advance_category(id, category_arg(category));
                }
                return to_py(to_json(v));
            },
            py::arg("id"), py::arg("category"))
        .def(
            "set_visible",
            [](Workbench& wb, const std::string& id, const std::vector<std::string>& categories) {
                std::set<Category> visible;
                for (const auto& c : categories) visible.insert(category_arg(c));
                wb.set_visible(id, visible);
            },
            py::arg("id"), py::arg("categories"))
        .def(
            "pin_focus",
            [](Workbench& wb, const std::string& id, const std::string& instance, const std::string& expected) {
                return wb.pin_focus(id, std::string_view(instance), polarity_arg(expected));
            },
            py::arg("id"), py::arg("instance"), py::arg("expected") = "valid")
        .def("unpin_focus", &Workbench::unpin_focus, py::arg("id"), py::arg("entry"))
        .def(
            "focus",
            [](Workbench& wb, const std::string& id) {
                json entries = json::array();
                for (const auto& e : wb.focus(id)) entries.push_back(to_json(e));
                return to_py(entries);
            },
            py::arg("id"))
        .def(
            "suggestions",
            [](Workbench& wb, const std::string& id, size_t offset) {
                return to_py(to_json(wb.suggestions(id, offset)));
            },
            py::arg("id"), py::arg("offset"))
        .def(
            "events",
            [](Workbench& wb, const std::string& id) {
                json events = json::array();
                for (const auto& e : wb.events(id)) events.push_back(to_json(e));
                return to_py(events);
            },
            py::arg("id"));
}
