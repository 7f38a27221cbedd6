#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "livemodel/instance_io.hpp"
#include "livemodel/server.hpp"
#include "livemodel/wire.hpp"

using namespace livemodel;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kInternal = 2;

/// Input problems reported to the user; exit code 1.
struct UserError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::pair<size_t, size_t> line_col(const std::string& text, size_t offset) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void print_diagnostics(const std::string& file, const std::string& text, const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) {
        auto [line, col] = line_col(text, d.span.begin);
        std::cerr << file << ":" << line << ":" << col << ": " << (d.is_error() ? "error" : "warning") << ": "
                  << d.message << " [" << d.code << "]\n";
    }
}

struct Options {
    std::string model;
    std::optional<int> scope;
    std::string instance;
    std::string pred;
    std::string expect = "valid";
    std::string format = "text";
    size_t limit = 10;
    int budget_log2 = 40;
    int port = 8080;
    int debounce_ms = 300;
    int solve_delay_ms = 0;
    std::vector<std::string> categorize;
};

struct Loaded {
    std::string text;
    std::shared_ptr<const TypedModel> model;
};

/// Compiles a model file, printing its diagnostics. Throws UserError on errors.
Loaded load(const std::string& path) {
    if (path.empty()) throw UserError("--model is required");
    Loaded l;
    l.text = read_file(path);
    auto r = compile(l.text);
    print_diagnostics(path, l.text, r.diagnostics);
    if (!r.model) throw UserError(path + " does not compile");
    l.model = r.model;
    return l;
}

Formula goal_of(const TypedModel& m, const std::string& pred) {
    if (!pred.empty()) {
        const Block* b = m.find_pred(pred);
        if (!b) throw UserError("no predicate '" + pred + "'");
        return conjunction(b->body);
    }
    return m.model.commands.empty() ? Formula{} : m.command_goal(0);
}

std::string goal_id(const TypedModel& m, const std::string& pred) {
    if (!pred.empty()) return pred;
    if (!m.model.commands.empty() && !m.model.commands[0].pred.empty()) return m.model.commands[0].pred;
    return "$goal";
}

Scope scope_of(const TypedModel& m, const Options& o) {
    Scope s;
    if (!m.model.commands.empty()) s = Scope::from(m.command_scope(0));
    if (o.scope) s.default_bound = *o.scope;
    return s;
}

SearchControl control_of(const Options& o) {
    SearchControl c;
    c.budget_log2 = o.budget_log2;
    c.artificial_delay = std::chrono::milliseconds(o.solve_delay_ms);
    return c;
}

Instance load_instance(const std::string& path, const TypedModel& m) {
    if (path.empty()) throw UserError("--instance is required");
    std::string text = read_file(path);
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw UserError(path + " is not valid JSON");
        return instance_from_json(j, m.schema);
    }
    return instance_from_text(text, m.schema);
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

int run_check(const Options& o) {
    Loaded l = load(o.model);
    json out = {{"diagnostics", to_json(l.model->warnings)}};
    if (!o.instance.empty()) {
        Instance inst = load_instance(o.instance, *l.model);
        CheckResult r =
            o.pred.empty() && !l.model->model.commands.empty()
                ? check_instance(*l.model, inst, goal_of(*l.model, ""), goal_id(*l.model, ""))
                : check_instance(*l.model, inst, o.pred.empty() ? std::nullopt : std::optional<std::string>(o.pred));
        if (o.format == "json") {
            out["check"] = to_json(r);
        } else {
            for (const auto& [id, v] : r.per_formula) std::cout << id << ": " << (v ? "true" : "false") << "\n";
            std::cout << "overall: " << (r.overall ? "valid" : "invalid") << "\n";
        }
    } else if (o.format != "json") {
        std::cout << o.model << ": ok\n";
    }
    if (o.format == "json") print_json(out);
    return kOk;
}

int run_enumerate(const Options& o) {
    Loaded l = load(o.model);
    auto cursor = enumerate(l.model, goal_of(*l.model, o.pred), scope_of(*l.model, o), control_of(o));
    json all = json::array();
    size_t n = 0;
    for (; n < o.limit; ++n) {
        auto inst = cursor.next();
        if (!inst) break;
        if (o.format == "json")
            all.push_back(instance_to_json(*inst));
        else
            std::cout << "--- instance " << n + 1 << "\n" << instance_to_text(*inst);
    }
    bool exhausted = n < o.limit || cursor.exhausted();
    if (o.format == "json")
        print_json({{"instances", all}, {"exhausted", exhausted}});
    else
        std::cout << "--- " << n << " instance(s)" << (exhausted ? ", exhausted" : "") << "\n";
    return kOk;
}

int run_categorize(const Options& o) {
    Loaded a = load(o.categorize[0]);
    Loaded b = load(o.categorize[1]);
    std::string old_text = to_text(goal_of(*a.model, o.pred));
    auto old_goal = parse_formula(old_text, *b.model);
    if (!old_goal.formula)
        throw UserError("the goal of " + o.categorize[0] + " does not type against " + o.categorize[1]);
    auto streams =
        categorize(b.model, *old_goal.formula, goal_of(*b.model, o.pred), scope_of(*b.model, o), control_of(o));
    json out = json::object();
    for (Category c : kCategories) {
        json list = json::array();
        if (o.format != "json") std::cout << "=== " << to_string(c) << "\n";
        size_t n = 0;
        for (; n < o.limit; ++n) {
            auto inst = streams.at(c).next();
            if (!inst) break;
            if (o.format == "json")
                list.push_back(instance_to_json(*inst));
            else
                std::cout << "--- instance " << n + 1 << "\n" << instance_to_text(*inst);
        }
        if (o.format == "json")
            out[to_string(c)] = {{"instances", list}, {"exhausted", streams.at(c).exhausted() || n < o.limit}};
        else
            std::cout << "--- " << n << " instance(s)\n";
    }
    if (o.format == "json") print_json(out);
    return kOk;
}

int run_closest(const Options& o) {
    Loaded l = load(o.model);
    Instance target = load_instance(o.instance, *l.model);
    auto pol = polarity_from_string(o.expect);
    if (!pol) throw UserError("--expect must be 'valid' or 'invalid'");
    Formula goal = goal_of(*l.model, o.pred);
    auto r = closest(*l.model, goal, target, *pol, scope_of(*l.model, o), control_of(o));
    if (!r) {
        if (o.format == "json")
            print_json({{"closest", nullptr}, {"breakdown", nullptr}});
        else
            std::cout << "no " << o.expect << " instance within scope\n";
        return kOk;
    }
    BreakdownReport report = breakdown(*l.model, goal, target, r->instance, goal_id(*l.model, o.pred));
    if (o.format == "json") {
        print_json({{"closest", to_json(*r)}, {"breakdown", to_json(report, target, r->instance)}});
        return kOk;
    }
    std::cout << "distance: " << r->distance << "\n" << instance_to_text(r->instance);
    for (const auto& row : report.rows) {
        auto show = [](const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : "-"; };
        std::cout << "breakdown " << row.id;
        for (const auto& [n, a] : row.context) std::cout << " " << n << "=" << target.universe.atom_name(a);
        std::cout << ": " << show(row.value_a) << " -> " << show(row.value_b) << "  " << row.formula << "\n";
    }
    return kOk;
}

/// JSON-lines driver: one request object per input line, one reply per request.
class Headless {
public:
    Headless(Workbench& wb, std::ostream& out) : wb_(wb), out_(out) {}

    void open_default(const std::string& path) {
        auto r = wb_.open_session(read_file(path));
        default_ = r.id;
        emit({{"ok", true},
              {"op", "open"},
              {"id", r.id},
              {"compiled", r.compiled},
              {"diagnostics", to_json(r.diagnostics)}});
    }

    void run(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json req = json::parse(line, nullptr, false);
            if (req.is_discarded() || !req.is_object()) {
                emit({{"ok", false}, {"error", "InvalidArgument"}, {"message", "request is not a JSON object"}});
                continue;
            }
            std::string op = req.value("op", "");
            try {
                json reply = handle(op, req);
                reply["ok"] = true;
                reply["op"] = op;
                emit(reply);
            } catch (const Error& e) {
                json j = error_json(e);
                j["ok"] = false;
                j["op"] = op;
                emit(j);
            } catch (const json::exception& e) {
                emit({{"ok", false}, {"op", op}, {"error", "InvalidArgument"}, {"message", e.what()}});
            } catch (const UserError& e) {
                emit({{"ok", false}, {"op", op}, {"error", "InvalidArgument"}, {"message", e.what()}});
            }
            if (op == "quit") break;
        }
    }

private:
    std::string id_of(const json& req) const {
        std::string id = req.value("id", default_);
        if (id.empty()) throw Error(ErrorCode::InvalidArgument, "no session id");
        return id;
    }

    static Category category_of(const json& req) {
        auto c = category_from_string(req.at("category").get<std::string>());
        if (!c) throw Error(ErrorCode::InvalidArgument, "unknown category");
        return *c;
    }

    json handle(const std::string& op, const json& req) {
        if (op == "open") {
            std::string text = req.contains("file") ? read_file(req.at("file")) : req.value("text", "");
            auto r = wb_.open_session(text);
            if (default_.empty()) default_ = r.id;
            return {{"id", r.id},
                    {"generation", r.generation},
                    {"compiled", r.compiled},
                    {"diagnostics", to_json(r.diagnostics)}};
        }
        if (op == "sleep") {
            std::this_thread::sleep_for(std::chrono::milliseconds(req.value("ms", 0)));
            return json::object();
        }
        if (op == "quit") return json::object();
        std::string id = id_of(req);
        if (op == "close") {
            wb_.close_session(id);
            return json::object();
        }
        if (op == "edit") {
            EditResult r =
                req.contains("begin")
                    ? wb_.apply_edit(id, {req.at("begin").get<size_t>(),
                                          req.value("end", req.at("begin").get<size_t>()), req.value("text", "")})
                    : wb_.replace_text(id, req.at("text").get<std::string>());
            return {{"generation", r.generation}, {"diagnostics", to_json(r.diagnostics)}};
        }
        if (op == "flush") {
            wb_.flush(id);
            return json::object();
        }
        if (op == "wait") {
            return {{"idle", wb_.wait_idle(id, std::chrono::milliseconds(req.value("timeout_ms", 60000)))}};
        }
        if (op == "view") return {{"view", to_json(wb_.category_view(id, category_of(req)))}};
        if (op == "advance") {
            if (req.value("wait", true)) return {{"view", to_json(wb_.advance_category(id, category_of(req)))}};
            wb_.request_advance(id, category_of(req));
            return json::object();
        }
        if (op == "visible") {
            std::set<Category> visible;
            for (const auto& c : req.at("categories")) {
                auto cat = category_from_string(c.get<std::string>());
                if (!cat) throw Error(ErrorCode::InvalidArgument, "unknown category");
                visible.insert(*cat);
            }
            wb_.set_visible(id, visible);
            return json::object();
        }
        if (op == "pin") {
            auto pol = polarity_from_string(req.value("expected", "valid"));
            if (!pol) throw Error(ErrorCode::InvalidArgument, "expected must be 'valid' or 'invalid'");
            const json& inst = req.at("instance");
            return {{"entry", wb_.pin_focus(id, inst.is_string() ? inst.get<std::string>() : inst.dump(), *pol)}};
        }
        if (op == "unpin") {
            wb_.unpin_focus(id, req.at("entry").get<uint64_t>());
            return json::object();
        }
        if (op == "focus") {
            json entries = json::array();
            for (const auto& e : wb_.focus(id)) entries.push_back(to_json(e));
            return {{"entries", entries}};
        }
        if (op == "suggest") {
            AnnotationSource src;
            std::string s = req.value("source", "auto");
            if (s == "none") src.kind = AnnotationSource::Kind::None;
            if (req.contains("focus")) {
                src.kind = AnnotationSource::Kind::Focus;
                src.focus = req.at("focus").get<uint64_t>();
            }
            return {{"suggestions", to_json(wb_.suggestions(id, req.at("offset").get<size_t>(), src))}};
        }
        if (op == "events") {
            uint64_t since = req.value("since", uint64_t{0});
            json events = json::array();
            for (const auto& e : wb_.events(id))
                if (e.seq > since) events.push_back(to_json(e));
            return {{"events", events}};
        }
        if (op == "subscribe") {
            uint64_t token = wb_.subscribe(id, [this](const json& msg) { emit({{"push", msg}}); });
            return {{"token", token}};
        }
        throw Error(ErrorCode::InvalidArgument, "unknown op '" + op + "'");
    }

    void emit(const json& j) {
        std::lock_guard lk(out_m_);
        out_ << j.dump() << "\n" << std::flush;
    }

    Workbench& wb_;
    std::ostream& out_;
    std::mutex out_m_;
    std::string default_;
};

ServiceOptions service_options(const Options& o) {
    ServiceOptions s;
    s.debounce = std::chrono::milliseconds(o.debounce_ms);
    s.solve_delay = std::chrono::milliseconds(o.solve_delay_ms);
    s.budget_log2 = o.budget_log2;
    s.scope = o.scope;
    return s;
}

int run_headless(const Options& o) {
    Workbench wb(service_options(o));
    Headless h(wb, std::cout);
    if (!o.model.empty()) h.open_default(o.model);
    h.run(std::cin);
    return kOk;
}

std::atomic<bool> g_stop{false};

int run_server(const Options& o) {
    Workbench wb(service_options(o));
    Server server(wb, ServerOptions{"127.0.0.1", o.port});
    server.start();
    if (!o.model.empty()) {
        auto r = wb.open_session(read_file(o.model));
        std::cout << "session " << r.id << "\n";
    }
    std::cout << "listening on http://127.0.0.1:" << server.port() << " (websocket port " << server.ws_port() << ")\n"
              << std::flush;
    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Live relational model workbench"};
    Options o;
    bool check = false, enumerate_flag = false, closest_flag = false, headless = false;
    app.add_option("--model", o.model, "Model file");
    app.add_option("--scope", o.scope, "Default bound per top-level sig")->check(CLI::NonNegativeNumber);
    app.add_option("--port", o.port, "HTTP port (WebSocket uses port+1)")->check(CLI::Range(0, 65534));
    app.add_flag("--headless", headless, "JSON-lines session driver on stdin/stdout");
    app.add_flag("--check", check, "Compile the model; with --instance, check the instance");
    app.add_flag("--enumerate", enumerate_flag, "Print solutions of the goal");
    app.add_option("--categorize", o.categorize, "Old and new model: print the four category streams")->expected(2);
    app.add_flag("--closest", closest_flag, "Closest instance to --instance with status --expect, and a breakdown");
    app.add_option("--instance", o.instance, "Instance file (assignment text or JSON)");
    app.add_option("--pred", o.pred, "Goal predicate (default: the first run command)");
    app.add_option("--expect", o.expect, "valid or invalid")->check(CLI::IsMember({"valid", "invalid"}));
    app.add_option("--limit", o.limit, "Instances per stream");
    app.add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--budget-log2", o.budget_log2, "Search-space budget as a power of two");
    app.add_option("--debounce-ms", o.debounce_ms, "Edit debounce window");
    app.add_option("--solve-delay-ms", o.solve_delay_ms, "Artificial delay before each solve");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kDiagnostics;
    }

    int modes = check + enumerate_flag + closest_flag + headless + !o.categorize.empty();
    if (modes > 1) {
        std::cerr << "choose one of --check, --enumerate, --categorize, --closest, --headless\n";
        return kDiagnostics;
    }
    try {
        if (check) return run_check(o);
        if (enumerate_flag) return run_enumerate(o);
        if (!o.categorize.empty()) return run_categorize(o);
        if (closest_flag) return run_closest(o);
        if (headless) return run_headless(o);
        return run_server(o);
    } catch (const UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDiagnostics;
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::Cancelled ? kInternal : kDiagnostics;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDiagnostics;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
