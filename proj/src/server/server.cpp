#include "livemodel/server.hpp"

#include <httplib.h>

#include <condition_variable>
#include <thread>

#include "livemodel/wire.hpp"
#include "ws.hpp"

namespace livemodel {

namespace {

int status_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::SessionNotFound: return 404;
        case ErrorCode::InvalidArgument:
        case ErrorCode::StructuralMismatch:
        case ErrorCode::UnboundVariable: return 400;
        case ErrorCode::Cancelled: return 409;
        case ErrorCode::NoPrefixContext:
        case ErrorCode::VacuousPrefix:
        case ErrorCode::ScopeTooLarge: return 422;
    }
    return 500;
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, "request body is not valid JSON");
    return j;
}

Category category_arg(const std::string& s) {
    auto c = category_from_string(s);
    if (!c) throw Error(ErrorCode::InvalidArgument, "unknown category '" + s + "'");
    return *c;
}

AnnotationSource source_arg(const std::string& s) {
    AnnotationSource src;
    if (s.empty() || s == "auto") return src;
    if (s == "none") {
        src.kind = AnnotationSource::Kind::None;
    } else if (s.rfind("focus:", 0) == 0) {
        src.kind = AnnotationSource::Kind::Focus;
        src.focus = std::stoull(s.substr(6));
    } else if (s.rfind("category:", 0) == 0) {
        src.kind = AnnotationSource::Kind::Category;
        src.category = category_arg(s.substr(9));
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown annotation source '" + s + "'");
    }
    return src;
}

size_t size_arg(const httplib::Request& req, const std::string& name, size_t fallback) {
    if (!req.has_param(name)) return fallback;
    try {
        return std::stoull(req.get_param_value(name));
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "parameter '" + name + "' must be a non-negative integer");
    }
}

json views_json(Workbench& wb, const std::string& id) {
    json views = json::array();
    for (Category c : kCategories) views.push_back(to_json(wb.category_view(id, c)));
    return views;
}

}  // namespace

struct Server::Impl {
    Impl(Workbench& w, ServerOptions o) : wb(w), options(std::move(o)), feed(w) { routes(); }

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    /// Wraps a handler so engine errors become JSON error responses.
    Handler guarded(Handler h) {
        return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            try {
                h(req, res);
            } catch (const Error& e) {
                reply(res, status_for(e.code()), error_json(e));
            } catch (const json::exception& e) {
                reply(res, 400, {{"error", "InvalidArgument"}, {"message", e.what()}});
            } catch (const std::exception& e) {
                reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
            }
        };
    }

    void routes() {
        const std::string sid = "/sessions/([^/]+)";
        http.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                      json body = parse_body(req);
                      auto r = wb.open_session(body.value("text", std::string()));
                      reply(res, 201,
                            {{"id", r.id},
                             {"generation", r.generation},
                             {"compiled", r.compiled},
                             {"diagnostics", to_json(r.diagnostics)}});
                  }));
        http.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
                     reply(res, 200, {{"sessions", wb.sessions()}});
                 }));
        http.Get(sid, guarded([this](const httplib::Request& req, httplib::Response& res) {
                     std::string id = req.matches[1];
                     auto [diags, stale] = wb.status(id);
                     reply(res, 200,
                           {{"id", id},
                            {"generation", wb.generation(id)},
                            {"text", wb.text(id)},
                            {"stale", stale},
                            {"diagnostics", to_json(diags)}});
                 }));
        http.Delete(sid, guarded([this](const httplib::Request& req, httplib::Response& res) {
                        wb.close_session(req.matches[1]);
                        res.status = 204;
                    }));
        http.Post(sid + "/edits", guarded([this](const httplib::Request& req, httplib::Response& res) {
                      std::string id = req.matches[1];
                      json body = parse_body(req);
                      EditResult r;
                      if (body.contains("begin")) {
                          r = wb.apply_edit(
                              id, {body.at("begin").get<size_t>(), body.value("end", body.at("begin").get<size_t>()),
                                   body.value("text", std::string())});
                      } else {
                          r = wb.replace_text(id, body.at("text").get<std::string>());
                      }
                      reply(res, 200, {{"generation", r.generation}, {"diagnostics", to_json(r.diagnostics)}});
                  }));
        http.Post(sid + "/flush", guarded([this](const httplib::Request& req, httplib::Response& res) {
                      wb.flush(req.matches[1]);
                      res.status = 204;
                  }));
        http.Post(sid + "/wait", guarded([this](const httplib::Request& req, httplib::Response& res) {
                      auto ms = std::chrono::milliseconds(size_arg(req, "timeout_ms", 60000));
                      reply(res, 200, {{"idle", wb.wait_idle(req.matches[1], ms)}});
                  }));
        http.Get(sid + "/views", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     reply(res, 200, {{"views", views_json(wb, req.matches[1])}});
                 }));
        http.Get(sid + "/views/([A-Za-z]+)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     reply(res, 200, to_json(wb.category_view(req.matches[1], category_arg(req.matches[2]))));
                 }));
        http.Post(sid + "/views/([A-Za-z]+)/advance",
                  guarded([this](const httplib::Request& req, httplib::Response& res) {
                      std::string id = req.matches[1];
                      Category c = category_arg(req.matches[2]);
                      if (req.has_param("wait") && req.get_param_value("wait") != "0") {
                          reply(res, 200, to_json(wb.advance_category(id, c)));
                      } else {
                          wb.request_advance(id, c);
                          reply(res, 202, to_json(wb.category_view(id, c)));
                      }
                  }));
        http.Put(sid + "/visible", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     std::set<Category> visible;
                     for (const auto& c : parse_body(req).at("categories"))
                         visible.insert(category_arg(c.get<std::string>()));
                     wb.set_visible(req.matches[1], visible);
                     res.status = 204;
                 }));
        http.Get(sid + "/focus", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     json entries = json::array();
                     for (const auto& e : wb.focus(req.matches[1])) entries.push_back(to_json(e));
                     reply(res, 200, {{"entries", entries}});
                 }));
        http.Post(sid + "/focus", guarded([this](const httplib::Request& req, httplib::Response& res) {
                      json body = parse_body(req);
                      auto pol = polarity_from_string(body.value("expected", std::string("valid")));
                      if (!pol) throw Error(ErrorCode::InvalidArgument, "expected must be 'valid' or 'invalid'");
                      const json& inst = body.at("instance");
                      std::string text = inst.is_string() ? inst.get<std::string>() : inst.dump();
                      reply(res, 201, {{"id", wb.pin_focus(req.matches[1], text, *pol)}});
                  }));
        http.Delete(sid + "/focus/([0-9]+)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        wb.unpin_focus(req.matches[1], std::stoull(req.matches[2]));
                        res.status = 204;
                    }));
        http.Get(sid + "/suggestions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     if (!req.has_param("offset")) throw Error(ErrorCode::InvalidArgument, "missing offset");
                     auto r = wb.suggestions(req.matches[1], size_arg(req, "offset", 0),
                                             source_arg(req.has_param("source") ? req.get_param_value("source") : ""));
                     reply(res, 200, to_json(r));
                 }));
        http.Get(sid + "/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     size_t since = size_arg(req, "since", 0);
                     json events = json::array();
                     for (const auto& e : wb.events(req.matches[1]))
                         if (e.seq > since) events.push_back(to_json(e));
                     reply(res, 200, {{"events", events}});
                 }));
    }

    Workbench& wb;
    ServerOptions options;
    httplib::Server http;
    detail::WsFeed feed;
    std::thread thread;
    int port = 0;
    std::mutex m;
    std::condition_variable cv;
    bool running = false;
};

Server::Server(Workbench& wb, ServerOptions options) : impl_(std::make_unique<Impl>(wb, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
    auto& i = *impl_;
    if (i.options.port != 0) {
        if (!i.http.bind_to_port(i.options.host, i.options.port))
            throw std::runtime_error("cannot listen on " + i.options.host + ":" + std::to_string(i.options.port));
        i.port = i.options.port;
        i.feed.start(i.options.host, i.port + 1);
    } else {
        // Any free pair of consecutive ports.
        for (int attempt = 0;; ++attempt) {
            int p = i.http.bind_to_any_port(i.options.host);
            if (p <= 0) throw std::runtime_error("cannot listen on " + i.options.host);
            try {
                i.feed.start(i.options.host, p + 1);
                i.port = p;
                break;
            } catch (const std::runtime_error&) {
                i.http.stop();
                if (attempt == 20) throw;
            }
        }
    }
    {
        std::lock_guard lk(i.m);
        i.running = true;
    }
    i.thread = std::thread([&i] { i.http.listen_after_bind(); });
    i.http.wait_until_ready();
}

void Server::stop() {
    auto& i = *impl_;
    if (!i.thread.joinable()) return;
    i.http.stop();
    i.thread.join();
    i.feed.stop();
    {
        std::lock_guard lk(i.m);
        i.running = false;
    }
    i.cv.notify_all();
}

void Server::wait() {
    std::unique_lock lk(impl_->m);
    impl_->cv.wait(lk, [&] { return !impl_->running; });
}

int Server::port() const { return impl_->port; }
int Server::ws_port() const { return impl_->feed.port(); }

}  // namespace livemodel
