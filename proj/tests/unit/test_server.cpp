#include <doctest.h>
#include <httplib.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "fixtures.hpp"
#include "livemodel/server.hpp"

using namespace livemodel;
using namespace std::chrono_literals;

namespace {

namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;

nlohmann::json body(const httplib::Result& r) {
    REQUIRE(r);
    return nlohmann::json::parse(r->body);
}

nlohmann::json post(httplib::Client& c, const std::string& path, const nlohmann::json& j) {
    auto r = c.Post(path, j.dump(), "application/json");
    REQUIRE(r);
    return r->body.empty() ? nlohmann::json() : nlohmann::json::parse(r->body);
}

struct Running {
    Workbench wb;
    Server server;

    Running() : wb([] {
                    ServiceOptions o;
                    o.debounce = 20ms;
                    return o;
                }()),
                server(wb, ServerOptions{"127.0.0.1", 0}) {
        server.start();
    }
};

}  // namespace

TEST_CASE("server: session lifecycle over HTTP") {
    Running r;
    httplib::Client c("127.0.0.1", r.server.port());
    CHECK(r.server.ws_port() == r.server.port() + 1);

    auto opened = c.Post("/sessions", nlohmann::json{{"text", fixtures::read("queue_static.als")}}.dump(),
                         "application/json");
    REQUIRE(opened);
    CHECK(opened->status == 201);
    auto s = nlohmann::json::parse(opened->body);
    std::string id = s["id"];
    CHECK(s["compiled"] == true);
    CHECK(s["diagnostics"].empty());

    auto info = body(c.Get("/sessions/" + id));
    CHECK(info["generation"] == 0);
    CHECK(info["text"] == fixtures::read("queue_static.als"));

    c.Get("/sessions/" + id + "/views/stayedValid");
    post(c, "/sessions/" + id + "/wait", nlohmann::json::object());
    auto view = body(c.Get("/sessions/" + id + "/views/stayedValid"));
    CHECK(view["category"] == "stayedValid");
    CHECK(view["instance"].is_object());
    CHECK(view["instance"].contains("sigs"));
    CHECK(view["stale"] == false);

    auto adv = c.Post("/sessions/" + id + "/views/stayedValid/advance?wait=1");
    REQUIRE(adv);
    CHECK(adv->status == 200);
    CHECK(nlohmann::json::parse(adv->body)["instance"] != view["instance"]);

    auto edit = post(c, "/sessions/" + id + "/edits", {{"begin", 0}, {"end", 0}, {"text", "sig {"}});
    CHECK(edit["generation"] == 1);
    CHECK(!edit["diagnostics"].empty());
    CHECK(edit["diagnostics"][0]["severity"] == "error");
    CHECK(edit["diagnostics"][0]["span"].contains("begin"));
    CHECK(body(c.Get("/sessions/" + id))["stale"] == true);

    auto bad = c.Get("/sessions/" + id + "/views/sideways");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(nlohmann::json::parse(bad->body)["error"] == "InvalidArgument");

    auto gone = c.Delete("/sessions/" + id);
    REQUIRE(gone);
    CHECK(gone->status == 204);
    auto missing = c.Get("/sessions/" + id);
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(nlohmann::json::parse(missing->body)["error"] == "SessionNotFound");
}

TEST_CASE("server: focus, suggestions and events over HTTP") {
    Running r;
    httplib::Client c("127.0.0.1", r.server.port());
    std::string text = fixtures::read("queue_dequeue_fixed.als");
    std::string id = post(c, "/sessions", {{"text", text}})["id"];

    auto pinned = c.Post("/sessions/" + id + "/focus",
                         nlohmann::json{{"instance", fixtures::read("queue_two_nodes.inst")}, {"expected", "valid"}}.dump(),
                         "application/json");
    REQUIRE(pinned);
    CHECK(pinned->status == 201);
    post(c, "/sessions/" + id + "/edits", {{"text", fixtures::read("queue_dequeue_faulty.als")}});
    post(c, "/sessions/" + id + "/flush", nlohmann::json::object());
    post(c, "/sessions/" + id + "/wait", nlohmann::json::object());
    auto focus = body(c.Get("/sessions/" + id + "/focus"))["entries"];
    REQUIRE(focus.size() == 1);
    CHECK(focus[0]["current"] == "invalid");
    CHECK(focus[0]["closest"]["distance"] == 3);
    CHECK(!focus[0]["breakdown"]["rows"].empty());
    auto row = focus[0]["breakdown"]["rows"][0];
    CHECK(row["span"]["end"].get<size_t>() > row["span"]["begin"].get<size_t>());

    std::string probe = fixtures::read("queue_dequeue_faulty.als") + "fact Probe { some Queue.head }\n";
    post(c, "/sessions/" + id + "/edits", {{"text", probe}});
    size_t cursor = probe.find("Queue.head }") + 10;
    post(c, "/sessions/" + id + "/edits", {{"begin", cursor}, {"end", cursor}, {"text", "."}});
    auto sugg = body(c.Get("/sessions/" + id + "/suggestions?offset=" + std::to_string(cursor + 1) + "&source=none"));
    REQUIRE(!sugg["items"].empty());
    CHECK(sugg["items"][0]["text"] == "link");
    CHECK(sugg["items"][0]["value"].is_null());
    CHECK(sugg["overflow"] == false);
    auto none = c.Get("/sessions/" + id + "/suggestions?offset=0");
    REQUIRE(none);
    CHECK(none->status == 422);

    auto events = body(c.Get("/sessions/" + id + "/events"))["events"];
    CHECK(!events.empty());
    CHECK(events[0]["kind"] == "open");
    auto later = body(c.Get("/sessions/" + id + "/events?since=" + std::to_string(events.back()["seq"].get<uint64_t>())));
    CHECK(later["events"].empty());
}

TEST_CASE("server: the WebSocket feed pushes generation-tagged deltas") {
    Running r;
    httplib::Client c("127.0.0.1", r.server.port());
    std::string id = post(c, "/sessions", {{"text", fixtures::read("self_rel.als")}})["id"];

    net::io_context ioc;
    tcp::resolver resolver(ioc);
    beast::websocket::stream<tcp::socket> ws(ioc);
    net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(r.server.ws_port())));
    ws.handshake("127.0.0.1", "/sessions/" + id);

    auto read = [&] {
        beast::flat_buffer buf;
        ws.read(buf);
        return nlohmann::json::parse(beast::buffers_to_string(buf.data()));
    };
    auto hello = read();
    CHECK(hello["viewDelta"]["kind"] == "hello");
    CHECK(hello["generation"] == 0);

    post(c, "/sessions/" + id + "/edits", {{"text", fixtures::read("self_rel.als") + "\nfact { some A }\n"}});
    std::vector<nlohmann::json> msgs;
    uint64_t last = 0;
    bool recomputed = false;
    while (!recomputed) {
        auto m = read();
        CHECK(m["session"] == id);
        CHECK(m["generation"].get<uint64_t>() >= last);
        last = m["generation"];
        recomputed = m["viewDelta"]["kind"] == "recompute";
        msgs.push_back(m);
    }
    CHECK(msgs.front()["viewDelta"]["kind"] == "diagnostics");
    CHECK(msgs.back()["generation"] == 1);
    CHECK(msgs.back()["viewDelta"]["views"].size() == 4);
    ws.close(beast::websocket::close_code::normal);
}
