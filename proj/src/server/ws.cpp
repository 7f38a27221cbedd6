#include "ws.hpp"

#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace livemodel::detail {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Registry;

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, Workbench& wb, Registry& reg) : ws_(std::move(socket)), wb_(wb), reg_(reg) {}

    void run() {
        http::async_read(ws_.next_layer(), buffer_, req_,
                         [self = shared_from_this()](beast::error_code ec, size_t) { self->on_request(ec); });
    }

    /// Queues a message; safe from any thread.
    void send(std::string msg) {
        net::post(ws_.get_executor(), [self = shared_from_this(), msg = std::move(msg)]() mutable {
            self->queue_.push_back(std::move(msg));
            if (self->queue_.size() == 1) self->write_next();
        });
    }

    void detach();

private:
    void on_request(beast::error_code ec);

    void on_accept(beast::error_code ec);

    void read_loop() {
        ws_.async_read(incoming_, [self = shared_from_this()](beast::error_code ec, size_t) {
            if (ec) {
                self->detach();
                return;
            }
            self->incoming_.consume(self->incoming_.size());
            self->read_loop();
        });
    }

    void write_next() {
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, size_t) {
            if (ec) {
                self->detach();
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write_next();
        });
    }

    websocket::stream<tcp::socket> ws_;
    Workbench& wb_;
    Registry& reg_;
    beast::flat_buffer buffer_;
    beast::flat_buffer incoming_;
    http::request<http::string_body> req_;
    std::deque<std::string> queue_;
    std::string session_;
    std::optional<uint64_t> token_;
};

/// Live subscriptions, so that stop() can detach every one before the I/O loop ends.
class Registry {
public:
    explicit Registry(Workbench& wb) : wb_(wb) {}

    void add(const std::string& session, uint64_t token) {
        std::lock_guard lk(m_);
        subs_.emplace(session, token);
    }

    /// Returns false when the subscription was already removed.
    bool remove(const std::string& session, uint64_t token) {
        std::lock_guard lk(m_);
        return subs_.erase({session, token}) > 0;
    }

    void clear() {
        std::set<std::pair<std::string, uint64_t>> subs;
        {
            std::lock_guard lk(m_);
            subs.swap(subs_);
        }
        for (const auto& [session, token] : subs) {
            try {
                wb_.unsubscribe(session, token);
            } catch (const Error&) {
            }
        }
    }

private:
    Workbench& wb_;
    std::mutex m_;
    std::set<std::pair<std::string, uint64_t>> subs_;
};

void Connection::detach() {
    if (!token_) return;
    if (reg_.remove(session_, *token_)) {
        try {
            wb_.unsubscribe(session_, *token_);
        } catch (const Error&) {
        }
    }
    token_.reset();
}

void Connection::on_request(beast::error_code ec) {
    if (ec || !websocket::is_upgrade(req_)) return;
    std::string target(req_.target());
    const std::string prefix = "/sessions/";
    if (target.rfind(prefix, 0) != 0) return;
    session_ = target.substr(prefix.size());
    ws_.async_accept(req_, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
}

void Connection::on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<Connection> weak = shared_from_this();
    try {
        uint64_t generation = wb_.generation(session_);
        token_ = wb_.subscribe(session_, [weak](const nlohmann::json& msg) {
            if (auto self = weak.lock()) self->send(msg.dump());
        });
        reg_.add(session_, *token_);
        send(nlohmann::json{{"session", session_}, {"generation", generation}, {"viewDelta", {{"kind", "hello"}}}}
                 .dump());
    } catch (const Error& e) {
        send(nlohmann::json{{"error", to_string(e.code())}, {"message", e.what()}}.dump());
        auto self = shared_from_this();
        net::post(ws_.get_executor(), [self] {
            self->ws_.async_close(websocket::close_code::policy_error, [self](beast::error_code) {});
        });
        return;
    }
    read_loop();
}

}  // namespace

struct WsFeed::Impl {
    explicit Impl(Workbench& w) : wb(w), registry(w) {}

    void accept() {
        acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            std::make_shared<Connection>(std::move(socket), wb, registry)->run();
            accept();
        });
    }

    Workbench& wb;
    Registry registry;
    net::io_context ioc{1};
    std::optional<tcp::acceptor> acceptor;
    std::thread thread;
    int port = 0;
};

WsFeed::WsFeed(Workbench& wb) : impl_(std::make_unique<Impl>(wb)) {}

WsFeed::~WsFeed() { stop(); }

void WsFeed::start(const std::string& host, int port) {
    try {
        tcp::endpoint ep(net::ip::make_address(host), static_cast<unsigned short>(port));
        impl_->acceptor.emplace(impl_->ioc);
        impl_->acceptor->open(ep.protocol());
        impl_->acceptor->set_option(net::socket_base::reuse_address(true));
        impl_->acceptor->bind(ep);
        impl_->acceptor->listen();
        impl_->port = impl_->acceptor->local_endpoint().port();
    } catch (const std::exception& e) {
        impl_->acceptor.reset();
        throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port) + ": " + e.what());
    }
    impl_->accept();
    impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void WsFeed::stop() {
    if (!impl_->thread.joinable()) return;
    impl_->registry.clear();
    impl_->ioc.stop();
    impl_->thread.join();
    impl_->acceptor.reset();
}

int WsFeed::port() const { return impl_->port; }

}  // namespace livemodel::detail
