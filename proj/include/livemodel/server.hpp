#pragma once

#include <memory>
#include <string>

#include "livemodel/service.hpp"

namespace livemodel {

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// HTTP port; 0 picks a free one. The WebSocket listener uses the next port.
    int port = 8080;
};

/// Local HTTP API over a workbench, plus a WebSocket feed of view updates at
/// ws://host:(port+1)/sessions/<id>.
class Server {
public:
    Server(Workbench& wb, ServerOptions options = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds both listeners and serves in background threads. Throws std::runtime_error.
    void start();
    void stop();
    /// Blocks until stop() is called from another thread.
    void wait();

    int port() const;
    int ws_port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace livemodel
