#pragma once

#include <memory>
#include <string>

#include "livemodel/service.hpp"

namespace livemodel::detail {

/// WebSocket listener that relays a session's pushes to each connected client.
class WsFeed {
public:
    explicit WsFeed(Workbench& wb);
    ~WsFeed();

    /// Throws std::runtime_error when the port cannot be bound.
    void start(const std::string& host, int port);
    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace livemodel::detail
