#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>

namespace livemodel {

/// Shared cancellation flag; copies observe the same flag.
class CancelToken {
public:
    CancelToken() : flag_(std::make_shared<std::atomic<bool>>(false)) {}

    void cancel() const { flag_->store(true, std::memory_order_relaxed); }
    bool cancelled() const { return flag_->load(std::memory_order_relaxed); }
    /// Throws Error(Cancelled) once cancelled.
    void check() const;

private:
    std::shared_ptr<std::atomic<bool>> flag_;
};

struct SearchControl {
    CancelToken cancel;
    /// Sleep applied before a search starts; cancellable. Used to simulate slow solves.
    std::chrono::milliseconds artificial_delay{0};
    /// Search-space budget as a power of two.
    int budget_log2 = 40;
    /// Candidates between cancellation polls.
    uint32_t poll_interval = 1024;
};

/// Sleeps for `d` in short slices, throwing Error(Cancelled) as soon as the token fires.
void cancellable_sleep(const CancelToken& token, std::chrono::milliseconds d);

}  // namespace livemodel
