#include "livemodel/cancel.hpp"

#include <algorithm>
#include <thread>

#include "livemodel/diagnostic.hpp"

namespace livemodel {

void CancelToken::check() const {
    if (cancelled()) throw Error(ErrorCode::Cancelled, "search cancelled");
}

void cancellable_sleep(const CancelToken& token, std::chrono::milliseconds d) {
    using clock = std::chrono::steady_clock;
    const auto slice = std::chrono::milliseconds(5);
    auto deadline = clock::now() + d;
    token.check();
    while (true) {
        auto now = clock::now();
        if (now >= deadline) return;
        std::this_thread::sleep_for(std::min<clock::duration>(slice, deadline - now));
        token.check();
    }
}

}  // namespace livemodel
