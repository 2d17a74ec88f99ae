#pragma once

#include <chrono>
#include <exception>
#include <optional>

namespace gramml {

/// Cooperative wall-clock cancellation. Long-running work (training loops,
/// CV folds) polls cancelled() and bails out with Cancelled when the
/// deadline has passed.
class CancelToken {
public:
    static CancelToken never() { return CancelToken{}; }

    static CancelToken after(std::chrono::duration<double> budget) {
        CancelToken t;
        t.deadline_ = std::chrono::steady_clock::now() +
                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
        return t;
    }

    bool cancelled() const {
        return deadline_ && std::chrono::steady_clock::now() >= *deadline_;
    }

private:
    std::optional<std::chrono::steady_clock::time_point> deadline_;
};

struct Cancelled : std::exception {
    const char* what() const noexcept override { return "evaluation cancelled: budget exceeded"; }
};

inline void throw_if_cancelled(const CancelToken& token) {
    if (token.cancelled()) throw Cancelled{};
}

} // namespace gramml
