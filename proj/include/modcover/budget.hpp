#pragma once

#include <chrono>
#include <optional>

#include "modcover/error.hpp"

namespace modcover {

/// Cooperative wall-clock deadline. Long-running loops call check() at
/// coarse intervals; an unset deadline never fires.
class Deadline {
public:
    using clock = std::chrono::steady_clock;

    Deadline() = default;

    static Deadline after(std::chrono::duration<double> budget) {
        Deadline d;
        d.at_ = clock::now() + std::chrono::duration_cast<clock::duration>(budget);
        return d;
    }

    static Deadline none() { return {}; }

    [[nodiscard]] bool expired() const { return at_ && clock::now() >= *at_; }

    void check(const char* where) const {
        if (expired()) throw Timeout(std::string("deadline exceeded in ") + where);
    }

private:
    std::optional<clock::time_point> at_;
};

/// Seconds elapsed since construction.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace modcover
