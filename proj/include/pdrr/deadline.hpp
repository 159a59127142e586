#pragma once
// Cooperative per-record deadline, checked between pipeline steps.

#include <chrono>
#include <optional>

#include "pdrr/error.hpp"

namespace pdrr {

class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    Deadline() = default;  // never expires
    explicit Deadline(std::chrono::milliseconds budget) : at_(Clock::now() + budget) {}

    bool expired() const { return at_ && Clock::now() >= *at_; }
    void check(const char* where) const {
        if (expired()) throw Timeout(std::string("deadline passed before ") + where);
    }

private:
    std::optional<Clock::time_point> at_;
};

}  // namespace pdrr
