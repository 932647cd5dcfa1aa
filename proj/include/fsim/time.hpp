#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

#include "fsim/errors.hpp"

namespace fsim {

// Virtual time as an integer count of picoseconds. 1 tick = 1 ps, which keeps
// every latency in play (tens of ns gate actuations up to multi-second traces)
// exactly representable in one int64 timeline. Arithmetic is overflow-checked;
// the timeline never silently wraps.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_ticks(std::int64_t t) { return SimTime(t); }
    static constexpr SimTime ps(std::int64_t v) { return SimTime(v); }
    static SimTime ns(std::int64_t v) { return SimTime(checked_scale(v, 1'000)); }
    static SimTime us(std::int64_t v) { return SimTime(checked_scale(v, 1'000'000)); }
    static SimTime ms(std::int64_t v) { return SimTime(checked_scale(v, 1'000'000'000)); }
    static SimTime sec(std::int64_t v) { return SimTime(checked_scale(v, 1'000'000'000'000)); }

    static SimTime from_seconds(double s) {
        if (!std::isfinite(s))
            throw Error("SimTime: non-finite seconds value");
        const double t = s * 1e12;
        if (t >= 9.2e18 || t <= -9.2e18)
            throw Error("SimTime: seconds value out of tick range");
        return SimTime(std::llround(t));
    }

    constexpr std::int64_t ticks() const { return ticks_; }
    constexpr double seconds() const { return static_cast<double>(ticks_) * 1e-12; }

    SimTime operator+(SimTime o) const {
        std::int64_t r = 0;
        if (__builtin_add_overflow(ticks_, o.ticks_, &r))
            throw Error("SimTime: addition overflow");
        return SimTime(r);
    }
    SimTime operator-(SimTime o) const {
        std::int64_t r = 0;
        if (__builtin_sub_overflow(ticks_, o.ticks_, &r))
            throw Error("SimTime: subtraction overflow");
        return SimTime(r);
    }
    SimTime& operator+=(SimTime o) { return *this = *this + o; }
    SimTime& operator-=(SimTime o) { return *this = *this - o; }

    auto operator<=>(const SimTime&) const = default;

    std::string to_string() const { return std::to_string(ticks_) + "ps"; }

private:
    explicit constexpr SimTime(std::int64_t t) : ticks_(t) {}

    static std::int64_t checked_scale(std::int64_t v, std::int64_t unit) {
        std::int64_t r = 0;
        if (__builtin_mul_overflow(v, unit, &r))
            throw Error("SimTime: unit conversion overflow");
        return r;
    }

    std::int64_t ticks_ = 0;
};

} // namespace fsim
