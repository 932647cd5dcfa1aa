#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fsim {

// Deterministic random stream, derived from a scenario seed plus a stable
// per-consumer label. The generator is xoshiro256++ seeded through splitmix64,
// so the same (seed, stream_id) pair replays the identical sequence on every
// platform; std::* distributions are avoided for the same reason. Adding a new
// consumer (new stream_id) never disturbs the draws of existing ones.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id);

    std::uint64_t seed() const { return seed_; }
    const std::string& stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller (pairs cached).
    double normal();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::string stream_id_;
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fsim
