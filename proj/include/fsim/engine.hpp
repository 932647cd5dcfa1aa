#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fsim/errors.hpp"
#include "fsim/time.hpp"

namespace fsim {

// One processed event, as it appears in the engine log.
struct EventRecord {
    SimTime time;
    std::uint64_t sequence = 0;
    std::string kind;
    std::string source;

    bool operator==(const EventRecord&) const = default;
};

// Single-threaded discrete-event engine. Events pop in (time, sequence)
// lexicographic order; the sequence counter makes simultaneous events pop in
// insertion order, so "gate switches exactly when the pulse arrives" resolves
// the same way on every run.
class Engine {
public:
    using Action = std::function<void(Engine&)>;

    SimTime now() const { return now_; }

    // Throws SchedulingInPast if t < now().
    void schedule(SimTime t, std::string source, std::string kind, Action action);

    // Processes every event with time <= t_end, advances now() to t_end and
    // returns the records processed by this call, in pop order.
    std::vector<EventRecord> run_until(SimTime t_end);

    // Cumulative log of all processed events.
    const std::vector<EventRecord>& log() const { return log_; }

    std::size_t pending_count() const { return heap_.size(); }

private:
    struct Pending {
        SimTime time;
        std::uint64_t sequence;
        std::string kind;
        std::string source;
        Action action;
    };

    // std::greater-style comparison: the heap keeps the earliest event on top.
    static bool later(const Pending& a, const Pending& b) {
        if (a.time != b.time)
            return a.time > b.time;
        return a.sequence > b.sequence;
    }

    std::vector<Pending> heap_;
    std::vector<EventRecord> log_;
    SimTime now_;
    std::uint64_t next_sequence_ = 0;
};

} // namespace fsim
