#include "fsim/engine.hpp"

#include <algorithm>
#include <utility>

namespace fsim {

void Engine::schedule(SimTime t, std::string source, std::string kind, Action action) {
    if (t < now_)
        throw SchedulingInPast("schedule: event at " + t.to_string() + " is before now=" +
                               now_.to_string() + " (source=" + source + ", kind=" + kind + ")");
    heap_.push_back(Pending{t, next_sequence_++, std::move(kind), std::move(source),
                            std::move(action)});
    std::push_heap(heap_.begin(), heap_.end(), later);
}

std::vector<EventRecord> Engine::run_until(SimTime t_end) {
    if (t_end < now_)
        throw SchedulingInPast("run_until: target " + t_end.to_string() + " is before now=" +
                               now_.to_string());
    std::vector<EventRecord> processed;
    while (!heap_.empty() && heap_.front().time <= t_end) {
        std::pop_heap(heap_.begin(), heap_.end(), later);
        Pending ev = std::move(heap_.back());
        heap_.pop_back();

        now_ = ev.time;
        EventRecord rec{ev.time, ev.sequence, ev.kind, ev.source};
        log_.push_back(rec);
        processed.push_back(std::move(rec));
        if (ev.action)
            ev.action(*this);
    }
    now_ = t_end;
    return processed;
}

} // namespace fsim
