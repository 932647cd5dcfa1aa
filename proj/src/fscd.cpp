#include "fsim/fscd.hpp"

#include <algorithm>
#include <ostream>

namespace fsim {

std::string to_string(FscdState s) {
    switch (s) {
    case FscdState::AllEnabled: return "all_enabled";
    case FscdState::SopsOnly: return "sops_only";
    case FscdState::BlsOnly: return "bls_only";
    case FscdState::NoneEnabled: return "none_enabled";
    }
    return "?";
}

std::string to_string(FscdAction a) {
    switch (a) {
    case FscdAction::PulseDetected: return "pulse_detected";
    case FscdAction::GateCommand: return "gate_command";
    case FscdAction::GateSettled: return "gate_settled";
    case FscdAction::ScramblerCommand: return "scrambler_command";
    case FscdAction::ScramblerActive: return "scrambler_active";
    case FscdAction::StateChange: return "state_change";
    case FscdAction::AlertSent: return "alert_sent";
    }
    return "?";
}

void write_action_log_csv(const std::vector<FscdActionRecord>& log, std::ostream& out) {
    out << "t_ps,device_id,record_kind,detail\n";
    for (const auto& rec : log) {
        std::string detail = rec.detail;
        if (rec.origin)
            detail += (detail.empty() ? "" : " ") + std::string("origin=") +
                      to_string(*rec.origin);
        out << rec.t.ticks() << ',' << rec.device_id << ',' << to_string(rec.kind) << ','
            << detail << '\n';
    }
}

FscdDevice::FscdDevice(std::string id, FscdConfig config, FscdState initial)
    : id_(std::move(id)), config_(std::move(config)), state_(initial),
      gate_closed_(!gate_open_in(initial)), scrambler_active_(scrambler_active_in(initial)) {
    if (scrambler_active_)
        scrambler_active_since_ = SimTime();
    if (config_.obscuring)
        obscuring_windows_.push_back(*config_.obscuring);
}

void FscdDevice::set_allowed_interrogators(std::set<std::string> ids) {
    allowed_interrogators_ = std::move(ids);
}

bool FscdDevice::interrogator_authorized(const std::string& interrogator_id) const {
    return allowed_interrogators_.count(interrogator_id) > 0;
}

void FscdDevice::set_obscuring(std::optional<ObscuringWindow> window) {
    config_.obscuring = window;
    obscuring_windows_.clear();
    if (window)
        obscuring_windows_.push_back(*window);
}

void FscdDevice::set_obscuring_windows(std::vector<ObscuringWindow> windows) {
    obscuring_windows_ = std::move(windows);
    config_.obscuring =
        obscuring_windows_.empty() ? std::nullopt : std::optional(obscuring_windows_.front());
}

void FscdDevice::record(SimTime t, FscdAction kind, std::string detail,
                        std::optional<Layer> origin) {
    log_.push_back({t, id_, kind, std::move(detail), origin});
}

void FscdDevice::command_gate(bool close, SimTime decided_at, Engine& engine,
                              std::optional<Layer> origin) {
    gate_command_pending_ = true;
    gate_pending_close_ = close;
    const SimTime cmd_t = decided_at + config_.agent_decision_time;
    engine.schedule(cmd_t, id_, close ? "gate_command close" : "gate_command open",
                    [this, close, origin](Engine& eng) {
                        record(eng.now(), FscdAction::GateCommand, close ? "close" : "open",
                               origin);
                        eng.schedule(eng.now() + config_.gate.response_time, id_,
                                     close ? "gate_settled closed" : "gate_settled open",
                                     [this, close, origin](Engine& eng2) {
                                         gate_closed_ = close;
                                         if (gate_command_pending_ &&
                                             gate_pending_close_ == close)
                                             gate_command_pending_ = false;
                                         record(eng2.now(), FscdAction::GateSettled,
                                                close ? "closed" : "open", origin);
                                     });
                    });
}

void FscdDevice::command_scrambler(bool activate, SimTime decided_at, Engine& engine,
                                   std::optional<Layer> origin) {
    const SimTime cmd_t = decided_at + config_.agent_decision_time;
    engine.schedule(cmd_t, id_, activate ? "scrambler_command on" : "scrambler_command off",
                    [this, activate, origin](Engine& eng) {
                        record(eng.now(), FscdAction::ScramblerCommand,
                               activate ? "on" : "off", origin);
                        eng.schedule(eng.now() + config_.scrambler.activation_delay, id_,
                                     activate ? "scrambler_active on" : "scrambler_active off",
                                     [this, activate, origin](Engine& eng2) {
                                         scrambler_active_ = activate;
                                         if (activate)
                                             scrambler_active_since_ = eng2.now();
                                         else
                                             scrambler_active_since_.reset();
                                         record(eng2.now(), FscdAction::ScramblerActive,
                                                activate ? "on" : "off", origin);
                                     });
                    });
}

void FscdDevice::set_state(FscdState new_state, SimTime t, Engine& engine,
                           std::optional<Layer> origin) {
    if (new_state == state_)
        return;
    record(t, FscdAction::StateChange,
           to_string(state_) + " -> " + to_string(new_state), origin);
    const bool want_gate_closed = !gate_open_in(new_state);
    const bool want_scrambler = scrambler_active_in(new_state) && config_.scrambler.enabled;
    state_ = new_state;

    const bool gate_heading_to =
        gate_command_pending_ ? gate_pending_close_ : gate_closed_;
    if (want_gate_closed != gate_heading_to)
        command_gate(want_gate_closed, t, engine, origin);
    if (want_scrambler != scrambler_active_)
        command_scrambler(want_scrambler, t, engine, origin);
}

void FscdDevice::on_optical_pulse(double pulse_power_dbm, SimTime t,
                                  const std::string& interrogator_id, bool authorized,
                                  Engine& engine) {
    // The photodetector sits in the backscatter branch: a closed gate means
    // pulses no longer reach it, so a blocked interrogator cannot retrigger.
    if (gate_closed_)
        return;
    if (pulse_power_dbm < config_.detector_threshold_dbm)
        return;
    record(t, FscdAction::PulseDetected,
           interrogator_id + (authorized ? " authorized" : " unauthorized"));

    if (!authorized) {
        record(t, FscdAction::AlertSent, "unauthorized pulse " + interrogator_id);
        if (on_alert)
            on_alert(*this, pulse_power_dbm, t);
        const bool heading_closed =
            gate_command_pending_ ? gate_pending_close_ : gate_closed_;
        if (!heading_closed) {
            const FscdState blocked = with_bls_disabled(state_);
            if (blocked != state_) {
                record(t, FscdAction::StateChange,
                       to_string(state_) + " -> " + to_string(blocked), Layer::Agent);
                state_ = blocked;
            }
            command_gate(true, t, engine, Layer::Agent);
        }
        return;
    }

    // Commands go out response_time early so the optical window lands at
    // [delay, delay+duration]; a window too close to the pulse is pushed out
    // to the earliest reachable instant. Transient actuation only; the
    // quiescent state is untouched.
    const SimTime d_a = config_.agent_decision_time;
    const SimTime r = config_.gate.response_time;
    for (const auto& window : obscuring_windows_) {
        const SimTime earliest_cmd = t + d_a;
        SimTime close_cmd = t + window.delay - r;
        if (close_cmd < earliest_cmd)
            close_cmd = earliest_cmd;
        const SimTime open_cmd = t + window.delay + window.duration - r;
        if (open_cmd <= close_cmd)
            continue;
        command_gate(true, close_cmd - d_a, engine, Layer::Agent);
        command_gate(false, open_cmd - d_a, engine, Layer::Agent);
    }
}

GateSchedule FscdDevice::gate_schedule_for_pulse(SimTime pulse_time, bool authorized) const {
    (void)pulse_time;
    const double max_att = config_.gate.max_attenuation_db;
    GateSchedule sched = GateSchedule::always_open(config_.gate);
    if (gate_closed_ || !gate_open_in(state_))
        return GateSchedule::uniform(max_att, config_.gate);

    const SimTime d_a = config_.agent_decision_time;
    const SimTime r = config_.gate.response_time;
    if (authorized) {
        for (const auto& window : obscuring_windows_) {
            SimTime start = window.delay;
            const SimTime earliest = d_a + r;
            if (start < earliest)
                start = earliest;
            const SimTime end = window.delay + window.duration;
            if (end <= start)
                continue;
            GateSchedule w;
            w.technology = config_.gate;
            w.steps = {{SimTime(), 0.0}, {start, max_att}, {end, 0.0}};
            sched = combine_schedules(sched, w);
        }
    } else {
        // Blocking starts once the agent has decided and the gate has closed.
        GateSchedule block;
        block.technology = config_.gate;
        block.steps = {{SimTime(), 0.0}, {d_a + r, max_att}};
        sched = combine_schedules(sched, block);
    }
    sched.technology = config_.gate;
    sched.validate();
    return sched;
}

GateSchedule combine_schedules(const GateSchedule& a, const GateSchedule& b) {
    a.validate();
    b.validate();
    std::vector<SimTime> starts;
    for (const auto& s : a.steps)
        starts.push_back(s.start);
    for (const auto& s : b.steps)
        starts.push_back(s.start);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

    GateSchedule out;
    out.technology = a.technology;
    for (const SimTime t : starts) {
        const double att = std::max(a.attenuation_at(t), b.attenuation_at(t));
        if (!out.steps.empty() && out.steps.back().attenuation_db == att)
            continue;
        out.steps.push_back({t, att});
    }
    if (out.steps.empty() || out.steps.front().start != SimTime())
        out.steps.insert(out.steps.begin(), {SimTime(), 0.0});
    out.validate();
    return out;
}

} // namespace fsim
