#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fsim/engine.hpp"
#include "fsim/layer.hpp"
#include "fsim/otdr.hpp"
#include "fsim/sop.hpp"
#include "fsim/time.hpp"

namespace fsim {

// The four device states. BLS (backscatter sensing) runs through the optical
// gate; SoP sensing is defeated by activating the scrambler. So:
//   gate open       <=> state in {AllEnabled, BlsOnly}
//   scrambler active <=> state in {BlsOnly, NoneEnabled}
enum class FscdState : std::uint8_t {
    AllEnabled = 0,
    SopsOnly = 1,
    BlsOnly = 2,
    NoneEnabled = 3,
};

std::string to_string(FscdState s);

constexpr bool gate_open_in(FscdState s) {
    return s == FscdState::AllEnabled || s == FscdState::BlsOnly;
}
constexpr bool scrambler_active_in(FscdState s) {
    return s == FscdState::BlsOnly || s == FscdState::NoneEnabled;
}
constexpr FscdState state_for_policy(bool sops_allowed, bool bls_allowed) {
    if (sops_allowed)
        return bls_allowed ? FscdState::AllEnabled : FscdState::SopsOnly;
    return bls_allowed ? FscdState::BlsOnly : FscdState::NoneEnabled;
}
// Lockdown of the backscatter branch only; the scrambler side is untouched.
constexpr FscdState with_bls_disabled(FscdState s) {
    switch (s) {
    case FscdState::AllEnabled: return FscdState::SopsOnly;
    case FscdState::BlsOnly: return FscdState::NoneEnabled;
    default: return s;
    }
}

struct ObscuringWindow {
    SimTime delay;    // after each detected pulse
    SimTime duration;
};

struct FscdConfig {
    GateTechnology gate = eo_switch_gate();
    ScramblerConfig scrambler;
    double detector_threshold_dbm = -30.0;
    SimTime agent_decision_time = SimTime::ns(50);
    std::optional<ObscuringWindow> obscuring;
};

enum class FscdAction : std::uint8_t {
    PulseDetected,
    GateCommand,
    GateSettled,
    ScramblerCommand,
    ScramblerActive,
    StateChange,
    AlertSent,
};

std::string to_string(FscdAction a);

struct FscdActionRecord {
    SimTime t;
    std::string device_id;
    FscdAction kind;
    std::string detail;
    std::optional<Layer> origin; // which control layer commanded the actuation
};

// CSV export: `t_ps,device_id,record_kind,detail`.
void write_action_log_csv(const std::vector<FscdActionRecord>& log, std::ostream& out);

// Fibre sensing control device: photodetector trigger, backscatter gate with
// technology-dependent response time, polarization scrambler, and the
// real-time agent that sequences them. Mutated only through engine events.
class FscdDevice {
public:
    FscdDevice(std::string id, FscdConfig config, FscdState initial = FscdState::AllEnabled);

    const std::string& id() const { return id_; }
    const FscdConfig& config() const { return config_; }
    FscdState state() const { return state_; }
    bool gate_closed() const { return gate_closed_; }
    bool scrambler_active() const { return scrambler_active_; }
    std::optional<SimTime> scrambler_active_since() const { return scrambler_active_since_; }
    const std::vector<FscdActionRecord>& log() const { return log_; }

    // Policy verdict distributed by the control plane.
    void set_allowed_interrogators(std::set<std::string> ids);
    bool interrogator_authorized(const std::string& interrogator_id) const;

    void set_obscuring(std::optional<ObscuringWindow> window);
    void set_obscuring_windows(std::vector<ObscuringWindow> windows);
    const std::vector<ObscuringWindow>& obscuring_windows() const { return obscuring_windows_; }

    // Schedules gate/scrambler actuations for a state change decided at t.
    // Re-entering the current state emits nothing.
    void set_state(FscdState new_state, SimTime t, Engine& engine,
                   std::optional<Layer> origin = std::nullopt);

    // Photodetector event for a pulse arriving at t. Unauthorized pulses
    // above threshold trigger the blocking reaction and an alert; authorized
    // pulses trigger the configured per-pulse obscuring commands.
    void on_optical_pulse(double pulse_power_dbm, SimTime t,
                          const std::string& interrogator_id, bool authorized,
                          Engine& engine);

    // Effective attenuation-vs-time profile this device imposes on the
    // backscatter of one pulse, relative to the pulse arrival. Combines the
    // state truth table, the obscuring window, and detection-triggered
    // blocking. Gate actuation lag is already folded in: obscuring commands
    // are issued response_time early so the optical window lands where
    // configured, while detection-triggered blocking cannot begin before
    // decision + response time.
    GateSchedule gate_schedule_for_pulse(SimTime pulse_time, bool authorized) const;

    // Alert hook toward the region controller (wired by the control plane).
    std::function<void(const FscdDevice&, double power_dbm, SimTime t)> on_alert;

private:
    void record(SimTime t, FscdAction kind, std::string detail,
                std::optional<Layer> origin = std::nullopt);
    void command_gate(bool close, SimTime decided_at, Engine& engine,
                      std::optional<Layer> origin);
    void command_scrambler(bool activate, SimTime decided_at, Engine& engine,
                           std::optional<Layer> origin);

    std::string id_;
    FscdConfig config_;
    FscdState state_;
    bool gate_closed_;
    bool scrambler_active_;
    bool gate_command_pending_ = false;
    bool gate_pending_close_ = false;
    std::optional<SimTime> scrambler_active_since_;
    std::set<std::string> allowed_interrogators_;
    std::vector<ObscuringWindow> obscuring_windows_;
    std::vector<FscdActionRecord> log_;
};

// Attenuation-wise max of two schedules (one physical gate, two reasons to
// close it).
GateSchedule combine_schedules(const GateSchedule& a, const GateSchedule& b);

} // namespace fsim
