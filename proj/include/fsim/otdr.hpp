#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsim/fibre_plant.hpp"
#include "fsim/rng.hpp"
#include "fsim/time.hpp"

namespace fsim {

// Optical gate implementation behind the backscatter branch. The response
// time separates a command from its optical effect; max_attenuation_db is the
// closed-gate extinction.
struct GateTechnology {
    std::string name = "eo_switch";
    SimTime response_time = SimTime::ns(290);
    double max_attenuation_db = 40.0;
};

inline GateTechnology eo_switch_gate() { return {"eo_switch", SimTime::ns(290), 40.0}; }
inline GateTechnology mems_voa_gate() { return {"mems_voa", SimTime::ms(3), 40.0}; }

struct GateStep {
    SimTime start;          // relative to the pulse launch
    double attenuation_db = 0.0;
};

// Piecewise-constant attenuation applied to returning backscatter, relative
// to each pulse launch. A sample that lands exactly on a transition sees the
// post-transition value, matching the engine's insertion-order tiebreak.
struct GateSchedule {
    std::vector<GateStep> steps;
    GateTechnology technology;

    static GateSchedule always_open(GateTechnology tech = {});
    static GateSchedule uniform(double attenuation_db, GateTechnology tech = {});

    void validate() const;
    double attenuation_at(SimTime t_after_pulse) const;
    bool is_identity() const;
};

struct OtdrConfig {
    double wavelength_nm = 1550.0;
    SimTime pulse_width = SimTime::ns(100);
    SimTime pulse_period = SimTime::us(200);
    double launch_power_dbm = 0.0;
    // 0 means noiseless (infinite averaging); otherwise additive noise at the
    // floor level scales as 1/sqrt(num_averages).
    int num_averages = 1024;
    double bin_size_m = 10.0;
    double noise_floor_db = -80.0;
    // Receiver clipping level; strong reflections render at this ceiling.
    double saturation_db = -40.0;
    // Rayleigh capture product: backscattered fraction per metre of pulse
    // occupancy. Default puts a 100 ns pulse at -50 dB relative to launch.
    double backscatter_coeff_per_m = 9.7934e-7;

    void validate(const FibrePath& path) const; // throws ConfigInvalid
};

struct OtdrTrace {
    std::vector<double> bin_center_m;
    std::vector<SimTime> arrival;   // round-trip time of each bin centre
    std::vector<double> power_db;
    OtdrConfig config;
    GateSchedule gate;

    std::size_t size() const { return power_db.size(); }
};

enum class FeatureKind { Connector, FibreEnd };

struct TraceFeature {
    double position_m = 0.0;
    FeatureKind kind = FeatureKind::Connector;
    double magnitude_db = 0.0; // spike prominence over the local baseline
};

// Ungated single-shot trace: Rayleigh baseline with slope -2*alpha, one-bin
// reflectance spikes, receiver saturation, optional additive noise, floor
// clamp. Throws ConfigInvalid for degenerate configs or paths.
OtdrTrace raw_trace(const OtdrConfig& config, const FibrePath& path, RngStream& rng);

// Applies a gate schedule bin-wise: power - attenuation(arrival), clamped at
// the noise floor. A zero schedule returns the input bit-for-bit.
OtdrTrace apply_gate(const OtdrTrace& trace, const GateSchedule& schedule);

// Maps a per-pulse obscuring window (delay, duration) to the fibre section it
// hides, clamped to [0, length].
std::pair<double, double> obscuring_window_to_distance(SimTime delay, SimTime duration,
                                                       const FibrePath& path);

struct FeatureDetectorConfig {
    double prominence_db = 3.0;   // spike height over local baseline
    int baseline_window_bins = 5; // bins sampled on each side of a candidate
    double floor_margin_db = 2.0; // "at the noise floor" tolerance
};

// Reports reflective spikes with bin-accurate positions. The last spike
// followed by sustained noise floor is classified as the fibre end.
std::vector<TraceFeature> detect_features(const OtdrTrace& trace,
                                          const FeatureDetectorConfig& det = {});

// Fibre section whose backscatter escapes before a gate that starts closing
// at pulse detection has fully closed: v_g * response_time / 2. Not clamped
// to the plant length; values past the end mean the whole fibre leaks.
double leaked_length_m(SimTime response_time, const FibrePath& path);

// CSV export: header `distance_m,power_db`, fixed 6 decimal places.
void write_trace_csv(const OtdrTrace& trace, std::ostream& out);

} // namespace fsim
