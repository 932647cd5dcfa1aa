#include "fsim/otdr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fsim {

GateSchedule GateSchedule::always_open(GateTechnology tech) {
    GateSchedule s;
    s.technology = std::move(tech);
    s.steps = {{SimTime(), 0.0}};
    return s;
}

GateSchedule GateSchedule::uniform(double attenuation_db, GateTechnology tech) {
    GateSchedule s;
    s.technology = std::move(tech);
    s.steps = {{SimTime(), attenuation_db}};
    return s;
}

void GateSchedule::validate() const {
    if (steps.empty())
        throw ConfigInvalid("gate schedule has no steps");
    if (steps.front().start != SimTime())
        throw ConfigInvalid("gate schedule must start at t=0");
    SimTime prev = steps.front().start;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].attenuation_db < 0.0)
            throw ConfigInvalid("gate attenuation must be >= 0");
        if (i > 0 && steps[i].start <= prev)
            throw ConfigInvalid("gate schedule starts must be strictly increasing");
        prev = steps[i].start;
    }
}

double GateSchedule::attenuation_at(SimTime t_after_pulse) const {
    double att = 0.0;
    for (const auto& step : steps) {
        if (step.start <= t_after_pulse)
            att = step.attenuation_db;
        else
            break;
    }
    return att;
}

bool GateSchedule::is_identity() const {
    return std::all_of(steps.begin(), steps.end(),
                       [](const GateStep& s) { return s.attenuation_db == 0.0; });
}

void OtdrConfig::validate(const FibrePath& path) const {
    path.validate();
    if (!(path.total_length_m() > 0.0))
        throw ConfigInvalid("path length must be > 0");
    if (!(pulse_width > SimTime()))
        throw ConfigInvalid("pulse width must be > 0");
    if (!(bin_size_m > 0.0))
        throw ConfigInvalid("bin size must be > 0");
    if (num_averages < 0)
        throw ConfigInvalid("num_averages must be >= 0");
    if (pulse_period <= round_trip_delay(path, path.total_length_m()))
        throw ConfigInvalid("pulse period must exceed the full round-trip time");
    if (saturation_db <= noise_floor_db)
        throw ConfigInvalid("saturation level must sit above the noise floor");
    if (!(backscatter_coeff_per_m > 0.0))
        throw ConfigInvalid("backscatter coefficient must be > 0");
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double group_index_at(const FibrePath& path, double distance_m) {
    double pos = 0.0;
    for (const auto& seg : path.segments) {
        pos += seg.length_m;
        if (distance_m <= pos)
            return seg.group_index;
    }
    return path.segments.back().group_index;
}

} // namespace

OtdrTrace raw_trace(const OtdrConfig& config, const FibrePath& path, RngStream& rng) {
    config.validate(path);

    const double length = path.total_length_m();
    const std::size_t bins = static_cast<std::size_t>(std::ceil(length / config.bin_size_m));
    const double launch_mw = db_to_linear(config.launch_power_dbm);
    const double floor_lin = db_to_linear(config.noise_floor_db);
    const double sat_lin = db_to_linear(config.saturation_db);
    const double tau_s = config.pulse_width.seconds();

    OtdrTrace trace;
    trace.config = config;
    trace.gate = GateSchedule::always_open();
    trace.bin_center_m.resize(bins);
    trace.arrival.resize(bins);
    trace.power_db.resize(bins);

    // Per-bin signal in linear power (mW).
    std::vector<double> signal(bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) {
        const double z = (static_cast<double>(i) + 0.5) * config.bin_size_m;
        trace.bin_center_m[i] = z;
        if (z <= length) {
            trace.arrival[i] = round_trip_delay(path, z);
            const double vg = kSpeedOfLightMps / group_index_at(path, z);
            const double two_way_loss = db_to_linear(-2.0 * one_way_attenuation(path, z));
            signal[i] = launch_mw * config.backscatter_coeff_per_m * (vg * tau_s / 2.0) *
                        two_way_loss;
        } else {
            // Bin centre past the fibre end (partial last bin): no backscatter.
            trace.arrival[i] = round_trip_delay(path, length);
        }
    }

    for (const auto& ev : reflective_events(path)) {
        const double refl = launch_mw * db_to_linear(-ev.return_loss_db) *
                            db_to_linear(-2.0 * one_way_attenuation(path, ev.position_m));
        const auto idx = std::min<std::size_t>(
            bins - 1, static_cast<std::size_t>(ev.position_m / config.bin_size_m));
        signal[idx] += refl;
    }

    const double noise_scale =
        config.num_averages > 0 ? 1.0 / std::sqrt(static_cast<double>(config.num_averages))
                                : 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        double lin = std::min(signal[i], sat_lin);
        if (config.num_averages > 0)
            lin += floor_lin * (1.0 + noise_scale * rng.normal());
        lin = std::min(lin, sat_lin);
        const double db = lin > 0.0 ? 10.0 * std::log10(lin) : config.noise_floor_db;
        trace.power_db[i] = std::max(db, config.noise_floor_db);
    }
    return trace;
}

OtdrTrace apply_gate(const OtdrTrace& trace, const GateSchedule& schedule) {
    schedule.validate();
    OtdrTrace out = trace;
    out.gate = schedule;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double att = schedule.attenuation_at(trace.arrival[i]);
        if (att != 0.0)
            out.power_db[i] = std::max(trace.power_db[i] - att, trace.config.noise_floor_db);
    }
    return out;
}

std::pair<double, double> obscuring_window_to_distance(SimTime delay, SimTime duration,
                                                       const FibrePath& path) {
    if (delay < SimTime() || duration < SimTime())
        throw OutOfRange("obscuring delay and duration must be >= 0");
    const double z1 = distance_for_round_trip(path, delay);
    const double z2 = distance_for_round_trip(path, delay + duration);
    return {z1, z2};
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1)
        return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<TraceFeature> detect_features(const OtdrTrace& trace,
                                          const FeatureDetectorConfig& det) {
    std::vector<TraceFeature> features;
    const auto& p = trace.power_db;
    const std::size_t n = p.size();
    if (n < 3)
        return features;
    const double floor = trace.config.noise_floor_db;
    const int w = det.baseline_window_bins;

    for (std::size_t i = 0; i < n; ++i) {
        // Treat the region beyond the last bin as noise floor so the end
        // reflection still counts as a local maximum.
        const double left = i > 0 ? p[i - 1] : floor;
        const double right = i + 1 < n ? p[i + 1] : floor;
        if (!(p[i] > left && p[i] >= right))
            continue;
        if (p[i] <= floor + det.floor_margin_db)
            continue;

        // Local baseline estimated on each side separately; taking the max
        // keeps obscuring-window edges from masquerading as spikes.
        std::vector<double> side;
        for (int k = 2; k < 2 + w; ++k) {
            const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - k;
            side.push_back(j >= 0 ? p[static_cast<std::size_t>(j)] : floor);
        }
        const double base_left = median_of(std::move(side));
        side.clear();
        for (int k = 2; k < 2 + w; ++k) {
            const std::size_t j = i + static_cast<std::size_t>(k);
            side.push_back(j < n ? p[j] : floor);
        }
        const double base_right = median_of(std::move(side));
        const double baseline = std::max(base_left, base_right);

        const double prominence = p[i] - baseline;
        if (prominence < det.prominence_db)
            continue;

        // Fibre end: nothing but noise floor after the spike.
        bool floor_after = true;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (p[j] > floor + det.floor_margin_db) {
                floor_after = false;
                break;
            }
        }
        features.push_back({trace.bin_center_m[i],
                            floor_after ? FeatureKind::FibreEnd : FeatureKind::Connector,
                            prominence});
    }
    return features;
}

double leaked_length_m(SimTime response_time, const FibrePath& path) {
    if (response_time < SimTime())
        throw OutOfRange("response time must be >= 0");
    return distance_for_round_trip_unclamped(path, response_time);
}

void write_trace_csv(const OtdrTrace& trace, std::ostream& out) {
    out << "distance_m,power_db\n";
    char row[80];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(row, sizeof(row), "%.6f,%.6f\n", trace.bin_center_m[i],
                      trace.power_db[i]);
        out << row;
    }
}

} // namespace fsim
