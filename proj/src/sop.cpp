#include "fsim/sop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <ostream>

namespace fsim {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (n == 0.0)
        return {1.0, 0.0, 0.0};
    return {x / n, y / n, z / n};
}

double StokesVector::norm() const { return vec().norm(); }

StokesVector StokesVector::normalized() const {
    const Vec3 v = vec().normalized();
    return {v.x, v.y, v.z};
}

Rotation3 Rotation3::axis_angle(const Vec3& axis, double angle_rad) {
    const Vec3 a = axis.normalized();
    const double half = angle_rad / 2.0;
    const double s = std::sin(half);
    return Rotation3(std::cos(half), a.x * s, a.y * s, a.z * s);
}

Rotation3 Rotation3::random_axis(double angle_rad, RngStream& rng) {
    Vec3 a{rng.normal(), rng.normal(), rng.normal()};
    while (a.norm() < 1e-12)
        a = {rng.normal(), rng.normal(), rng.normal()};
    return axis_angle(a, angle_rad);
}

double Rotation3::angle() const {
    const double c = std::clamp(w_, -1.0, 1.0);
    return 2.0 * std::acos(std::abs(c));
}

Vec3 Rotation3::axis() const {
    const Vec3 v{x_, y_, z_};
    if (v.norm() < 1e-15)
        return {1.0, 0.0, 0.0};
    return v.normalized();
}

Vec3 Rotation3::apply(const Vec3& v) const {
    // v' = v + 2*q x (q x v + w*v), q = (x, y, z)
    const Vec3 q{x_, y_, z_};
    const Vec3 t = q.cross(v) * 2.0;
    return v + t * w_ + q.cross(t);
}

StokesVector Rotation3::apply(const StokesVector& s) const {
    const Vec3 v = apply(s.vec());
    return {v.x, v.y, v.z};
}

Rotation3 Rotation3::operator*(const Rotation3& o) const {
    return Rotation3(w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
                     w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
                     w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
                     w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
}

Rotation3 Rotation3::normalized() const {
    const double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
    if (n == 0.0)
        return {};
    return Rotation3(w_ / n, x_ / n, y_ / n, z_ / n);
}

namespace {

Vec3 random_unit(RngStream& rng) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    while (v.norm() < 1e-12)
        v = {rng.normal(), rng.normal(), rng.normal()};
    return v.normalized();
}

Vec3 walk_axis(const Vec3& axis, RngStream& rng) {
    const Vec3 step{rng.normal(), rng.normal(), rng.normal()};
    return (axis + step * 0.3).normalized();
}

} // namespace

std::vector<Rotation3> event_rotation_sequence(const DisturbanceProfile& profile,
                                               SimTime dt, std::size_t n_samples,
                                               SimTime t0, RngStream& rng) {
    if (!(dt > SimTime()))
        throw ConfigInvalid("event sequence: dt must be > 0");
    if (!(profile.band_lo_hz > 0.0) || profile.band_lo_hz >= profile.band_hi_hz)
        throw ConfigInvalid("event sequence: need 0 < f_lo < f_hi");
    std::vector<Rotation3> seq(n_samples);
    if (profile.peak_rate_rad_s <= 0.0 || n_samples == 0)
        return seq;

    // Band-limited angular-rate envelope: a small sum of sinusoids with
    // frequencies confined to [f_lo, f_hi], normalised to peak 1 over the
    // samples that land inside the event window.
    constexpr int kComponents = 8;
    std::array<double, kComponents> freq{}, phase{}, amp{};
    for (int k = 0; k < kComponents; ++k) {
        freq[k] = rng.uniform(profile.band_lo_hz, profile.band_hi_hz);
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        amp[k] = rng.uniform(0.5, 1.0);
    }
    const double dt_s = dt.seconds();

    std::vector<std::size_t> in_window;
    std::vector<double> envelope;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const SimTime t = t0 + SimTime::from_seconds(dt_s * static_cast<double>(i));
        if (t < profile.start || t > profile.end)
            continue;
        const double ts = t.seconds();
        double g = 0.0;
        for (int k = 0; k < kComponents; ++k)
            g += amp[k] * std::sin(2.0 * std::numbers::pi * freq[k] * ts + phase[k]);
        in_window.push_back(i);
        envelope.push_back(g);
    }
    if (in_window.empty())
        return seq;
    double peak = 0.0;
    for (double g : envelope)
        peak = std::max(peak, std::abs(g));
    if (peak == 0.0)
        return seq;

    Vec3 axis = random_unit(rng);
    for (std::size_t j = 0; j < in_window.size(); ++j) {
        const double angle = profile.peak_rate_rad_s * (std::abs(envelope[j]) / peak) * dt_s;
        seq[in_window[j]] = Rotation3::axis_angle(axis, angle);
        axis = walk_axis(axis, rng);
    }
    return seq;
}

std::vector<Rotation3> ambient_rotation_sequence(double rate_rad_s, SimTime dt,
                                                 std::size_t n_samples, RngStream& rng) {
    if (!(dt > SimTime()))
        throw ConfigInvalid("ambient sequence: dt must be > 0");
    std::vector<Rotation3> seq(n_samples);
    if (rate_rad_s <= 0.0)
        return seq;
    const double angle = rate_rad_s * dt.seconds();
    Vec3 axis = random_unit(rng);
    for (std::size_t i = 0; i < n_samples; ++i) {
        seq[i] = Rotation3::axis_angle(axis, angle);
        axis = walk_axis(axis, rng);
    }
    return seq;
}

std::vector<Rotation3> scrambler_rotation_sequence(const ScramblerConfig& config,
                                                   SimTime dt, std::size_t n_samples,
                                                   SimTime t0, SimTime enable_time,
                                                   RngStream& rng) {
    if (!(dt > SimTime()))
        throw ConfigInvalid("scrambler sequence: dt must be > 0");
    if (!(config.scrambling_rate_rot_s > 0.0))
        throw ConfigInvalid("scrambling rate must be > 0");
    std::vector<Rotation3> seq(n_samples);
    if (!config.enabled || n_samples == 0)
        return seq;
    const SimTime active_from = enable_time + config.activation_delay;
    const double dt_s = dt.seconds();
    const double mean_angle = 2.0 * std::numbers::pi * config.scrambling_rate_rot_s * dt_s;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const SimTime t = t0 + SimTime::from_seconds(dt_s * static_cast<double>(i));
        if (t < active_from)
            continue;
        const double angle = rng.uniform(0.0, 2.0 * mean_angle);
        seq[i] = Rotation3::random_axis(angle, rng);
    }
    return seq;
}

std::vector<Rotation3> compose_sequences(const std::vector<Rotation3>& a,
                                         const std::vector<Rotation3>& b) {
    if (a.size() != b.size())
        throw LengthMismatch("compose_sequences: lengths differ");
    std::vector<Rotation3> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] * b[i];
    return out;
}

SopTrace propagate_sop(const StokesVector& s0, const std::vector<Rotation3>& event_seq,
                       const std::vector<Rotation3>& scrambler_seq,
                       SimTime sampling_period) {
    if (event_seq.size() != scrambler_seq.size())
        throw LengthMismatch("propagate_sop: sequence lengths differ");
    SopTrace trace;
    trace.sampling_period = sampling_period;
    trace.samples.reserve(event_seq.size());
    trace.labels.assign(event_seq.size(), 0);

    Rotation3 evt_cum, scr_cum;
    for (std::size_t i = 0; i < event_seq.size(); ++i) {
        evt_cum = (event_seq[i] * evt_cum).normalized();
        scr_cum = (scrambler_seq[i] * scr_cum).normalized();
        trace.samples.push_back((scr_cum * evt_cum).apply(s0));
    }
    return trace;
}

std::vector<double> angular_rate(const SopTrace& trace) {
    if (trace.samples.size() < 2)
        throw TooShort("angular_rate: need at least 2 samples");
    const double period_s = trace.sampling_period.seconds();
    std::vector<double> rates;
    rates.reserve(trace.samples.size() - 1);
    for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i) {
        const double d = std::clamp(trace.samples[i].dot(trace.samples[i + 1]), -1.0, 1.0);
        rates.push_back(std::acos(d) / period_s);
    }
    return rates;
}

std::vector<std::pair<SimTime, SimTime>> detect_disturbance(const SopTrace& trace,
                                                            double threshold_rad_s) {
    if (!(threshold_rad_s > 0.0))
        throw ConfigInvalid("detect_disturbance: threshold must be > 0");
    std::vector<std::pair<SimTime, SimTime>> intervals;
    if (trace.samples.size() < 2)
        return intervals;
    const auto rates = angular_rate(trace);
    const double period_s = trace.sampling_period.seconds();
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t i = 0; i <= rates.size(); ++i) {
        const bool hot = i < rates.size() && rates[i] > threshold_rad_s;
        if (hot && !in_run) {
            run_start = i;
            in_run = true;
        } else if (!hot && in_run) {
            intervals.emplace_back(
                SimTime::from_seconds(period_s * static_cast<double>(run_start)),
                SimTime::from_seconds(period_s * static_cast<double>(i)));
            in_run = false;
        }
    }
    return intervals;
}

namespace {

double max_rate_score(const SopTrace& trace) {
    if (trace.samples.size() < 2)
        return 0.0;
    const auto rates = angular_rate(trace);
    return *std::max_element(rates.begin(), rates.end());
}

} // namespace

double distinguishability(const std::vector<SopTrace>& traces_with_event,
                          const std::vector<SopTrace>& traces_without_event) {
    if (traces_with_event.size() < 20 || traces_without_event.size() < 20)
        throw TooFewSamples("distinguishability: need >= 20 traces per class");

    struct Scored {
        double score;
        bool positive;
    };
    std::vector<Scored> all;
    all.reserve(traces_with_event.size() + traces_without_event.size());
    for (const auto& t : traces_with_event)
        all.push_back({max_rate_score(t), true});
    for (const auto& t : traces_without_event)
        all.push_back({max_rate_score(t), false});

    std::sort(all.begin(), all.end(),
              [](const Scored& a, const Scored& b) { return a.score < b.score; });

    // Midranks handle ties exactly, so identical classes land on 0.5.
    const std::size_t n = all.size();
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && all[j + 1].score == all[i].score)
            ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            rank[k] = mid;
        i = j + 1;
    }

    const double n1 = static_cast<double>(traces_with_event.size());
    const double n0 = static_cast<double>(traces_without_event.size());
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (all[k].positive)
            rank_sum += rank[k];
    }
    return (rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

void write_sop_csv(const SopTrace& trace, std::ostream& out) {
    out << "t_s,s1,s2,s3,event_flag\n";
    char row[128];
    const double period_s = trace.sampling_period.seconds();
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        std::snprintf(row, sizeof(row), "%.6f,%.9f,%.9f,%.9f,%d\n",
                      period_s * static_cast<double>(i), s.s1, s.s2, s.s3,
                      i < trace.labels.size() ? static_cast<int>(trace.labels[i]) : 0);
        out << row;
    }
}

} // namespace fsim
