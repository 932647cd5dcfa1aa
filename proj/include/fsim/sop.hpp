#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fsim/errors.hpp"
#include "fsim/rng.hpp"
#include "fsim/time.hpp"

namespace fsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const;
    Vec3 normalized() const;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

// Point on the Poincaré sphere.
struct StokesVector {
    double s1 = 1.0, s2 = 0.0, s3 = 0.0;

    Vec3 vec() const { return {s1, s2, s3}; }
    double dot(const StokesVector& o) const { return s1 * o.s1 + s2 * o.s2 + s3 * o.s3; }
    double norm() const;
    StokesVector normalized() const;
};

// Rotation of Stokes space, stored as a unit quaternion. Factories expose the
// axis-angle view; composition associates exactly like the underlying group.
class Rotation3 {
public:
    Rotation3() = default; // identity

    static Rotation3 axis_angle(const Vec3& axis, double angle_rad);
    static Rotation3 identity() { return {}; }
    // Uniformly random axis and the given angle.
    static Rotation3 random_axis(double angle_rad, RngStream& rng);

    double angle() const;
    Vec3 axis() const;
    bool is_identity() const { return w_ == 1.0 && x_ == 0.0 && y_ == 0.0 && z_ == 0.0; }

    StokesVector apply(const StokesVector& s) const;
    Vec3 apply(const Vec3& v) const;

    // (a * b).apply(v) == a.apply(b.apply(v))
    Rotation3 operator*(const Rotation3& o) const;
    Rotation3 normalized() const;

private:
    Rotation3(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}
    double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

struct SopTrace {
    SimTime sampling_period = SimTime::ms(5);
    std::vector<StokesVector> samples;
    std::vector<std::uint8_t> labels; // ground-truth event flag per sample
};

// Mechanical disturbance acting on a fibre span: a band-limited angular-rate
// process active inside [start, end].
struct DisturbanceProfile {
    SimTime start;
    SimTime end;
    double band_lo_hz = 1.0;
    double band_hi_hz = 100.0;
    double peak_rate_rad_s = 50.0;
};

struct ScramblerConfig {
    double scrambling_rate_rot_s = 10000.0;
    SimTime activation_delay = SimTime::us(400);
    bool enabled = true;
};

// Per-step incremental rotations for the disturbance, sampled every dt
// starting at t0. Identity outside [start, end]; the per-step rotation angle
// never exceeds peak_rate * dt.
std::vector<Rotation3> event_rotation_sequence(const DisturbanceProfile& profile,
                                               SimTime dt, std::size_t n_samples,
                                               SimTime t0, RngStream& rng);

// Slow background drift: constant-rate axis random walk (identity when
// rate <= 0).
std::vector<Rotation3> ambient_rotation_sequence(double rate_rad_s, SimTime dt,
                                                 std::size_t n_samples, RngStream& rng);

// Scrambler increments: uniformly random axis, per-step angle drawn with mean
// 2*pi*rate*dt. Identity until activation_delay has elapsed after enable_time
// (and everywhere when disabled).
std::vector<Rotation3> scrambler_rotation_sequence(const ScramblerConfig& config,
                                                   SimTime dt, std::size_t n_samples,
                                                   SimTime t0, SimTime enable_time,
                                                   RngStream& rng);

// Per-step composition a[i] * b[i]; throws LengthMismatch.
std::vector<Rotation3> compose_sequences(const std::vector<Rotation3>& a,
                                         const std::vector<Rotation3>& b);

// Accumulates the incremental sequences and applies them to s0:
// sample[i] = (scr[0..i]) * (evt[0..i]) * s0. Throws LengthMismatch.
SopTrace propagate_sop(const StokesVector& s0, const std::vector<Rotation3>& event_seq,
                       const std::vector<Rotation3>& scrambler_seq,
                       SimTime sampling_period);

// Per-step arccos(clamped dot)/period in rad/s; throws TooShort for < 2
// samples.
std::vector<double> angular_rate(const SopTrace& trace);

// Maximal runs of steps whose angular rate exceeds the threshold, as
// [start, end) times relative to the trace start.
std::vector<std::pair<SimTime, SimTime>> detect_disturbance(const SopTrace& trace,
                                                            double threshold_rad_s);

// AUC of the "max angular rate over trace" classifier, computed with midrank
// statistics. Requires >= 20 traces per class (TooFewSamples otherwise).
double distinguishability(const std::vector<SopTrace>& traces_with_event,
                          const std::vector<SopTrace>& traces_without_event);

// CSV export: `t_s,s1,s2,s3,event_flag`.
void write_sop_csv(const SopTrace& trace, std::ostream& out);

} // namespace fsim
