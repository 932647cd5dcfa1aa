#include "fsim/fibre_plant.hpp"

#include <algorithm>
#include <cmath>

namespace fsim {

double FibrePath::total_length_m() const {
    double total = 0.0;
    for (const auto& seg : segments)
        total += seg.length_m;
    return total;
}

void FibrePath::validate() const {
    if (segments.empty())
        throw ValidationError("fibre path has no segments");
    for (const auto& seg : segments) {
        if (!(seg.length_m > 0.0))
            throw ValidationError("fibre segment length must be > 0");
        if (seg.attenuation_db_per_km < 0.0)
            throw ValidationError("fibre segment attenuation must be >= 0");
        if (!(seg.group_index > 1.0 && seg.group_index < 2.0))
            throw ValidationError("fibre segment group index must be in (1, 2)");
    }
    const double length = total_length_m();
    double prev = -1.0;
    for (const auto& conn : connectors) {
        if (conn.position_m < 0.0 || conn.position_m > length)
            throw ValidationError("connector position outside path");
        if (conn.position_m <= prev)
            throw ValidationError("connector positions must be strictly increasing");
        if (conn.insertion_loss_db < 0.0)
            throw ValidationError("connector insertion loss must be >= 0");
        if (!(conn.return_loss_db > 0.0))
            throw ValidationError("connector return loss must be > 0");
        prev = conn.position_m;
    }
}

FibrePath FibrePath::reversed() const {
    FibrePath out;
    out.end_return_loss_db = end_return_loss_db;
    out.core_id = core_id;
    out.segments.assign(segments.rbegin(), segments.rend());
    const double length = total_length_m();
    out.connectors.reserve(connectors.size());
    for (auto it = connectors.rbegin(); it != connectors.rend(); ++it) {
        ConnectorEvent c = *it;
        c.position_m = length - c.position_m;
        out.connectors.push_back(c);
    }
    return out;
}

namespace {

double one_way_delay_seconds(const FibrePath& path, double distance_m) {
    double remaining = distance_m;
    double seconds = 0.0;
    for (const auto& seg : path.segments) {
        const double d = std::min(remaining, seg.length_m);
        seconds += d * seg.group_index / kSpeedOfLightMps;
        remaining -= d;
        if (remaining <= 0.0)
            break;
    }
    return seconds;
}

void check_distance(const FibrePath& path, double distance_m) {
    if (!(distance_m >= 0.0) || distance_m > path.total_length_m() * (1.0 + 1e-12))
        throw OutOfRange("distance " + std::to_string(distance_m) +
                         " m outside path of length " +
                         std::to_string(path.total_length_m()) + " m");
}

} // namespace

SimTime one_way_delay(const FibrePath& path, double distance_m) {
    check_distance(path, distance_m);
    return SimTime::from_seconds(one_way_delay_seconds(path, distance_m));
}

SimTime round_trip_delay(const FibrePath& path, double distance_m) {
    check_distance(path, distance_m);
    return SimTime::from_seconds(2.0 * one_way_delay_seconds(path, distance_m));
}

double one_way_attenuation(const FibrePath& path, double distance_m) {
    check_distance(path, distance_m);
    double remaining = distance_m;
    double loss_db = 0.0;
    for (const auto& seg : path.segments) {
        const double d = std::min(remaining, seg.length_m);
        loss_db += d * seg.attenuation_db_per_km / 1000.0;
        remaining -= d;
        if (remaining <= 0.0)
            break;
    }
    for (const auto& conn : path.connectors) {
        if (conn.position_m < distance_m)
            loss_db += conn.insertion_loss_db;
    }
    return loss_db;
}

std::vector<ReflectiveEvent> reflective_events(const FibrePath& path) {
    std::vector<ReflectiveEvent> events;
    for (const auto& conn : path.connectors) {
        if (std::isfinite(conn.return_loss_db))
            events.push_back({conn.position_m, conn.return_loss_db});
    }
    if (std::isfinite(path.end_return_loss_db))
        events.push_back({path.total_length_m(), path.end_return_loss_db});
    std::sort(events.begin(), events.end(),
              [](const ReflectiveEvent& a, const ReflectiveEvent& b) {
                  return a.position_m < b.position_m;
              });
    return events;
}

namespace {

double invert_round_trip(const FibrePath& path, SimTime round_trip, bool clamp) {
    if (round_trip < SimTime())
        throw OutOfRange("round trip time must be >= 0");
    const double target_one_way = round_trip.seconds() / 2.0;
    double seconds = 0.0;
    double position = 0.0;
    for (const auto& seg : path.segments) {
        const double seg_seconds = seg.length_m * seg.group_index / kSpeedOfLightMps;
        if (seconds + seg_seconds >= target_one_way) {
            return position +
                   (target_one_way - seconds) * kSpeedOfLightMps / seg.group_index;
        }
        seconds += seg_seconds;
        position += seg.length_m;
    }
    if (clamp)
        return path.total_length_m();
    const auto& last = path.segments.back();
    return position + (target_one_way - seconds) * kSpeedOfLightMps / last.group_index;
}

} // namespace

double distance_for_round_trip(const FibrePath& path, SimTime round_trip) {
    return invert_round_trip(path, round_trip, /*clamp=*/true);
}

double distance_for_round_trip_unclamped(const FibrePath& path, SimTime round_trip) {
    return invert_round_trip(path, round_trip, /*clamp=*/false);
}

} // namespace fsim
