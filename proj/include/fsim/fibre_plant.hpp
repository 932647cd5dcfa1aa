#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsim/errors.hpp"
#include "fsim/time.hpp"

namespace fsim {

inline constexpr double kSpeedOfLightMps = 2.99792458e8;

// Standard SMF constants at 1550 nm; scenarios may override everything.
inline constexpr double kDefaultGroupIndex = 1.468;
inline constexpr double kDefaultAttenuationDbPerKm = 0.2;
inline constexpr double kDefaultConnectorInsertionDb = 0.3;
inline constexpr double kDefaultConnectorReturnLossDb = 45.0;
inline constexpr double kDefaultEndReturnLossDb = 14.7; // open PC connector

struct FibreSegment {
    double length_m = 0.0;
    double attenuation_db_per_km = kDefaultAttenuationDbPerKm;
    double group_index = kDefaultGroupIndex;
};

struct ConnectorEvent {
    double position_m = 0.0;
    double insertion_loss_db = kDefaultConnectorInsertionDb;
    double return_loss_db = kDefaultConnectorReturnLossDb;
};

// One sensing path: ordered spans plus discrete reflective events. Cores of a
// multi-core link are separate FibrePath values that happen to share geometry;
// there is no cross-core coupling in this model.
struct FibrePath {
    std::vector<FibreSegment> segments;
    std::vector<ConnectorEvent> connectors;
    double end_return_loss_db = kDefaultEndReturnLossDb;
    std::optional<int> core_id;

    double total_length_m() const;

    // Throws ValidationError on broken invariants (empty segments,
    // non-positive lengths, connector order/positions, group index range).
    void validate() const;

    // Same plant seen from the far end; used when interrogating from the
    // opposite side.
    FibrePath reversed() const;
};

struct SensingRegion {
    std::string region_id;
    std::vector<std::string> fscd_ids;
    // Position interval this region spans on each path that traverses it.
    std::map<std::string, std::pair<double, double>> path_intervals_m;
};

struct ReflectiveEvent {
    double position_m = 0.0;
    double return_loss_db = 0.0;
};

// One-way propagation time from the launch end to `distance_m`, summed per
// segment and rounded to the nearest tick. Throws OutOfRange outside [0, L].
SimTime one_way_delay(const FibrePath& path, double distance_m);

// OTDR time of flight: 2*n*z/c over the traversed segments.
SimTime round_trip_delay(const FibrePath& path, double distance_m);

// Cumulative loss in dB at `distance_m`: alpha*z over segments plus insertion
// losses of connectors strictly before the point. Throws OutOfRange.
double one_way_attenuation(const FibrePath& path, double distance_m);

// Connectors with finite return loss plus the end-of-fibre reflection,
// sorted by position.
std::vector<ReflectiveEvent> reflective_events(const FibrePath& path);

// Inverse of round_trip_delay, clamped to [0, total length].
double distance_for_round_trip(const FibrePath& path, SimTime round_trip);

// Same inverse, but extrapolated past the fibre end with the last segment's
// group velocity (used for leakage-length bookkeeping).
double distance_for_round_trip_unclamped(const FibrePath& path, SimTime round_trip);

} // namespace fsim
