#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fsim/engine.hpp"
#include "fsim/errors.hpp"
#include "fsim/fibre_plant.hpp"
#include "fsim/fscd.hpp"
#include "fsim/layer.hpp"
#include "fsim/time.hpp"

namespace fsim {

inline constexpr std::uint8_t kProtocolVersion = 1;

enum class MsgType : std::uint8_t {
    PolicySet = 1,
    PolicyAck = 2,
    AlertPulse = 3,
    StateReport = 4,
    StateCmd = 5,
};

std::string to_string(MsgType t);

// Per-sensing-path authorization record distributed by the manager.
struct Policy {
    std::string path_id;
    bool sops_allowed = true;
    bool bls_allowed = true;
    std::vector<ObscuringWindow> obscured_sections; // sorted, non-overlapping
    std::vector<std::string> allowed_interrogators; // sorted, unique

    void validate() const; // throws ValidationError
};

// Fixed 16-byte header. All multi-byte fields big-endian; the timestamp
// carries only the low 32 bits of the picosecond clock.
struct MsgHeader {
    std::uint8_t version = kProtocolVersion;
    MsgType type = MsgType::PolicySet;
    Layer src_layer = Layer::Msm;
    std::uint32_t dst_id = 0;
    std::uint32_t seq = 0;
    std::uint32_t timestamp_ps_low = 0;

    bool operator==(const MsgHeader&) const = default;
};

struct PolicySetBody {
    std::uint32_t path_id = 0;
    bool sops_allowed = true;
    bool bls_allowed = true;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> windows; // (delay_ps, duration_ps)
    std::vector<std::string> interrogators;                       // sorted, unique

    bool operator==(const PolicySetBody&) const = default;
};

struct PolicyAckBody {
    std::uint32_t acked_seq = 0;
    std::uint8_t status = 0; // 0 applied, 1 rejected

    bool operator==(const PolicyAckBody&) const = default;
};

struct AlertPulseBody {
    std::uint32_t device_id = 0;
    std::int32_t power_centi_dbm = 0;
    std::uint64_t detect_time_ps = 0;

    bool operator==(const AlertPulseBody&) const = default;
};

struct StateReportBody {
    std::uint32_t device_id = 0;
    std::uint8_t state = 0; // FscdState

    bool operator==(const StateReportBody&) const = default;
};

enum class StateCmdMode : std::uint8_t { Explicit = 0, DisableBls = 1 };

struct StateCmdBody {
    StateCmdMode mode = StateCmdMode::DisableBls;
    std::uint8_t state = 0;        // FscdState; must be 0 for DisableBls
    Layer origin = Layer::Src;     // layer that initiated the command

    bool operator==(const StateCmdBody&) const = default;
};

using MsgBody =
    std::variant<PolicySetBody, PolicyAckBody, AlertPulseBody, StateReportBody, StateCmdBody>;

struct ControlMessage {
    MsgHeader header;
    MsgBody body;

    bool operator==(const ControlMessage&) const = default;
};

// Bit-exact codec. decode throws MalformedFrame on anything encode cannot
// produce: bad version, unknown type, truncation, trailing bytes, or
// non-canonical body content.
std::vector<std::uint8_t> encode_message(const ControlMessage& msg);
ControlMessage decode_message(std::span<const std::uint8_t> bytes);

// Delay-only control link; the sensing control plane is hard-sliced from the
// sensed fibre paths, so these are the only edges messages may traverse.
struct ControlLink {
    std::string a;
    std::string b;
    double fibre_length_m = 2.0;
    double group_index = kDefaultGroupIndex;
    // Overrides the receiving node's processing delay when set.
    std::optional<SimTime> processing_delay;

    SimTime propagation_delay() const;
};

struct LayerNode {
    Layer layer = Layer::Agent;
    std::string id;
    std::vector<std::string> children;
    SimTime processing_delay;
};

struct LatencyRecord {
    Layer layer;
    SimTime trigger;
    SimTime completed;

    SimTime response() const { return completed - trigger; }
};

// Merge per-device logs into one stream ordered by (time, device, kind).
std::vector<FscdActionRecord> merge_device_logs(const std::vector<const FscdDevice*>& devices);

// (last completed actuation commanded by `layer`) - (trigger detection time).
// Throws NoAlertInLog when the log holds no alert or no actuation for the
// layer.
SimTime measure_response_time(const std::vector<FscdActionRecord>& log, Layer layer);

std::vector<LatencyRecord> latency_table(const std::vector<FscdActionRecord>& log);

// CSV export: `layer,trigger_ps,completed_ps,response_ps`.
void write_latency_csv(const std::vector<LatencyRecord>& rows, std::ostream& out);

// Three-layer control plane: one manager (MSM), one controller per sensing
// region (SRC), one agent per FSCD. Policies cascade down, alerts propagate
// up, and every hop pays link propagation plus receiver processing.
class ControlPlane {
public:
    explicit ControlPlane(Engine& engine) : engine_(&engine) {}

    void add_node(LayerNode node);
    void add_link(ControlLink link);
    void attach_device(FscdDevice* device, const std::string& path_id);

    // Assigns wire ids and checks the topology: exactly one MSM, agents in
    // exactly one region, links only between adjacent layers.
    void finalize();

    // POLICY_SET cascade MSM -> SRC -> agents; agents apply the four-state
    // truth table and acknowledge. Throws UnknownPath / UnreachableAgent.
    void submit_policy(const Policy& policy, SimTime t);

    // Entry point for raw frames (also the fuzz/duplication test hook).
    void handle_frame(const std::string& receiver_id, const std::string& sender_id,
                      std::span<const std::uint8_t> bytes);

    bool all_policies_acked() const;
    const std::vector<std::string>& dropped_frames() const { return drops_; }
    std::optional<SimTime> first_alert_time() const { return first_alert_; }
    std::uint32_t node_wire_id(const std::string& id) const;
    std::uint32_t path_wire_id(const std::string& id) const;

    std::vector<const FscdDevice*> devices() const;

private:
    struct PendingPolicy {
        std::uint32_t msm_seq = 0;
        std::set<std::string> awaiting; // agent ids yet to ack
    };

    const LayerNode& node_at(const std::string& id) const;
    const ControlLink* find_link(const std::string& x, const std::string& y) const;
    SimTime hop_delay(const std::string& from, const std::string& to) const;
    void send(const std::string& from, const std::string& to, MsgType type, MsgBody body,
              SimTime t);
    void dispatch(const std::string& receiver_id, const std::string& sender_id,
                  const ControlMessage& msg);
    void on_device_alert(const FscdDevice& device, double power_dbm, SimTime t);

    Engine* engine_;
    bool finalized_ = false;
    std::map<std::string, LayerNode> nodes_;
    std::map<std::pair<std::string, std::string>, ControlLink> links_;
    std::map<std::string, FscdDevice*> devices_;
    std::map<std::string, std::string> device_path_;
    std::map<std::string, std::vector<std::string>> path_devices_;
    std::map<std::string, std::string> parent_;
    std::string msm_id_;
    std::map<std::string, std::uint32_t> node_num_;
    std::map<std::string, std::uint32_t> path_num_;
    std::map<std::uint32_t, std::string> path_by_num_;
    std::map<std::pair<std::string, std::string>, std::uint32_t> next_seq_;
    std::map<std::pair<std::string, std::string>, std::uint32_t> last_seq_;
    // SRC-side policy bookkeeping: (src, seq of the per-agent POLICY_SET) ->
    // pending-policy slot.
    std::map<std::string, std::vector<PendingPolicy>> pending_policies_;
    std::map<std::pair<std::string, std::uint32_t>, std::size_t> agent_seq_slot_;
    std::map<std::string, Policy> applied_policies_;
    std::vector<std::string> drops_;
    std::optional<SimTime> first_alert_;
    std::uint32_t acked_policies_ = 0;
    std::uint32_t expected_acks_ = 0;
};

} // namespace fsim
