#include "fsim/control_plane.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fsim {

std::string to_string(MsgType t) {
    switch (t) {
    case MsgType::PolicySet: return "policy_set";
    case MsgType::PolicyAck: return "policy_ack";
    case MsgType::AlertPulse: return "alert_pulse";
    case MsgType::StateReport: return "state_report";
    case MsgType::StateCmd: return "state_cmd";
    }
    return "?";
}

void Policy::validate() const {
    if (path_id.empty())
        throw ValidationError("policy: empty path id");
    SimTime prev_end;
    bool first = true;
    for (const auto& w : obscured_sections) {
        if (w.delay < SimTime() || !(w.duration > SimTime()))
            throw ValidationError("policy: obscuring window must have delay >= 0, duration > 0");
        if (!first && w.delay < prev_end)
            throw ValidationError("policy: obscuring windows overlap or are unsorted");
        prev_end = w.delay + w.duration;
        first = false;
    }
    for (std::size_t i = 1; i < allowed_interrogators.size(); ++i) {
        if (!(allowed_interrogators[i - 1] < allowed_interrogators[i]))
            throw ValidationError("policy: interrogator list must be sorted and unique");
    }
}

namespace {

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
    put_u32(out, static_cast<std::uint32_t>(v));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v = (v << 8) | bytes_[pos_++];
        return v;
    }
    std::uint64_t u64() {
        const std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void expect_end() const {
        if (pos_ != bytes_.size())
            throw MalformedFrame("trailing bytes after message body");
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size())
            throw MalformedFrame("truncated frame");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void check_policy_body(const PolicySetBody& b, const char* side) {
    const std::string who(side);
    if (b.windows.size() > 255 || b.interrogators.size() > 255)
        throw MalformedFrame(who + ": too many policy entries");
    std::uint64_t prev_end = 0;
    bool first = true;
    for (const auto& [delay, duration] : b.windows) {
        if (duration == 0)
            throw MalformedFrame(who + ": zero-duration obscuring window");
        if (!first && delay < prev_end)
            throw MalformedFrame(who + ": unsorted or overlapping obscuring windows");
        prev_end = delay + duration;
        first = false;
    }
    for (std::size_t i = 0; i < b.interrogators.size(); ++i) {
        if (b.interrogators[i].size() > 255)
            throw MalformedFrame(who + ": interrogator id too long");
        if (i > 0 && !(b.interrogators[i - 1] < b.interrogators[i]))
            throw MalformedFrame(who + ": interrogator list not sorted/unique");
    }
}

} // namespace

std::vector<std::uint8_t> encode_message(const ControlMessage& msg) {
    const auto& h = msg.header;
    if (h.version != kProtocolVersion)
        throw MalformedFrame("encode: bad protocol version");
    const std::uint8_t type = static_cast<std::uint8_t>(h.type);
    if (type < 1 || type > 5)
        throw MalformedFrame("encode: unknown message type");
    if (static_cast<std::uint8_t>(h.src_layer) > 2)
        throw MalformedFrame("encode: bad source layer");
    if (static_cast<std::size_t>(type - 1) != msg.body.index())
        throw MalformedFrame("encode: body does not match header type");

    std::vector<std::uint8_t> out;
    put_u8(out, h.version);
    put_u8(out, type);
    put_u8(out, static_cast<std::uint8_t>(h.src_layer));
    put_u8(out, 0); // reserved
    put_u32(out, h.dst_id);
    put_u32(out, h.seq);
    put_u32(out, h.timestamp_ps_low);

    switch (h.type) {
    case MsgType::PolicySet: {
        const auto& b = std::get<PolicySetBody>(msg.body);
        check_policy_body(b, "encode");
        put_u32(out, b.path_id);
        put_u8(out, static_cast<std::uint8_t>((b.sops_allowed ? 1 : 0) |
                                              (b.bls_allowed ? 2 : 0)));
        put_u8(out, static_cast<std::uint8_t>(b.windows.size()));
        for (const auto& [delay, duration] : b.windows) {
            put_u64(out, delay);
            put_u64(out, duration);
        }
        put_u8(out, static_cast<std::uint8_t>(b.interrogators.size()));
        for (const auto& id : b.interrogators) {
            put_u8(out, static_cast<std::uint8_t>(id.size()));
            out.insert(out.end(), id.begin(), id.end());
        }
        break;
    }
    case MsgType::PolicyAck: {
        const auto& b = std::get<PolicyAckBody>(msg.body);
        if (b.status > 1)
            throw MalformedFrame("encode: bad ack status");
        put_u32(out, b.acked_seq);
        put_u8(out, b.status);
        break;
    }
    case MsgType::AlertPulse: {
        const auto& b = std::get<AlertPulseBody>(msg.body);
        put_u32(out, b.device_id);
        put_u32(out, static_cast<std::uint32_t>(b.power_centi_dbm));
        put_u64(out, b.detect_time_ps);
        break;
    }
    case MsgType::StateReport: {
        const auto& b = std::get<StateReportBody>(msg.body);
        if (b.state > 3)
            throw MalformedFrame("encode: bad device state");
        put_u32(out, b.device_id);
        put_u8(out, b.state);
        break;
    }
    case MsgType::StateCmd: {
        const auto& b = std::get<StateCmdBody>(msg.body);
        if (static_cast<std::uint8_t>(b.mode) > 1 || b.state > 3 ||
            static_cast<std::uint8_t>(b.origin) > 2)
            throw MalformedFrame("encode: bad state command");
        if (b.mode == StateCmdMode::DisableBls && b.state != 0)
            throw MalformedFrame("encode: disable-bls command must carry state 0");
        put_u8(out, static_cast<std::uint8_t>(b.mode));
        put_u8(out, b.state);
        put_u8(out, static_cast<std::uint8_t>(b.origin));
        break;
    }
    }
    return out;
}

ControlMessage decode_message(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    ControlMessage msg;
    msg.header.version = r.u8();
    if (msg.header.version != kProtocolVersion)
        throw MalformedFrame("decode: bad protocol version");
    const std::uint8_t type = r.u8();
    if (type < 1 || type > 5)
        throw MalformedFrame("decode: unknown message type");
    msg.header.type = static_cast<MsgType>(type);
    const std::uint8_t layer = r.u8();
    if (layer > 2)
        throw MalformedFrame("decode: bad source layer");
    msg.header.src_layer = static_cast<Layer>(layer);
    if (r.u8() != 0)
        throw MalformedFrame("decode: reserved byte must be 0");
    msg.header.dst_id = r.u32();
    msg.header.seq = r.u32();
    msg.header.timestamp_ps_low = r.u32();

    switch (msg.header.type) {
    case MsgType::PolicySet: {
        PolicySetBody b;
        b.path_id = r.u32();
        const std::uint8_t flags = r.u8();
        if (flags > 3)
            throw MalformedFrame("decode: unknown policy flags");
        b.sops_allowed = (flags & 1) != 0;
        b.bls_allowed = (flags & 2) != 0;
        const std::uint8_t n_windows = r.u8();
        for (int i = 0; i < n_windows; ++i) {
            const std::uint64_t delay = r.u64();
            const std::uint64_t duration = r.u64();
            b.windows.emplace_back(delay, duration);
        }
        const std::uint8_t n_ids = r.u8();
        for (int i = 0; i < n_ids; ++i) {
            const std::uint8_t len = r.u8();
            b.interrogators.push_back(r.str(len));
        }
        check_policy_body(b, "decode");
        msg.body = std::move(b);
        break;
    }
    case MsgType::PolicyAck: {
        PolicyAckBody b;
        b.acked_seq = r.u32();
        b.status = r.u8();
        if (b.status > 1)
            throw MalformedFrame("decode: bad ack status");
        msg.body = b;
        break;
    }
    case MsgType::AlertPulse: {
        AlertPulseBody b;
        b.device_id = r.u32();
        b.power_centi_dbm = static_cast<std::int32_t>(r.u32());
        b.detect_time_ps = r.u64();
        msg.body = b;
        break;
    }
    case MsgType::StateReport: {
        StateReportBody b;
        b.device_id = r.u32();
        b.state = r.u8();
        if (b.state > 3)
            throw MalformedFrame("decode: bad device state");
        msg.body = b;
        break;
    }
    case MsgType::StateCmd: {
        StateCmdBody b;
        const std::uint8_t mode = r.u8();
        if (mode > 1)
            throw MalformedFrame("decode: bad state command mode");
        b.mode = static_cast<StateCmdMode>(mode);
        b.state = r.u8();
        if (b.state > 3)
            throw MalformedFrame("decode: bad command state");
        if (b.mode == StateCmdMode::DisableBls && b.state != 0)
            throw MalformedFrame("decode: disable-bls command must carry state 0");
        const std::uint8_t origin = r.u8();
        if (origin > 2)
            throw MalformedFrame("decode: bad command origin");
        b.origin = static_cast<Layer>(origin);
        msg.body = b;
        break;
    }
    }
    r.expect_end();
    return msg;
}

SimTime ControlLink::propagation_delay() const {
    return SimTime::from_seconds(fibre_length_m * group_index / kSpeedOfLightMps);
}

std::vector<FscdActionRecord> merge_device_logs(
    const std::vector<const FscdDevice*>& devices) {
    std::vector<FscdActionRecord> merged;
    for (const auto* dev : devices)
        merged.insert(merged.end(), dev->log().begin(), dev->log().end());
    std::stable_sort(merged.begin(), merged.end(),
                     [](const FscdActionRecord& a, const FscdActionRecord& b) {
                         if (a.t != b.t)
                             return a.t < b.t;
                         if (a.device_id != b.device_id)
                             return a.device_id < b.device_id;
                         return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                     });
    return merged;
}

SimTime measure_response_time(const std::vector<FscdActionRecord>& log, Layer layer) {
    std::optional<SimTime> trigger;
    for (const auto& rec : log) {
        if (rec.kind == FscdAction::AlertSent) {
            trigger = rec.t;
            break;
        }
    }
    if (!trigger)
        throw NoAlertInLog("no alert in action log");
    std::optional<SimTime> last;
    for (const auto& rec : log) {
        const bool actuation =
            rec.kind == FscdAction::GateSettled || rec.kind == FscdAction::ScramblerActive;
        if (actuation && rec.origin == layer && rec.t >= *trigger) {
            if (!last || rec.t > *last)
                last = rec.t;
        }
    }
    if (!last)
        throw NoAlertInLog("no actuation commanded by layer " + to_string(layer));
    return *last - *trigger;
}

std::vector<LatencyRecord> latency_table(const std::vector<FscdActionRecord>& log) {
    std::vector<LatencyRecord> rows;
    std::optional<SimTime> trigger;
    for (const auto& rec : log) {
        if (rec.kind == FscdAction::AlertSent) {
            trigger = rec.t;
            break;
        }
    }
    if (!trigger)
        return rows;
    for (Layer layer : {Layer::Agent, Layer::Src, Layer::Msm}) {
        try {
            const SimTime response = measure_response_time(log, layer);
            rows.push_back({layer, *trigger, *trigger + response});
        } catch (const NoAlertInLog&) {
        }
    }
    return rows;
}

void write_latency_csv(const std::vector<LatencyRecord>& rows, std::ostream& out) {
    out << "layer,trigger_ps,completed_ps,response_ps\n";
    for (const auto& row : rows) {
        out << to_string(row.layer) << ',' << row.trigger.ticks() << ','
            << row.completed.ticks() << ',' << row.response().ticks() << '\n';
    }
}

void ControlPlane::add_node(LayerNode node) {
    if (nodes_.count(node.id))
        throw ValidationError("duplicate control node id: " + node.id);
    nodes_[node.id] = std::move(node);
}

void ControlPlane::add_link(ControlLink link) {
    if (link.fibre_length_m < 0.0)
        throw ValidationError("control link length must be >= 0");
    auto key = std::minmax(link.a, link.b);
    links_[{key.first, key.second}] = std::move(link);
}

void ControlPlane::attach_device(FscdDevice* device, const std::string& path_id) {
    devices_[device->id()] = device;
    device_path_[device->id()] = path_id;
    path_devices_[path_id].push_back(device->id());
    device->on_alert = [this](const FscdDevice& dev, double power_dbm, SimTime t) {
        on_device_alert(dev, power_dbm, t);
    };
}

void ControlPlane::finalize() {
    // Hard slicing is structural: control traffic can only ever traverse
    // ControlLink edges between adjacent layers, never a sensed fibre path.
    std::vector<std::string> srcs;
    for (const auto& [id, node] : nodes_) {
        switch (node.layer) {
        case Layer::Msm:
            if (!msm_id_.empty())
                throw ValidationError("more than one MSM node");
            msm_id_ = id;
            break;
        case Layer::Src:
            srcs.push_back(id);
            break;
        case Layer::Agent:
            if (!node.children.empty())
                throw ValidationError("agent node cannot have children: " + id);
            if (!devices_.count(id))
                throw ValidationError("agent node has no attached device: " + id);
            break;
        }
    }
    if (msm_id_.empty())
        throw ValidationError("no MSM node defined");

    parent_.clear();
    for (const auto& src : srcs) {
        for (const auto& agent : nodes_.at(src).children) {
            auto it = nodes_.find(agent);
            if (it == nodes_.end() || it->second.layer != Layer::Agent)
                throw ValidationError("region " + src + " lists non-agent child " + agent);
            if (parent_.count(agent))
                throw ValidationError("FSCD " + agent + " belongs to more than one region");
            parent_[agent] = src;
        }
    }
    for (const auto& [id, node] : nodes_) {
        if (node.layer == Layer::Agent && !parent_.count(id))
            throw ValidationError("FSCD " + id + " belongs to no region");
    }
    const auto& msm_children = nodes_.at(msm_id_).children;
    std::set<std::string> msm_set(msm_children.begin(), msm_children.end());
    if (msm_set != std::set<std::string>(srcs.begin(), srcs.end()))
        throw ValidationError("MSM children must be exactly the region controllers");
    for (const auto& src : srcs)
        parent_[src] = msm_id_;

    for (const auto& [key, link] : links_) {
        const auto na = nodes_.find(link.a);
        const auto nb = nodes_.find(link.b);
        if (na == nodes_.end() || nb == nodes_.end())
            throw ValidationError("control link endpoint is not a control node: " + link.a +
                                  "," + link.b);
        const auto pair = std::minmax(static_cast<int>(na->second.layer),
                                      static_cast<int>(nb->second.layer));
        const bool ok = (pair.first == static_cast<int>(Layer::Src) &&
                         pair.second == static_cast<int>(Layer::Msm)) ||
                        (pair.first == static_cast<int>(Layer::Agent) &&
                         pair.second == static_cast<int>(Layer::Src));
        if (!ok)
            throw ValidationError("control link must connect adjacent layers: " + link.a +
                                  "," + link.b);
    }

    node_num_.clear();
    std::uint32_t next = 1;
    for (const auto& [id, node] : nodes_)
        node_num_[id] = next++;
    path_num_.clear();
    path_by_num_.clear();
    next = 1;
    for (auto& [path, devs] : path_devices_) {
        std::sort(devs.begin(), devs.end());
        path_num_[path] = next;
        path_by_num_[next] = path;
        ++next;
    }
    finalized_ = true;
}

const LayerNode& ControlPlane::node_at(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw ValidationError("unknown control node: " + id);
    return it->second;
}

const ControlLink* ControlPlane::find_link(const std::string& x, const std::string& y) const {
    auto key = std::minmax(x, y);
    auto it = links_.find({key.first, key.second});
    return it == links_.end() ? nullptr : &it->second;
}

SimTime ControlPlane::hop_delay(const std::string& from, const std::string& to) const {
    const ControlLink* link = find_link(from, to);
    if (!link)
        throw UnreachableAgent("no control link between " + from + " and " + to);
    const SimTime processing =
        link->processing_delay ? *link->processing_delay : node_at(to).processing_delay;
    return link->propagation_delay() + processing;
}

std::uint32_t ControlPlane::node_wire_id(const std::string& id) const {
    auto it = node_num_.find(id);
    if (it == node_num_.end())
        throw ValidationError("unknown control node: " + id);
    return it->second;
}

std::uint32_t ControlPlane::path_wire_id(const std::string& id) const {
    auto it = path_num_.find(id);
    if (it == path_num_.end())
        throw UnknownPath("unknown sensing path: " + id);
    return it->second;
}

std::vector<const FscdDevice*> ControlPlane::devices() const {
    std::vector<const FscdDevice*> out;
    for (const auto& [id, dev] : devices_)
        out.push_back(dev);
    return out;
}

void ControlPlane::send(const std::string& from, const std::string& to, MsgType type,
                        MsgBody body, SimTime t) {
    ControlMessage msg;
    msg.header.version = kProtocolVersion;
    msg.header.type = type;
    msg.header.src_layer = node_at(from).layer;
    msg.header.dst_id = node_wire_id(to);
    msg.header.seq = ++next_seq_[{from, to}];
    msg.header.timestamp_ps_low =
        static_cast<std::uint32_t>(static_cast<std::uint64_t>(t.ticks()) & 0xffffffffULL);
    msg.body = std::move(body);

    const std::vector<std::uint8_t> bytes = encode_message(msg);
    const SimTime deliver_at = t + hop_delay(from, to);
    engine_->schedule(deliver_at, "ctl/" + from + "->" + to, to_string(type),
                      [this, to, from, bytes](Engine&) { handle_frame(to, from, bytes); });
}

void ControlPlane::handle_frame(const std::string& receiver_id, const std::string& sender_id,
                                std::span<const std::uint8_t> bytes) {
    const ControlMessage msg = decode_message(bytes);
    auto& last = last_seq_[{receiver_id, sender_id}];
    if (msg.header.seq <= last) {
        drops_.push_back(receiver_id + " dropped " + to_string(msg.header.type) + " seq " +
                         std::to_string(msg.header.seq) + " from " + sender_id);
        return;
    }
    last = msg.header.seq;
    dispatch(receiver_id, sender_id, msg);
}

void ControlPlane::submit_policy(const Policy& policy, SimTime t) {
    if (!finalized_)
        throw ValidationError("control plane not finalized");
    policy.validate();
    auto it = path_devices_.find(policy.path_id);
    if (it == path_devices_.end())
        throw UnknownPath("unknown sensing path: " + policy.path_id);

    // Group target agents per region controller, checking reachability first.
    std::map<std::string, std::vector<std::string>> by_src;
    for (const auto& agent : it->second) {
        auto pit = parent_.find(agent);
        if (pit == parent_.end())
            throw UnreachableAgent("FSCD " + agent + " has no region controller");
        if (!find_link(pit->second, agent))
            throw UnreachableAgent("no control link between " + pit->second + " and " + agent);
        if (!find_link(msm_id_, pit->second))
            throw UnreachableAgent("no control link between " + msm_id_ + " and " +
                                   pit->second);
        by_src[pit->second].push_back(agent);
    }

    PolicySetBody body;
    body.path_id = path_wire_id(policy.path_id);
    body.sops_allowed = policy.sops_allowed;
    body.bls_allowed = policy.bls_allowed;
    for (const auto& w : policy.obscured_sections)
        body.windows.emplace_back(static_cast<std::uint64_t>(w.delay.ticks()),
                                  static_cast<std::uint64_t>(w.duration.ticks()));
    body.interrogators = policy.allowed_interrogators;

    applied_policies_[policy.path_id] = policy;
    for (const auto& [src, agents] : by_src) {
        (void)agents;
        ++expected_acks_;
        send(msm_id_, src, MsgType::PolicySet, body, t);
    }
}

void ControlPlane::on_device_alert(const FscdDevice& device, double power_dbm, SimTime t) {
    if (!first_alert_)
        first_alert_ = t;
    auto pit = parent_.find(device.id());
    if (pit == parent_.end())
        return;
    AlertPulseBody body;
    body.device_id = node_wire_id(device.id());
    body.power_centi_dbm = static_cast<std::int32_t>(std::lround(power_dbm * 100.0));
    body.detect_time_ps = static_cast<std::uint64_t>(t.ticks());
    send(device.id(), pit->second, MsgType::AlertPulse, body, t);
}

void ControlPlane::dispatch(const std::string& receiver_id, const std::string& sender_id,
                            const ControlMessage& msg) {
    const LayerNode& receiver = node_at(receiver_id);
    const SimTime now = engine_->now();

    switch (receiver.layer) {
    case Layer::Src: {
        if (msg.header.type == MsgType::PolicySet) {
            const auto& body = std::get<PolicySetBody>(msg.body);
            auto path_it = path_by_num_.find(body.path_id);
            if (path_it == path_by_num_.end()) {
                drops_.push_back(receiver_id + " dropped policy for unknown path id " +
                                 std::to_string(body.path_id));
                return;
            }
            PendingPolicy pending;
            pending.msm_seq = msg.header.seq;
            auto& slots = pending_policies_[receiver_id];
            const std::size_t slot = slots.size();
            for (const auto& agent : receiver.children) {
                if (device_path_.at(agent) != path_it->second)
                    continue;
                pending.awaiting.insert(agent);
            }
            slots.push_back(pending);
            if (pending.awaiting.empty()) {
                send(receiver_id, parent_.at(receiver_id), MsgType::PolicyAck,
                     PolicyAckBody{pending.msm_seq, 0}, now);
                return;
            }
            for (const auto& agent : pending.awaiting) {
                const std::uint32_t seq_to_agent = next_seq_[{receiver_id, agent}] + 1;
                agent_seq_slot_[{agent, seq_to_agent}] = slot;
                send(receiver_id, agent, MsgType::PolicySet, msg.body, now);
            }
            return;
        }
        if (msg.header.type == MsgType::PolicyAck) {
            const auto& body = std::get<PolicyAckBody>(msg.body);
            auto key = std::make_pair(sender_id, body.acked_seq);
            auto slot_it = agent_seq_slot_.find(key);
            if (slot_it == agent_seq_slot_.end()) {
                drops_.push_back(receiver_id + " dropped unmatched policy ack from " +
                                 sender_id);
                return;
            }
            auto& slot = pending_policies_[receiver_id][slot_it->second];
            slot.awaiting.erase(sender_id);
            agent_seq_slot_.erase(slot_it);
            if (slot.awaiting.empty())
                send(receiver_id, parent_.at(receiver_id), MsgType::PolicyAck,
                     PolicyAckBody{slot.msm_seq, 0}, now);
            return;
        }
        if (msg.header.type == MsgType::AlertPulse) {
            const auto& body = std::get<AlertPulseBody>(msg.body);
            // Region lockdown: every agent in the region closes its
            // backscatter branch; the scrambler side of each policy stays.
            for (const auto& agent : receiver.children)
                send(receiver_id, agent, MsgType::StateCmd,
                     StateCmdBody{StateCmdMode::DisableBls, 0, Layer::Src}, now);
            send(receiver_id, parent_.at(receiver_id), MsgType::StateReport,
                 StateReportBody{body.device_id, 0}, now);
            return;
        }
        if (msg.header.type == MsgType::StateCmd) {
            for (const auto& agent : receiver.children)
                send(receiver_id, agent, MsgType::StateCmd, msg.body, now);
            return;
        }
        break;
    }
    case Layer::Msm: {
        if (msg.header.type == MsgType::PolicyAck) {
            ++acked_policies_;
            return;
        }
        if (msg.header.type == MsgType::StateReport) {
            // Cross-region reaction: all other regions lock their
            // backscatter branches down.
            for (const auto& src : nodes_.at(msm_id_).children) {
                if (src == sender_id)
                    continue;
                send(msm_id_, src, MsgType::StateCmd,
                     StateCmdBody{StateCmdMode::DisableBls, 0, Layer::Msm}, now);
            }
            return;
        }
        break;
    }
    case Layer::Agent: {
        FscdDevice* device = devices_.at(receiver_id);
        if (msg.header.type == MsgType::PolicySet) {
            const auto& body = std::get<PolicySetBody>(msg.body);
            device->set_allowed_interrogators(
                {body.interrogators.begin(), body.interrogators.end()});
            std::vector<ObscuringWindow> windows;
            for (const auto& [delay, duration] : body.windows)
                windows.push_back({SimTime::from_ticks(static_cast<std::int64_t>(delay)),
                                   SimTime::from_ticks(static_cast<std::int64_t>(duration))});
            device->set_obscuring_windows(std::move(windows));
            device->set_state(state_for_policy(body.sops_allowed, body.bls_allowed), now,
                              *engine_);
            send(receiver_id, sender_id, MsgType::PolicyAck,
                 PolicyAckBody{msg.header.seq, 0},
                 now + device->config().agent_decision_time);
            return;
        }
        if (msg.header.type == MsgType::StateCmd) {
            const auto& body = std::get<StateCmdBody>(msg.body);
            const FscdState target = body.mode == StateCmdMode::DisableBls
                                         ? with_bls_disabled(device->state())
                                         : static_cast<FscdState>(body.state);
            device->set_state(target, now, *engine_, body.origin);
            return;
        }
        break;
    }
    }
    drops_.push_back(receiver_id + " dropped unexpected " + to_string(msg.header.type) +
                     " from " + sender_id);
}

bool ControlPlane::all_policies_acked() const { return acked_policies_ == expected_acks_; }

} // namespace fsim
