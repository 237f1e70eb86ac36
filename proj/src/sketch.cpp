#include "cstars/sketch.hpp"

#include <algorithm>
#include <sstream>

namespace cstars::sketch {

namespace {

uint64_t slot_for(const seeds::SeedTable& seed, uint64_t slot_count, seeds::FlowId id) {
    uint64_t m = id % seed.modulus;
    return m % slot_count;  // identity when the array follows the modulus
}

}  // namespace

uint64_t readback_query(const EpochReadback& rb, seeds::FlowId id, int port) {
    if (rb.raws.empty()) return 0;
    uint64_t slot = slot_for(rb.seed, rb.raws.size(), id);
    return (rb.raws[slot] >> (16u * static_cast<unsigned>(port - 1))) & 0xffffULL;
}

bool readback_saturated(const EpochReadback& rb, seeds::FlowId id, int port) {
    if (rb.saturation.empty()) return false;
    uint64_t slot = slot_for(rb.seed, rb.saturation.size(), id);
    return (rb.saturation[slot] >> (port - 1)) & 1u;
}

CsNode::CsNode(uint32_t sat_id, int lanes_per_port, uint64_t slot_budget)
    : sat_id_(sat_id),
      lanes_per_port_(lanes_per_port < 1 ? 1 : lanes_per_port),
      slot_budget_(slot_budget),
      lane_packets_(static_cast<size_t>(lanes_per_port_) * 4, 0) {}

const seeds::SeedTable& CsNode::active_seed() const {
    if (!seed_) throw NoActiveSeedError("node " + std::to_string(sat_id_) + " has no seed");
    return *seed_;
}

uint64_t CsNode::slot_of(seeds::FlowId id) const {
    return slot_for(*seed_, counters_.size(), id);
}

std::optional<EpochReadback> CsNode::install_seed(const seeds::SeedTable& table) {
    if (seed_ && table.epoch <= seed_->epoch)
        throw StaleSeedError("epoch " + std::to_string(table.epoch) +
                             " is not newer than the active epoch " +
                             std::to_string(seed_->epoch));

    std::optional<EpochReadback> out;
    if (seed_) {
        retained_ = snapshot_counters();
        out = retained_;
    }

    seed_ = table;
    uint64_t slots = table.modulus;
    if (slot_budget_ > 0) slots = std::min<uint64_t>(slots, slot_budget_);
    if (slots == 0) slots = 1;
    counters_.assign(slots, PortAggCounter{});
    saturation_.assign(slots, 0);
    unexpected_units_ = 0;
    return out;
}

EpochReadback CsNode::snapshot_counters() const {
    EpochReadback rb;
    rb.sat_id = sat_id_;
    if (seed_) {
        rb.epoch = seed_->epoch;
        rb.seed = *seed_;
    }
    rb.raws.reserve(counters_.size());
    for (const PortAggCounter& c : counters_) rb.raws.push_back(c.raw());
    rb.saturation = saturation_;
    rb.unexpected_units = unexpected_units_;
    return rb;
}

int CsNode::assign_parser(int port) {
    int& cursor = rr_cursor_[port - 1];
    int lane = cursor;
    cursor = (cursor + 1) % lanes_per_port_;
    return lane;
}

UpdateOutcome CsNode::update(const PacketRecord& pkt) {
    if (!seed_) throw NoActiveSeedError("node " + std::to_string(sat_id_) + " has no seed");

    int lane = assign_parser(pkt.out_port);
    lane_packets_[static_cast<size_t>(pkt.out_port - 1) * lanes_per_port_ + lane] += 1;

    uint64_t units = packet_units(pkt.size_bytes);
    if (seed_->flow_count == 0) {
        /* Sentinel table: nothing was predicted here, so any arrival is
         * unexpected traffic worth flagging to the ground. */
        unexpected_units_ += units;
        return UpdateOutcome::unknown;
    }

    uint64_t slot = slot_of(seeds::cantor_pair(pkt.src, pkt.dst));
    bool clamped = counters_[slot].add_saturating(pkt.out_port, units);
    if (clamped) {
        saturation_[slot] |= static_cast<uint8_t>(1u << (pkt.out_port - 1));
        return UpdateOutcome::overflowed;
    }
    return UpdateOutcome::counted;
}

uint64_t CsNode::query(seeds::FlowId id, int port) const {
    if (!seed_) throw NoActiveSeedError("node " + std::to_string(sat_id_) + " has no seed");
    if (counters_.empty()) return 0;
    return counters_[slot_of(id)].get(port);
}

std::string format_readback_csv(const std::vector<EpochReadback>& readbacks,
                                bool include_zero_slots) {
    std::ostringstream os;
    os << "epoch,sat_id,slot,raw,saturation_mask\n";
    for (const EpochReadback& rb : readbacks) {
        for (size_t s = 0; s < rb.raws.size(); ++s) {
            if (!include_zero_slots && rb.raws[s] == 0 && rb.saturation[s] == 0) continue;
            os << rb.epoch << ',' << rb.sat_id << ',' << s << ',' << rb.raws[s] << ','
               << unsigned(rb.saturation[s]) << '\n';
        }
    }
    return os.str();
}

}  // namespace cstars::sketch
