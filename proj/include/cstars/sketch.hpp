#ifndef CSTARS_SKETCH_HPP
#define CSTARS_SKETCH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstars/seeds.hpp"

namespace cstars::sketch {

/** One 64-bit counter word aggregating four output ports: port p owns bits
 *  [16(p-1), 16p). A unit on port p jumps the word by 2^{16(p-1)}. Each
 *  subfield saturates at 0xffff on its own; an add never carries into the
 *  neighboring port's bits. */
class PortAggCounter {
public:
    uint64_t raw() const { return raw_; }
    void set_raw(uint64_t raw) { raw_ = raw; }

    /** Adds units to the port's subfield, clamping at 0xffff. Returns true
     *  when the add clamped (the subfield saturated on this call). */
    bool add_saturating(int port, uint64_t units) {
        unsigned shift = 16u * static_cast<unsigned>(port - 1);
        uint64_t field = (raw_ >> shift) & 0xffffULL;
        uint64_t sum = field + units;
        bool clamped = sum > 0xffffULL;
        if (clamped) sum = 0xffffULL;
        raw_ = (raw_ & ~(0xffffULL << shift)) | (sum << shift);
        return clamped;
    }

    uint16_t get(int port) const {
        return static_cast<uint16_t>((raw_ >> (16u * static_cast<unsigned>(port - 1))) & 0xffffULL);
    }

private:
    uint64_t raw_ = 0;
};

/** The traffic atom: one packet leaving a satellite through out_port. */
struct PacketRecord {
    uint32_t src = 0;       // ingress satellite of the flow
    uint32_t dst = 0;       // egress satellite of the flow
    uint32_t size_bytes = 64;
    uint8_t out_port = 0;   // 1..4 once a forwarding decision exists
    double t_s = 0.0;
};

/** Counting granularity: 64-byte units, partial unit rounds up. */
inline uint64_t packet_units(uint64_t size_bytes) { return (size_bytes + 63) / 64; }

enum class UpdateOutcome : uint8_t {
    counted,     // landed in its slot without clamping
    overflowed,  // subfield saturated on this add
    unknown,     // node holds the sentinel table; routed to the overflow tally
};

class NoActiveSeedError : public std::runtime_error {
public:
    explicit NoActiveSeedError(const std::string& msg) : std::runtime_error(msg) {}
};

class StaleSeedError : public std::runtime_error {
public:
    explicit StaleSeedError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Counter readback for one node and one elapsed epoch. */
struct EpochReadback {
    uint64_t epoch = 0;
    uint32_t sat_id = 0;
    seeds::SeedTable seed;              // the table the counters were taken under
    std::vector<uint64_t> raws;         // one 64-bit word per slot
    std::vector<uint8_t> saturation;    // bit p-1 set when port p clamped in that slot
    uint64_t unexpected_units = 0;      // sentinel-table traffic, by unit
    uint64_t slot_count() const { return raws.size(); }
};

/** Ground-side decode of a readback: same slot arithmetic the node used. */
uint64_t readback_query(const EpochReadback& rb, seeds::FlowId id, int port);
bool readback_saturated(const EpochReadback& rb, seeds::FlowId id, int port);

/** On-board measurement state of one satellite.
 *
 *  Slots follow the uplinked modulus h when memory permits; under a slot
 *  budget the array shrinks to the budget and ids share slots by congruence
 *  mod the slot count. Packets fan out over parser lanes per port in round
 *  robin; lanes only matter for ingest balance, every lane lands in the
 *  same counter array. */
class CsNode {
public:
    CsNode(uint32_t sat_id, int lanes_per_port = 4, uint64_t slot_budget = 0);

    uint32_t sat_id() const { return sat_id_; }
    bool has_seed() const { return seed_.has_value(); }
    const seeds::SeedTable& active_seed() const;
    uint64_t slot_count() const { return counters_.size(); }

    /** Swaps in the next epoch's table: snapshots the counters taken under
     *  the previous table, clears, resizes to the new modulus (capped by
     *  the slot budget), and activates. The snapshot is also retained on
     *  board until the following install, so a lost transmission can be
     *  re-read. Rejects epochs at or below the active one. */
    std::optional<EpochReadback> install_seed(const seeds::SeedTable& table);

    /** The retained previous-epoch snapshot, if any. */
    const std::optional<EpochReadback>& retained_readback() const { return retained_; }

    /** Counters accumulated so far in the current epoch, without clearing;
     *  used for the final collection when a run ends. */
    EpochReadback snapshot_counters() const;

    /** Counts one packet against its flow's slot and port subfield. */
    UpdateOutcome update(const PacketRecord& pkt);

    /** Current-epoch estimate for (flow, port); zero if never updated. */
    uint64_t query(seeds::FlowId id, int port) const;

    /** Next parser lane for a port, round robin. Exposed for balance
     *  inspection; update() drives it internally. */
    int assign_parser(int port);

    uint64_t lane_packets(int port, int lane) const {
        return lane_packets_[static_cast<size_t>(port - 1) * lanes_per_port_ + lane];
    }
    int lanes_per_port() const { return lanes_per_port_; }

private:
    uint64_t slot_of(seeds::FlowId id) const;

    uint32_t sat_id_;
    int lanes_per_port_;
    uint64_t slot_budget_;  // 0 = follow the modulus exactly
    std::optional<seeds::SeedTable> seed_;
    std::vector<PortAggCounter> counters_;
    std::vector<uint8_t> saturation_;
    uint64_t unexpected_units_ = 0;
    std::optional<EpochReadback> retained_;
    std::array<int, 4> rr_cursor_{0, 0, 0, 0};
    std::vector<uint64_t> lane_packets_;
};

/** CSV rows "epoch,sat_id,slot,raw,saturation_mask", nonzero slots only. */
std::string format_readback_csv(const std::vector<EpochReadback>& readbacks,
                                bool include_zero_slots = false);

}  // namespace cstars::sketch

#endif
