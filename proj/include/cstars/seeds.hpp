#ifndef CSTARS_SEEDS_HPP
#define CSTARS_SEEDS_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstars/flow.hpp"

namespace cstars::seeds {

using FlowId = uint64_t;

class PairingOverflowError : public std::runtime_error {
public:
    explicit PairingOverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyIdSetError : public std::runtime_error {
public:
    explicit EmptyIdSetError(const std::string& msg) : std::runtime_error(msg) {}
};

class SeedSearchOverflowError : public std::runtime_error {
public:
    explicit SeedSearchOverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Cantor pairing (src + dst)(src + dst + 1)/2 + dst. Injective on all of
 *  N^2, strictly order-sensitive. Throws PairingOverflowError if the id
 *  would not fit in 64 bits. */
FlowId cantor_pair(uint64_t src, uint64_t dst);

inline FlowId flow_id(const flow::FlowKey& key) { return cantor_pair(key.src, key.dst); }

/** Exact inverse of cantor_pair. */
flow::FlowKey cantor_unpair(FlowId id);

/** Smallest modulus h >= ids.size() under which every id lands in a
 *  distinct residue class. ids must be unique; order does not matter.
 *  The search is capped at cap_factor * ids.size() candidates; a set that
 *  exhausts the cap raises SeedSearchOverflowError. An empty set raises
 *  EmptyIdSetError (callers that want the sentinel table handle it). */
uint64_t min_perfect_modulus(std::span<const FlowId> ids, uint64_t cap_factor = 16);

/** The per-satellite table uplinked each period: which modulus to count
 *  under and how many flows it must separate. The checksum binds the table
 *  to the exact id set it was derived from. */
struct SeedTable {
    uint32_t sat_id = 0;
    uint64_t epoch = 0;
    uint64_t modulus = 1;    // sentinel 1 when no flows are predicted
    uint64_t flow_count = 0;
    uint64_t id_checksum = 0;
};

/** Checksum over the ascending id list, so reordered inputs agree. */
uint64_t id_set_checksum(std::span<const FlowId> sorted_ids);

/** One table per flow set. Empty sets get the sentinel (h = 1, n = 0).
 *  When reuse_hint tables are passed, a satellite whose id set is unchanged
 *  (same count and checksum) keeps its previous modulus without a fresh
 *  search; the minimal modulus of an identical set is identical, so this is
 *  purely a cost saving. */
std::vector<SeedTable> build_seed_tables(const std::vector<flow::FlowSet>& sets,
                                         uint64_t cap_factor = 16,
                                         const std::vector<SeedTable>* reuse_hint = nullptr);

/** CSV with header "epoch,sat_id,modulus,flow_count,id_checksum". */
std::string format_seed_tables_csv(const std::vector<SeedTable>& tables);

}  // namespace cstars::seeds

#endif
