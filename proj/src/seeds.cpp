#include "cstars/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "cstars/common.hpp"

namespace cstars::seeds {

FlowId cantor_pair(uint64_t src, uint64_t dst) {
    unsigned __int128 w = static_cast<unsigned __int128>(src) + dst;
    if (w < src)  // cannot happen with 128-bit sum, kept for clarity of intent
        throw PairingOverflowError("src + dst overflows");
    unsigned __int128 id = w * (w + 1) / 2 + dst;
    if (id > std::numeric_limits<uint64_t>::max())
        throw PairingOverflowError("pairing of (" + std::to_string(src) + ", " +
                                   std::to_string(dst) + ") exceeds 64 bits");
    return static_cast<FlowId>(id);
}

namespace {

/* Floor square root of a 128-bit value, exact. */
unsigned __int128 isqrt128(unsigned __int128 v) {
    if (v == 0) return 0;
    unsigned __int128 r = static_cast<unsigned __int128>(
        std::sqrt(static_cast<long double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

}  // namespace

flow::FlowKey cantor_unpair(FlowId id) {
    unsigned __int128 v = static_cast<unsigned __int128>(id) * 8 + 1;
    uint64_t w = static_cast<uint64_t>((isqrt128(v) - 1) / 2);
    // w can reach ~2^32.5, so the triangular number needs the wide type
    uint64_t tri = static_cast<uint64_t>(static_cast<unsigned __int128>(w) * (w + 1) / 2);
    uint64_t dst = id - tri;
    uint64_t src = w - dst;
    if (src > std::numeric_limits<uint32_t>::max() || dst > std::numeric_limits<uint32_t>::max())
        throw PairingOverflowError("unpaired components of " + std::to_string(id) +
                                   " exceed 32 bits");
    return {static_cast<uint32_t>(src), static_cast<uint32_t>(dst)};
}

namespace {

/* Ascending scan, one residue-uniqueness check per candidate. The stamp
 * buffer is reused across candidates: seen[r] == h marks residue r as taken
 * for the current h, so no clearing between candidates. */
uint64_t modulus_by_scan(std::span<const FlowId> ids, uint64_t n, uint64_t cap) {
    std::vector<uint64_t> seen(cap, 0);
    for (uint64_t h = n; h <= cap; ++h) {
        bool ok = true;
        for (FlowId id : ids) {
            uint64_t r = id % h;
            if (seen[r] == h) {
                ok = false;
                break;
            }
            seen[r] = h;
        }
        if (ok) return h;
    }
    return 0;
}

/* Equivalent search through the pairwise-difference set: h is collision-free
 * iff no difference is a multiple of h. Enumerating differences once costs
 * O(n^2), after which each candidate costs max_diff/h bit probes, which is
 * far cheaper than the scan when the answer sits well above n. */
uint64_t modulus_by_sieve(std::span<const FlowId> ids, uint64_t n, uint64_t cap) {
    uint64_t lo = ids[0], hi = ids[0];
    for (FlowId id : ids) {
        lo = std::min<uint64_t>(lo, id);
        hi = std::max<uint64_t>(hi, id);
    }
    uint64_t max_diff = hi - lo;
    if (max_diff == 0) return 0;  // duplicates only; contract excludes this

    std::vector<bool> present(max_diff + 1, false);
    for (size_t i = 0; i < ids.size(); ++i)
        for (size_t j = i + 1; j < ids.size(); ++j) {
            uint64_t d = ids[i] >= ids[j] ? ids[i] - ids[j] : ids[j] - ids[i];
            present[d] = true;
        }

    uint64_t top = std::min(cap, max_diff);
    for (uint64_t h = n; h <= top; ++h) {
        bool ok = true;
        for (uint64_t m = h; m <= max_diff; m += h)
            if (present[m]) {
                ok = false;
                break;
            }
        if (ok) return h;
    }
    // Any h beyond the largest difference is trivially collision-free.
    if (max_diff + 1 <= cap) return std::max(n, max_diff + 1);
    return 0;
}

/* Below this size the plain scan usually wins; above it the one-off O(n^2)
 * difference enumeration amortizes. Results are identical either way. */
constexpr uint64_t kSieveThreshold = 256;

}  // namespace

uint64_t min_perfect_modulus(std::span<const FlowId> ids, uint64_t cap_factor) {
    uint64_t n = ids.size();
    if (n == 0) throw EmptyIdSetError("cannot derive a modulus for an empty id set");
    if (n == 1) return 1;

    uint64_t cap = cap_factor * n;
    uint64_t h = n >= kSieveThreshold ? modulus_by_sieve(ids, n, cap)
                                      : modulus_by_scan(ids, n, cap);
    if (h == 0)
        throw SeedSearchOverflowError("no collision-free modulus up to " + std::to_string(cap) +
                                      " for " + std::to_string(n) + " ids");
    return h;
}

uint64_t id_set_checksum(std::span<const FlowId> sorted_ids) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (FlowId id : sorted_ids) h = fnv1a64(&id, sizeof(id), h);
    return h;
}

std::vector<SeedTable> build_seed_tables(const std::vector<flow::FlowSet>& sets,
                                         uint64_t cap_factor,
                                         const std::vector<SeedTable>* reuse_hint) {
    std::unordered_map<uint32_t, const SeedTable*> prev;
    if (reuse_hint)
        for (const SeedTable& t : *reuse_hint) prev[t.sat_id] = &t;

    std::vector<SeedTable> out;
    out.reserve(sets.size());
    std::vector<FlowId> ids;

    for (const flow::FlowSet& fs : sets) {
        ids.clear();
        ids.reserve(fs.flows.size());
        for (const flow::FlowKey& key : fs.flows) ids.push_back(flow_id(key));
        std::sort(ids.begin(), ids.end());

        SeedTable table;
        table.sat_id = fs.sat_id;
        table.epoch = fs.epoch;
        table.flow_count = ids.size();
        table.id_checksum = id_set_checksum(ids);
        if (ids.empty()) {
            table.modulus = 1;  // sentinel: node flags all traffic as unexpected
        } else {
            auto it = prev.find(fs.sat_id);
            if (it != prev.end() && it->second->flow_count == table.flow_count &&
                it->second->id_checksum == table.id_checksum)
                table.modulus = it->second->modulus;
            else
                table.modulus = min_perfect_modulus(ids, cap_factor);
        }
        out.push_back(table);
    }
    return out;
}

std::string format_seed_tables_csv(const std::vector<SeedTable>& tables) {
    std::ostringstream os;
    os << "epoch,sat_id,modulus,flow_count,id_checksum\n";
    for (const SeedTable& t : tables)
        os << t.epoch << ',' << t.sat_id << ',' << t.modulus << ',' << t.flow_count << ','
           << t.id_checksum << '\n';
    return os.str();
}

}  // namespace cstars::seeds
