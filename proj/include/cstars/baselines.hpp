#ifndef CSTARS_BASELINES_HPP
#define CSTARS_BASELINES_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstars/common.hpp"
#include "cstars/seeds.hpp"

namespace cstars::baseline {

class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

/* Row hash: a 64-bit mix of the key against a per-row seed. Seeds are drawn
 * once at construction and never rotated across epochs; flows that collide
 * in one period keep colliding in every later period. */
inline uint64_t row_hash(uint64_t key, uint64_t seed) { return mix64(key ^ seed); }

/** Count-Min: d rows of w 32-bit counters, estimate is the minimum over
 *  rows. Always an overestimate within an epoch. Counters clamp at 2^32-1
 *  instead of wrapping so one-sidedness survives even pathological load. */
class CmSketch {
public:
    CmSketch(uint32_t depth, uint32_t width, uint64_t seed);

    /** Sizes the widest sketch of the given depth that fits the budget. */
    static CmSketch with_budget(uint64_t budget_bytes, uint32_t depth, uint64_t seed);

    void update(seeds::FlowId key, uint64_t units);
    uint64_t query(seeds::FlowId key) const;
    void clear();

    uint32_t depth() const { return depth_; }
    uint32_t width() const { return width_; }
    uint64_t allocated_bytes() const { return uint64_t(depth_) * width_ * sizeof(uint32_t); }

private:
    uint32_t depth_;
    uint32_t width_;
    std::vector<uint32_t> counters_;  // row-major
    std::vector<uint64_t> seeds_;
};

/** Elastic-style two-part sketch. The heavy part is a bucket array of
 *  8 slots (key, votes, flag) plus one shared negative-vote counter per
 *  bucket; a slot is surrendered when negative votes reach lambda times
 *  its votes, and the surrendered count is flushed to the light part. The
 *  flag marks keys whose earlier packets may sit in the light part, so a
 *  query adds the light estimate for flagged keys. */
class ElasticSketch {
public:
    static constexpr int kSlotsPerBucket = 8;
    static constexpr uint64_t kLambda = 8;

    ElasticSketch(uint32_t buckets, uint32_t light_width, uint64_t seed);

    /** Splits the budget heavy_fraction : rest between the parts. */
    static ElasticSketch with_budget(uint64_t budget_bytes, double heavy_fraction, uint64_t seed);

    void update(seeds::FlowId key, uint64_t units);
    uint64_t query(seeds::FlowId key) const;
    void clear();

    uint32_t bucket_count() const { return static_cast<uint32_t>(buckets_.size()); }
    uint32_t light_width() const { return light_.width(); }
    uint64_t allocated_bytes() const;

    /* Logical bytes of one bucket: 8 slots of key + votes, one shared
     * negative-vote word, flags packed into a byte. */
    static constexpr uint64_t kBucketBytes =
        kSlotsPerBucket * (sizeof(uint64_t) + sizeof(uint32_t)) + sizeof(uint32_t) + 1;

private:
    struct Slot {
        uint64_t key = 0;
        uint32_t votes = 0;
        bool used = false;
        bool flagged = false;
    };
    struct Bucket {
        std::array<Slot, kSlotsPerBucket> slots;
        uint32_t neg_votes = 0;
    };

    std::vector<Bucket> buckets_;
    CmSketch light_;
    uint64_t seed_;
};

/** Plain Bloom filter with k derived hash rows over one bit array. */
class BloomFilter {
public:
    BloomFilter(uint64_t bits, int hashes, uint64_t seed);

    /** Bits and hash count for a target false-positive rate at n keys:
     *  m = ceil(-n ln p / ln^2 2), k = max(1, round(m/n ln 2)). */
    static BloomFilter for_capacity(uint64_t expected_keys, double fp_rate, uint64_t seed);

    void insert(seeds::FlowId key);
    bool contains(seeds::FlowId key) const;
    void clear();

    uint64_t bit_count() const { return bits_; }
    int hash_count() const { return hashes_; }
    uint64_t allocated_bytes() const { return words_.size() * sizeof(uint64_t); }

private:
    uint64_t bits_;
    int hashes_;
    uint64_t seed_;
    std::vector<uint64_t> words_;
};

/** New-flow detector in front of a Count-Min: the first packet of a key
 *  (Bloom miss) appends the key to the reported-flow log before counting.
 *  Queries read the inner sketch; the log gives the ground an exact flow
 *  list, which the evaluation uses for cardinality. The inner sketch runs
 *  two rows wide rather than three: with the key list known, width beats
 *  depth for per-flow decode. */
class FlowLidar {
public:
    FlowLidar(uint64_t budget_bytes, uint64_t expected_flows, double fp_rate, uint32_t cm_depth,
              uint64_t seed);

    void update(seeds::FlowId key, uint64_t units);
    uint64_t query(seeds::FlowId key) const;
    const std::vector<seeds::FlowId>& new_flows() const { return log_; }
    void clear();

    uint64_t allocated_bytes() const { return bloom_.allocated_bytes() + cm_.allocated_bytes(); }
    const BloomFilter& bloom() const { return bloom_; }
    const CmSketch& inner() const { return cm_; }

    /* The Bloom never eats more than this share of the instance budget. */
    static constexpr double kMaxBloomShare = 0.10;

private:
    BloomFilter bloom_;
    CmSketch cm_;
    std::vector<seeds::FlowId> log_;
};

/** Four independent instances of one sketch, one per output port, the
 *  total byte budget split evenly (remainder to the lowest ports). The
 *  budget shares always sum to the configured total. */
template <typename S>
class PortedBaseline {
public:
    template <typename Factory>
    PortedBaseline(uint64_t budget_bytes, Factory make) {
        if (budget_bytes < 4) throw BudgetError("budget too small to split across four ports");
        uint64_t base = budget_bytes / 4;
        uint64_t rem = budget_bytes % 4;
        for (int p = 0; p < 4; ++p) {
            shares_[p] = base + (static_cast<uint64_t>(p) < rem ? 1 : 0);
            instances_.push_back(make(shares_[p], p));
        }
        budget_ = budget_bytes;
    }

    void update(seeds::FlowId key, int port, uint64_t units) {
        instances_[port - 1].update(key, units);
    }

    uint64_t query(seeds::FlowId key, int port) const { return instances_[port - 1].query(key); }

    void clear() {
        for (auto& inst : instances_) inst.clear();
    }

    uint64_t memory_bytes() const { return budget_; }
    uint64_t share(int port) const { return shares_[port - 1]; }
    const S& instance(int port) const { return instances_[port - 1]; }
    S& instance(int port) { return instances_[port - 1]; }

private:
    std::vector<S> instances_;
    std::array<uint64_t, 4> shares_{};
    uint64_t budget_ = 0;
};

}  // namespace cstars::baseline

#endif
