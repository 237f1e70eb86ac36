#include "cstars/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cstars::baseline {

CmSketch::CmSketch(uint32_t depth, uint32_t width, uint64_t seed)
    : depth_(depth), width_(width) {
    if (depth_ == 0 || width_ == 0) throw BudgetError("count-min needs depth and width >= 1");
    counters_.assign(static_cast<size_t>(depth_) * width_, 0);
    uint64_t s = seed;
    for (uint32_t i = 0; i < depth_; ++i) seeds_.push_back(splitmix64(s));
}

CmSketch CmSketch::with_budget(uint64_t budget_bytes, uint32_t depth, uint64_t seed) {
    uint64_t width = budget_bytes / (static_cast<uint64_t>(depth) * sizeof(uint32_t));
    if (width == 0) throw BudgetError("budget " + std::to_string(budget_bytes) +
                                      " bytes cannot hold " + std::to_string(depth) + " rows");
    return CmSketch(depth, static_cast<uint32_t>(width), seed);
}

void CmSketch::update(seeds::FlowId key, uint64_t units) {
    for (uint32_t i = 0; i < depth_; ++i) {
        uint32_t& c = counters_[static_cast<size_t>(i) * width_ + row_hash(key, seeds_[i]) % width_];
        uint64_t sum = static_cast<uint64_t>(c) + units;
        c = sum > std::numeric_limits<uint32_t>::max() ? std::numeric_limits<uint32_t>::max()
                                                       : static_cast<uint32_t>(sum);
    }
}

uint64_t CmSketch::query(seeds::FlowId key) const {
    uint64_t best = std::numeric_limits<uint64_t>::max();
    for (uint32_t i = 0; i < depth_; ++i)
        best = std::min<uint64_t>(
            best, counters_[static_cast<size_t>(i) * width_ + row_hash(key, seeds_[i]) % width_]);
    return best;
}

void CmSketch::clear() { std::fill(counters_.begin(), counters_.end(), 0); }

ElasticSketch::ElasticSketch(uint32_t buckets, uint32_t light_width, uint64_t seed)
    : buckets_(buckets), light_(1, light_width, derive_seed(seed, 0x11)), seed_(seed) {
    if (buckets == 0) throw BudgetError("elastic sketch needs at least one heavy bucket");
}

ElasticSketch ElasticSketch::with_budget(uint64_t budget_bytes, double heavy_fraction,
                                         uint64_t seed) {
    uint64_t heavy_bytes = static_cast<uint64_t>(budget_bytes * heavy_fraction);
    uint64_t buckets = std::max<uint64_t>(1, heavy_bytes / kBucketBytes);
    uint64_t used = buckets * kBucketBytes;
    if (used >= budget_bytes) throw BudgetError("budget too small for a heavy bucket plus light part");
    uint64_t light_width = (budget_bytes - used) / sizeof(uint32_t);
    if (light_width == 0) throw BudgetError("no room left for the light part");
    return ElasticSketch(static_cast<uint32_t>(buckets), static_cast<uint32_t>(light_width), seed);
}

void ElasticSketch::update(seeds::FlowId key, uint64_t units) {
    Bucket& b = buckets_[row_hash(key, seed_) % buckets_.size()];

    Slot* min_slot = nullptr;
    for (Slot& s : b.slots) {
        if (s.used && s.key == key) {
            s.votes += static_cast<uint32_t>(units);
            return;
        }
        if (!s.used) {
            if (!min_slot || min_slot->used) min_slot = &s;
        } else if (!min_slot || (min_slot->used && s.votes < min_slot->votes)) {
            min_slot = &s;
        }
    }

    if (min_slot && !min_slot->used) {
        *min_slot = Slot{key, static_cast<uint32_t>(units), true, false};
        return;
    }

    b.neg_votes += static_cast<uint32_t>(units);
    if (static_cast<uint64_t>(b.neg_votes) >= kLambda * min_slot->votes) {
        /* Surrender the weakest slot: its count moves to the light part and
         * the incoming key takes over, flagged because its earlier packets
         * were counted in the light part too. */
        light_.update(min_slot->key, min_slot->votes);
        *min_slot = Slot{key, static_cast<uint32_t>(units), true, true};
        b.neg_votes = 0;
    } else {
        light_.update(key, units);
    }
}

uint64_t ElasticSketch::query(seeds::FlowId key) const {
    const Bucket& b = buckets_[row_hash(key, seed_) % buckets_.size()];
    for (const Slot& s : b.slots)
        if (s.used && s.key == key)
            return s.votes + (s.flagged ? light_.query(key) : 0);
    return light_.query(key);
}

void ElasticSketch::clear() {
    for (Bucket& b : buckets_) b = Bucket{};
    light_.clear();
}

uint64_t ElasticSketch::allocated_bytes() const {
    return buckets_.size() * kBucketBytes + light_.allocated_bytes();
}

BloomFilter::BloomFilter(uint64_t bits, int hashes, uint64_t seed)
    : bits_(std::max<uint64_t>(bits, 64)), hashes_(std::max(hashes, 1)), seed_(seed) {
    words_.assign((bits_ + 63) / 64, 0);
}

BloomFilter BloomFilter::for_capacity(uint64_t expected_keys, double fp_rate, uint64_t seed) {
    expected_keys = std::max<uint64_t>(expected_keys, 1);
    double ln2 = std::log(2.0);
    double m = std::ceil(-static_cast<double>(expected_keys) * std::log(fp_rate) / (ln2 * ln2));
    int k = std::max(1, static_cast<int>(std::lround(m / expected_keys * ln2)));
    return BloomFilter(static_cast<uint64_t>(m), k, seed);
}

void BloomFilter::insert(seeds::FlowId key) {
    for (int i = 0; i < hashes_; ++i) {
        uint64_t bit = row_hash(key, seed_ + 0x9e3779b97f4a7c15ULL * (i + 1)) % bits_;
        words_[bit >> 6] |= 1ULL << (bit & 63);
    }
}

bool BloomFilter::contains(seeds::FlowId key) const {
    for (int i = 0; i < hashes_; ++i) {
        uint64_t bit = row_hash(key, seed_ + 0x9e3779b97f4a7c15ULL * (i + 1)) % bits_;
        if (!(words_[bit >> 6] & (1ULL << (bit & 63)))) return false;
    }
    return true;
}

void BloomFilter::clear() { std::fill(words_.begin(), words_.end(), 0); }

namespace {

BloomFilter sized_bloom(uint64_t budget_bytes, uint64_t expected_flows, double fp_rate,
                        uint64_t seed) {
    BloomFilter ideal = BloomFilter::for_capacity(expected_flows, fp_rate, seed);
    uint64_t cap_bits = static_cast<uint64_t>(budget_bytes * FlowLidar::kMaxBloomShare) * 8;
    if (ideal.bit_count() <= std::max<uint64_t>(cap_bits, 64)) return ideal;
    return BloomFilter(std::max<uint64_t>(cap_bits, 64), ideal.hash_count(), seed);
}

}  // namespace

FlowLidar::FlowLidar(uint64_t budget_bytes, uint64_t expected_flows, double fp_rate,
                     uint32_t cm_depth, uint64_t seed)
    : bloom_(sized_bloom(budget_bytes, expected_flows, fp_rate, derive_seed(seed, 0x21))),
      cm_(CmSketch::with_budget(
          budget_bytes > bloom_.allocated_bytes() ? budget_bytes - bloom_.allocated_bytes() : 0,
          cm_depth, derive_seed(seed, 0x22))) {}

void FlowLidar::update(seeds::FlowId key, uint64_t units) {
    if (!bloom_.contains(key)) {
        log_.push_back(key);
        bloom_.insert(key);
    }
    cm_.update(key, units);
}

uint64_t FlowLidar::query(seeds::FlowId key) const { return cm_.query(key); }

void FlowLidar::clear() {
    bloom_.clear();
    cm_.clear();
    log_.clear();
}

}  // namespace cstars::baseline
