#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/rng.hpp"
#include "ccc/scales.hpp"

namespace ccc {

struct Interval {
    std::int64_t lo = 0;
    std::int64_t hi = -1;  // inclusive; lo > hi means empty
    std::int64_t size() const { return hi < lo ? 0 : hi - lo + 1; }
    bool contains(std::int64_t t) const { return t >= lo && t <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct SeedRecord {
    std::uint64_t value = 0;
};

/// A finite window of i.i.d. fair bits.  The bit at position t depends only
/// on (seed, t), never on the window bounds, so enlarging a window preserves
/// the overlap.
class Environment {
  public:
    static Environment sample(Interval window, SeedRecord seed) {
        if (window.size() <= 0) throw ConfigError("environment window is empty");
        Environment e;
        e.window_ = window;
        e.seed_ = seed;
        e.bits_.resize(static_cast<std::size_t>(window.size()));
        Rng rng(seed.value);
        for (std::int64_t t = window.lo; t <= window.hi; ++t)
            e.bits_[static_cast<std::size_t>(t - window.lo)] =
                rng.fair_bit(stream::env_bits, key(t)) ? 1 : 0;
        return e;
    }

    static Environment from_bits(Interval window, std::vector<std::uint8_t> bits,
                                 SeedRecord provenance = {}) {
        if (window.size() <= 0) throw ConfigError("environment window is empty");
        if (static_cast<std::int64_t>(bits.size()) != window.size())
            throw ConfigError("bit vector length does not match window");
        for (auto b : bits)
            if (b > 1) throw ConfigError("environment bits must be 0 or 1");
        Environment e;
        e.window_ = window;
        e.seed_ = provenance;
        e.bits_ = std::move(bits);
        return e;
    }

    Interval window() const { return window_; }
    SeedRecord seed() const { return seed_; }
    bool contains(std::int64_t t) const { return window_.contains(t); }

    std::uint8_t bit(std::int64_t t) const {
        if (!contains(t)) throw BoundaryUndetermined("position outside environment window");
        return bits_[static_cast<std::size_t>(t - window_.lo)];
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    /// Copy with one bit flipped; used by the P2 (future-insensitivity) checks.
    Environment with_flipped_bit(std::int64_t t) const {
        Environment e = *this;
        e.bits_[static_cast<std::size_t>(t - window_.lo)] ^= 1;
        return e;
    }

  private:
    Interval window_;
    SeedRecord seed_;
    std::vector<std::uint8_t> bits_;
};

inline Environment sample_environment(Interval window, SeedRecord seed) {
    return Environment::sample(window, seed);
}

/// A k-block.  Determinate blocks have both delimiting occurrences of I_k
/// inside the window; flanking regions are kept as indeterminate blocks so
/// the partition always tiles the window.
struct Block {
    int scale = 0;
    std::int64_t a = 0;
    std::int64_t b = 0;
    bool determinate = false;
    std::int64_t diam() const { return b - a + 1; }
};

/// All intervals on which I_k is seen, in increasing order.
inline std::vector<Interval> find_occurrences(const Environment& env, const ScaleTable& table, int k) {
    const std::int64_t ell = table.row(k).ell;
    std::vector<Interval> out;
    if (env.window().size() < ell) return out;
    std::int64_t run = 0;  // ones ending just before the current position
    for (std::int64_t t = env.window().lo; t <= env.window().hi; ++t) {
        if (env.bit(t) == 1) {
            ++run;
        } else {
            if (run >= ell - 1) out.push_back({t - ell + 1, t});
            run = 0;
        }
    }
    return out;
}

namespace detail {

inline std::vector<Block> blocks_from_ends(Interval w, const std::vector<std::int64_t>& ends,
                                           int k) {
    std::vector<Block> out;
    if (ends.size() < 2) {
        if (ends.empty()) {
            out.push_back({k, w.lo, w.hi, false});
        } else {
            std::int64_t e = ends[0];
            if (e > w.lo) out.push_back({k, w.lo, e - 1, false});
            out.push_back({k, e, w.hi, false});
        }
        return out;
    }
    if (ends.front() > w.lo) out.push_back({k, w.lo, ends.front() - 1, false});
    for (std::size_t i = 0; i + 1 < ends.size(); ++i)
        out.push_back({k, ends[i], ends[i + 1] - 1, true});
    out.push_back({k, ends.back(), w.hi, false});
    return out;
}

}  // namespace detail

/// Tiles the window into k-blocks; the regions before the first and after the
/// last occurrence of I_k are flagged indeterminate.
inline std::vector<Block> partition_blocks(const Environment& env, const ScaleTable& table, int k) {
    auto occ = find_occurrences(env, table, k);
    std::vector<std::int64_t> ends;
    ends.reserve(occ.size());
    for (const Interval& o : occ) ends.push_back(o.hi);
    return detail::blocks_from_ends(env.window(), ends, k);
}

enum class Tri { no, yes, undetermined };

/// k_t and S_t of a site, with in-band indeterminacy.  `infinite` is part of
/// the result vocabulary but no finite window can certify it.
struct TargetResult {
    enum class Kind { determined, infinite, undetermined };
    Kind kind = Kind::undetermined;
    int k_t = -1;                 // valid when determined
    std::int64_t a_kt = 0;        // left end of B^{k_t}(t) when determined
    bool s_known = false;
    std::vector<std::int64_t> s;  // S_t, sorted; valid when s_known

    bool determined() const { return kind == Kind::determined; }
};

// Parses one environment into its nested block partitions for all scales of
// the table, with beginnings precomputed per block.  Immutable after
// construction; the per-scale sorted block index is the cache that keeps
// active-point queries near-linear.
class BlockHierarchy {
  public:
    BlockHierarchy(const Environment& env, const ScaleTable& table)
        : env_(&env), table_(table), k_lo_(table.k_star()), k_hi_(table.k_max()) {
        scales_.resize(static_cast<std::size_t>(k_hi_ - k_lo_ + 1));
        for (int k = k_lo_; k <= k_hi_; ++k) {
            PerScale& ps = scale_mut(k);
            for (const Interval& o : find_occurrences(env, table_, k)) ps.occ_ends.push_back(o.hi);
            ps.blocks = detail::blocks_from_ends(env.window(), ps.occ_ends, k);
            ps.starts.reserve(ps.blocks.size());
            for (const Block& b : ps.blocks) ps.starts.push_back(b.a);
            ps.beg_end.assign(ps.blocks.size(), 0);
            ps.child_first.assign(ps.blocks.size(), -1);
            ps.child_count.assign(ps.blocks.size(), 0);
            for (std::size_t i = 0; i < ps.blocks.size(); ++i) {
                const Block& b = ps.blocks[i];
                if (!b.determinate) continue;
                if (k == k_lo_) {
                    std::int64_t reach = table_.base_beginning_reach();
                    ps.beg_end[i] = (reach >= b.b - b.a) ? b.b : b.a + reach;
                } else {
                    auto [first, count] = locate_children(k, b);
                    ps.child_first[i] = first;
                    ps.child_count[i] = count;
                    std::int64_t keep = std::min<std::int64_t>(count, table_.beginning_child_count(k));
                    ps.beg_end[i] = scale(k - 1).blocks[static_cast<std::size_t>(first + keep - 1)].b;
                }
            }
        }
    }

    const Environment& env() const { return *env_; }
    const ScaleTable& table() const { return table_; }
    int k_lo() const { return k_lo_; }
    int k_hi() const { return k_hi_; }

    const std::vector<Block>& blocks(int k) const { return scale(k).blocks; }

    int block_index_at(int k, std::int64_t t) const {
        if (!env_->contains(t)) throw BoundaryUndetermined("position outside environment window");
        const auto& starts = scale(k).starts;
        auto it = std::upper_bound(starts.begin(), starts.end(), t);
        return static_cast<int>(it - starts.begin()) - 1;
    }

    const Block& block_at(int k, std::int64_t t) const {
        return scale(k).blocks[static_cast<std::size_t>(block_index_at(k, t))];
    }

    /// Children of a determinate k-block (k above the base scale) as a
    /// consecutive run of (k-1)-blocks, plus their count N(B).
    std::pair<std::vector<Block>, std::int64_t> children(const Block& block) const {
        if (!block.determinate) throw BoundaryUndetermined("children of an indeterminate block");
        if (block.scale <= k_lo_) throw ConfigError("children undefined at the base scale");
        int idx = block_index_at(block.scale, block.a);
        const PerScale& ps = scale(block.scale);
        int first = ps.child_first[static_cast<std::size_t>(idx)];
        std::int64_t count = ps.child_count[static_cast<std::size_t>(idx)];
        const auto& lower = scale(block.scale - 1).blocks;
        std::vector<Block> out(lower.begin() + first, lower.begin() + first + count);
        return {std::move(out), count};
    }

    /// The beginning of a determinate block, always a prefix interval.
    Interval beginning(const Block& block) const {
        if (!block.determinate) throw BoundaryUndetermined("beginning of an indeterminate block");
        int idx = block_index_at(block.scale, block.a);
        return {block.a, scale(block.scale).beg_end[static_cast<std::size_t>(idx)]};
    }

    /// Left end a^k(t) of the block containing t, when the window shows the
    /// delimiting occurrence; everything about t's activity depends only on
    /// bits at or before t, so the block's right end is never needed.
    std::optional<std::int64_t> left_block_start(int k, std::int64_t t) const {
        if (!env_->contains(t)) throw BoundaryUndetermined("position outside environment window");
        const auto& ends = scale(k).occ_ends;
        auto it = std::upper_bound(ends.begin(), ends.end(), t);
        if (it == ends.begin()) return std::nullopt;
        return *(it - 1);
    }

    /// Scale-k activity condition of site t alone: membership in the
    /// beginning of B^k(t) together with closeness to its left end.
    /// Undetermined when the window hides the block start or the table lacks
    /// beta_{k+1} and the distance clause is reached.
    Tri condition(int k, std::int64_t t) const {
        auto a = left_block_start(k, t);
        if (!a) return Tri::undetermined;
        if (k == k_lo_) {
            if (t - *a > table_.base_beginning_reach()) return Tri::no;
        } else {
            // t sits in child #idx of its block; the beginning keeps the first
            // floor(nu^{1-eps}) children (never fewer than the block has).
            const auto& ce = scale(k - 1).occ_ends;
            std::int64_t idx = std::upper_bound(ce.begin(), ce.end(), t) -
                               std::upper_bound(ce.begin(), ce.end(), *a);
            if (idx >= table_.beginning_child_count(k)) return Tri::no;
        }
        if (!table_.covers(k + 1)) return Tri::undetermined;
        return table_.within_beta(t - *a, k + 1) ? Tri::yes : Tri::no;
    }

    /// Whether t is k-active: all conditions up to k hold.
    Tri active(int k, std::int64_t t) const {
        bool undecided = false;
        for (int j = k_lo_; j <= k; ++j) {
            switch (condition(j, t)) {
                case Tri::no: return Tri::no;
                case Tri::undetermined: undecided = true; break;
                case Tri::yes: break;
            }
        }
        return undecided ? Tri::undetermined : Tri::yes;
    }

    /// act(B) for a determinate block; throws when the window or table cannot
    /// decide every site of the block.
    std::vector<std::int64_t> active_points(const Block& block) const {
        if (!block.determinate) throw BoundaryUndetermined("active set of an indeterminate block");
        Interval beg = beginning(block);  // act(B) is contained in the beginning
        std::vector<std::int64_t> out;
        for (std::int64_t t = beg.lo; t <= beg.hi; ++t) {
            switch (active(block.scale, t)) {
                case Tri::yes: out.push_back(t); break;
                case Tri::no: break;
                case Tri::undetermined:
                    throw BoundaryUndetermined("active set undecidable at scale " +
                                               std::to_string(block.scale));
            }
        }
        return out;
    }

    /// k_t and S_t.  k_t is the first scale whose condition fails; the search
    /// is capped at the largest scale the window and table can decide.  Every
    /// k_t-active point of B^{k_t}(t) lies strictly before t, so S_t is
    /// enumerable from bits at or before t alone.
    TargetResult target(std::int64_t t) const {
        TargetResult r;
        for (int k = k_lo_; k <= k_hi_; ++k) {
            Tri c = condition(k, t);
            if (c == Tri::undetermined) return r;  // undetermined
            if (c == Tri::no) {
                r.kind = TargetResult::Kind::determined;
                r.k_t = k;
                r.a_kt = *left_block_start(k, t);
                if (k == k_lo_) {
                    r.s_known = true;  // S_t empty by definition at the base scale
                    return r;
                }
                r.s_known = true;
                for (std::int64_t s = r.a_kt; s < t && r.s_known; ++s) {
                    switch (active(k, s)) {
                        case Tri::yes: r.s.push_back(s); break;
                        case Tri::no: break;
                        case Tri::undetermined:
                            r.s.clear();
                            r.s_known = false;
                            break;
                    }
                }
                return r;
            }
        }
        return r;  // still active at the cap: undetermined
    }

    /// Good/bad classification of a determinate block (Definition-style
    /// thresholds n1/n2).  An oversized diameter is bad outright.
    bool classify_block(const Block& block) const {
        if (!block.determinate) throw BoundaryUndetermined("classification of an indeterminate block");
        if (!table_.below_half_beta_1_plus_eps(block.diam(), block.scale)) return false;
        const ScaleRow& row = table_.row(block.scale);
        if (!row.n2) throw ConfigError("classification needs n2, unavailable at the base scale");
        double act = static_cast<double>(active_points(block).size());
        return act > row.n1 && act < *row.n2;
    }

    /// Window-truncated version of the connectivity event: for every
    /// j in [k, K_max], the origin's j-block is good and the origin avoids
    /// its beginning.
    Tri check_connectivity(int k, int K_max) const {
        bool undecided = false;
        for (int j = k; j <= K_max; ++j) {
            int idx = block_index_at(j, 0);
            const Block& b = scale(j).blocks[static_cast<std::size_t>(idx)];
            if (!b.determinate) {
                undecided = true;
                continue;
            }
            if (0 <= scale(j).beg_end[static_cast<std::size_t>(idx)] && 0 >= b.a) return Tri::no;
            if (!table_.below_half_beta_1_plus_eps(b.diam(), j)) return Tri::no;
            try {
                if (!classify_block(b)) return Tri::no;
            } catch (const BoundaryUndetermined&) {
                undecided = true;
            }
        }
        return undecided ? Tri::undetermined : Tri::yes;
    }

  private:
    struct PerScale {
        std::vector<std::int64_t> occ_ends;    // occurrence end positions of I_k, sorted
        std::vector<Block> blocks;
        std::vector<std::int64_t> starts;
        std::vector<std::int64_t> beg_end;     // inclusive end of the beginning (determinate only)
        std::vector<int> child_first;          // index into scale k-1 blocks
        std::vector<std::int64_t> child_count; // N(B)
    };

    const PerScale& scale(int k) const { return scales_[static_cast<std::size_t>(k - k_lo_)]; }
    PerScale& scale_mut(int k) { return scales_[static_cast<std::size_t>(k - k_lo_)]; }

    std::pair<int, std::int64_t> locate_children(int k, const Block& parent) {
        const auto& lower = scale(k - 1);
        auto it = std::lower_bound(lower.starts.begin(), lower.starts.end(), parent.a);
        int first = static_cast<int>(it - lower.starts.begin());
        // The delimiting occurrences of I_k end with occurrences of I_{k-1},
        // so the (k-1)-blocks tile the parent exactly.
        if (first >= static_cast<int>(lower.blocks.size()) || lower.blocks[static_cast<std::size_t>(first)].a != parent.a)
            throw std::logic_error("block nesting broken: no child starts at the parent's left end");
        std::int64_t count = 0;
        std::int64_t cursor = parent.a;
        for (std::size_t i = static_cast<std::size_t>(first); i < lower.blocks.size(); ++i) {
            const Block& c = lower.blocks[i];
            if (c.a > parent.b) break;
            if (!c.determinate || c.a != cursor) throw std::logic_error("block nesting broken inside a parent");
            ++count;
            cursor = c.b + 1;
            if (c.b == parent.b) break;
        }
        if (cursor != parent.b + 1) throw std::logic_error("children do not tile the parent block");
        return {first, count};
    }

    const Environment* env_;
    ScaleTable table_;
    int k_lo_;
    int k_hi_;
    std::vector<PerScale> scales_;
};

// Free-function spellings of the per-block operations.

inline std::pair<std::vector<Block>, std::int64_t> children(const BlockHierarchy& h, const Block& b) {
    return h.children(b);
}

inline Interval beginning(const BlockHierarchy& h, const Block& b) { return h.beginning(b); }

inline std::vector<std::int64_t> active_points(const BlockHierarchy& h, const Block& b) {
    return h.active_points(b);
}

inline TargetResult target(const BlockHierarchy& h, std::int64_t t) { return h.target(t); }

inline bool classify_block(const BlockHierarchy& h, const Block& b) { return h.classify_block(b); }

inline Tri check_connectivity(const BlockHierarchy& h, int k, int K_max) {
    return h.check_connectivity(k, K_max);
}

}  // namespace ccc
