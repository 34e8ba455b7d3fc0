#pragma once

// Arrow configurations on a single lattice edge.
//
// Colors are 1..n; edge color 0 means an empty edge. A vertical edge carries a
// tuple (A_1,...,A_n) of arrow counts per color. Queue columns additionally
// carry infinitely many arrows of one distinguished color; that coordinate is
// modelled as an explicit "saturated" marker (a sum type), never as a large
// sentinel count, so no arithmetic can silently touch it.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringq {

class ArrowState {
  public:
    ArrowState() = default;
    explicit ArrowState(int n) : counts_(static_cast<size_t>(n), 0) {}
    ArrowState(std::initializer_list<long> counts) : counts_(counts) {}

    // Single arrow of the given edge color (0 = empty state).
    static ArrowState unit(int n, int color) {
        ArrowState a(n);
        if (color < 0 || color > n) throw std::domain_error("ArrowState::unit: bad color");
        if (color >= 1) a.counts_[color - 1] = 1;
        return a;
    }

    static ArrowState with_saturation(ArrowState finite, int color) {
        if (color < 1 || color > finite.n()) throw std::domain_error("bad saturated color");
        finite.counts_[color - 1] = 0;
        finite.saturated_ = color;
        return finite;
    }

    int n() const { return static_cast<int>(counts_.size()); }
    std::optional<int> saturated() const { return saturated_; }
    bool is_saturated(int color) const { return saturated_ && *saturated_ == color; }

    // Finite count of color i (1-based); the saturated coordinate has no count.
    long at(int color) const {
        check_color(color);
        if (is_saturated(color)) throw std::domain_error("ArrowState::at: saturated coordinate");
        return counts_[color - 1];
    }

    void set(int color, long v) {
        check_color(color);
        if (is_saturated(color)) throw std::domain_error("ArrowState::set: saturated coordinate");
        if (v < 0) throw std::domain_error("ArrowState::set: negative count");
        counts_[color - 1] = v;
    }

    void add(int color, long v) { set(color, at(color) + v); }

    bool finite() const { return !saturated_.has_value(); }

    // |A| = sum of all finite counts; only meaningful for finite states.
    long total() const {
        if (!finite()) throw std::domain_error("ArrowState::total: saturated state");
        long t = 0;
        for (long c : counts_) t += c;
        return t;
    }

    // Sum of counts over colors in [lo, hi]; every coordinate touched must be finite.
    long range_total(int lo, int hi) const {
        long t = 0;
        for (int i = lo; i <= hi; ++i) t += at(i);
        return t;
    }

    bool operator==(const ArrowState& o) const = default;

    std::string str() const {
        std::string s = "(";
        for (int i = 1; i <= n(); ++i) {
            if (i > 1) s += ",";
            s += is_saturated(i) ? "inf" : std::to_string(counts_[i - 1]);
        }
        return s + ")";
    }

  private:
    void check_color(int color) const {
        if (color < 1 || color > n()) throw std::domain_error("ArrowState: color out of range");
    }

    std::vector<long> counts_;
    std::optional<int> saturated_;
};

// Colorwise sum of the finite parts; both arguments must be finite.
inline ArrowState operator+(const ArrowState& a, const ArrowState& b) {
    if (a.n() != b.n()) throw std::domain_error("ArrowState+: color count mismatch");
    ArrowState r(a.n());
    for (int i = 1; i <= a.n(); ++i) r.set(i, a.at(i) + b.at(i));
    return r;
}

// a - b, or nullopt if some coordinate would go negative.
inline std::optional<ArrowState> sub(const ArrowState& a, const ArrowState& b) {
    if (a.n() != b.n()) throw std::domain_error("ArrowState sub: color count mismatch");
    ArrowState r(a.n());
    for (int i = 1; i <= a.n(); ++i) {
        long v = a.at(i) - b.at(i);
        if (v < 0) return std::nullopt;
        r.set(i, v);
    }
    return r;
}

// All finite states with every count in [0, cap_per_color].
inline std::vector<ArrowState> all_states(int n, long cap_per_color) {
    std::vector<ArrowState> out;
    ArrowState cur(n);
    std::function<void(int)> rec = [&](int color) {
        if (color > n) {
            out.push_back(cur);
            return;
        }
        for (long v = 0; v <= cap_per_color; ++v) {
            cur.set(color, v);
            rec(color + 1);
        }
        cur.set(color, 0);
    };
    rec(1);
    return out;
}

// All finite states with 0 <= count(i) <= caps[i-1] per color.
inline std::vector<ArrowState> box_states(const std::vector<long>& caps) {
    int n = static_cast<int>(caps.size());
    std::vector<ArrowState> out;
    ArrowState cur(n);
    std::function<void(int)> rec = [&](int color) {
        if (color > n) {
            out.push_back(cur);
            return;
        }
        for (long v = 0; v <= caps[color - 1]; ++v) {
            cur.set(color, v);
            rec(color + 1);
        }
        cur.set(color, 0);
    };
    rec(1);
    return out;
}

// All ways of splitting total into an ordered pair (C, D), C + D = total.
inline std::vector<std::pair<ArrowState, ArrowState>> split_pairs(const ArrowState& total) {
    std::vector<std::pair<ArrowState, ArrowState>> out;
    int n = total.n();
    ArrowState c(n);
    std::function<void(int)> rec = [&](int color) {
        if (color > n) {
            out.emplace_back(c, *sub(total, c));
            return;
        }
        for (long v = 0; v <= total.at(color); ++v) {
            c.set(color, v);
            rec(color + 1);
        }
        c.set(color, 0);
    };
    rec(1);
    return out;
}

}  // namespace ringq
