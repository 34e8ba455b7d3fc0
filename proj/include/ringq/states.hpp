#pragma once

// Particle configurations on a ring of N sites with n colors, and enumeration
// of the sectors (fixed per-color totals) they live in.  Shared by the exact
// generators, the cylinder partition functions, and the samplers.
//
// The canonical state ordering is lexicographic over sites, where each site
// occupation is compared by its counts read from the highest color down to the
// lowest; for site capacity 1 this coincides with comparing the site's color
// label in {0, 1, ..., n}.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringq/arrows.hpp"

namespace ringq {

using RingState = std::vector<ArrowState>;

inline std::string state_str(const RingState& st) {
    std::string s;
    for (size_t j = 0; j < st.size(); ++j) {
        if (j) s += '|';
        s += st[j].str();
    }
    return s;
}

// Color of a site holding at most one particle: 0 if empty, else the color.
inline int site_color(const ArrowState& a) {
    int c = 0;
    long t = 0;
    for (int i = 1; i <= a.n(); ++i)
        if (a.at(i) > 0) {
            c = i;
            t += a.at(i);
        }
    if (t > 1) throw std::domain_error("site_color: more than one particle");
    return c;
}

// A sector fixes the color counts on the ring; states never leave it.
// capacity: 1 for exclusion dynamics, P >= 1 for bounded sites, or
// std::nullopt for unbounded sites (the total is still bounded by the counts).
struct Sector {
    int n = 1;
    int N = 1;
    std::vector<long> counts;
    std::optional<long> capacity = 1;

    long total() const {
        long t = 0;
        for (long c : counts) t += c;
        return t;
    }

    void validate() const {
        if (n < 1 || N < 1) throw std::domain_error("Sector: need n, N >= 1");
        if (static_cast<int>(counts.size()) != n)
            throw std::domain_error("Sector: counts size must equal n");
        for (long c : counts)
            if (c < 0) throw std::domain_error("Sector: negative count");
        if (capacity) {
            if (*capacity < 1) throw std::domain_error("Sector: capacity < 1");
            if (total() > *capacity * static_cast<long>(N))
                throw std::domain_error("Sector: counts exceed ring capacity");
        }
    }
};

namespace detail {

// Site occupations with V_i <= rem_i and |V| <= cap, in canonical site order
// (counts compared from color n down to color 1, increasing).
inline void site_choices(const std::vector<long>& rem, std::optional<long> cap,
                         std::vector<ArrowState>& out) {
    int n = static_cast<int>(rem.size());
    out.clear();
    ArrowState cur(n);
    // Depth-first over colors n, n-1, ..., 1 with low values first yields the
    // canonical increasing order directly.
    std::function<void(int, long)> rec = [&](int color, long used) {
        if (color == 0) {
            out.push_back(cur);
            return;
        }
        long hi = rem[color - 1];
        if (cap) hi = std::min(hi, *cap - used);
        for (long v = 0; v <= hi; ++v) {
            cur.set(color, v);
            rec(color - 1, used + v);
        }
        cur.set(color, 0);
    };
    rec(n, 0);
}

}  // namespace detail

// All states of the sector in canonical order.  Throws if the count exceeds
// the ceiling (guard against accidentally huge enumerations).
inline std::vector<RingState> enumerate_sector(const Sector& sec,
                                               long ceiling = 500000) {
    sec.validate();
    std::vector<RingState> out;
    std::vector<long> rem = sec.counts;
    RingState cur(sec.N, ArrowState(sec.n));
    std::function<void(int)> rec = [&](int site) {
        long left = 0;
        for (long r : rem) left += r;
        if (site == sec.N) {
            if (left == 0) {
                if (static_cast<long>(out.size()) >= ceiling)
                    throw std::runtime_error(
                        "enumerate_sector: state count exceeds ceiling " +
                        std::to_string(ceiling));
                out.push_back(cur);
            }
            return;
        }
        // Remaining sites cannot absorb more than their total capacity.
        if (sec.capacity && left > *sec.capacity * static_cast<long>(sec.N - site))
            return;
        std::vector<ArrowState> local;
        detail::site_choices(rem, sec.capacity, local);
        for (const ArrowState& v : local) {
            for (int i = 1; i <= sec.n; ++i) rem[i - 1] -= v.at(i);
            cur[site] = v;
            rec(site + 1);
            for (int i = 1; i <= sec.n; ++i) rem[i - 1] += v.at(i);
        }
        cur[site] = ArrowState(sec.n);
    };
    rec(0);
    return out;
}

}  // namespace ringq
