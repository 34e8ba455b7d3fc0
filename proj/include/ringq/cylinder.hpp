#pragma once

// Stationary weights for the ring processes as truncated cylinder sums.  A
// configuration weight is the trace of a product of one-site operators acting
// on "winding states": per column -m, a seam tuple records how many arrows of
// each color wind around the ring through that column, with the reservoir
// color m saturated, colors below m empty, and colors above m capped.  The
// caps grow adaptively until the value is stable to a requested tolerance and
// an empirical geometric tail estimate certifies the remainder.  Normalizing
// the weights over a sector yields the stationary distribution of the matching
// process (exclusion, bosonic, or pushing dynamics); the exact generators
// provide an independent cross-check.
//
// Parameter conventions (all rational-friendly):
//   * masep / qpush columns use the gauge variant of the queue weights with
//     horizontal capacity 1 resp. P.  The per-site parameters u_j are the
//     combined values (horizontal spin) x (spectral parameter), so no square
//     root of q ever appears; the per-column divisor v_m turns them into the
//     vertex combination u_j / v_m.
//   * qboson columns use the bosonic family with vertex parameter u_j * y_m.
// Within a sector every reported weight carries the same constant factor
// (column gauge constants), so ratios and normalized distributions agree with
// the un-gauged model.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ringq/arrows.hpp"
#include "ringq/scalar.hpp"
#include "ringq/states.hpp"
#include "ringq/weights.hpp"

namespace ringq {

enum class ColumnFamily { Masep, QBoson, QPush };

inline std::string to_string(ColumnFamily f) {
    switch (f) {
        case ColumnFamily::Masep: return "masep";
        case ColumnFamily::QBoson: return "qboson";
        case ColumnFamily::QPush: return "qpush";
    }
    return "?";
}

// Geometry, weight family, and parameters of one cylinder evaluation.
template <typename S>
struct CylinderSpec {
    int n = 1;                      // colors (columns)
    int N = 1;                      // ring size (sites)
    ColumnFamily family = ColumnFamily::Masep;
    S q{0};
    long P = 1;                     // site capacity of the pushing family
    std::vector<S> u;               // per-site parameters, see header comment
    std::vector<S> v;               // per-column divisors (masep / qpush)
    std::vector<S> y;               // per-column factors (qboson)
    std::vector<S> sv;              // per-column vertical spins s_m
    double tol = 1e-9;              // relative truncation tolerance

    // Maximum arrows per ring site: 1 (masep), P (qpush), unbounded (qboson).
    std::optional<long> site_capacity() const {
        switch (family) {
            case ColumnFamily::Masep: return 1;
            case ColumnFamily::QPush: return P;
            case ColumnFamily::QBoson: return std::nullopt;
        }
        return std::nullopt;
    }

    void validate() const {
        if (n < 1 || N < 1) throw std::domain_error("CylinderSpec: need n, N >= 1");
        if (!(q >= S(0) && q < S(1)))
            throw std::domain_error(
                "CylinderSpec: winding truncation needs 0 <= q < 1");
        if (!(tol > 0)) throw std::domain_error("CylinderSpec: tol must be positive");
        if (static_cast<int>(u.size()) != N)
            throw std::domain_error("CylinderSpec: need one u per ring site");
        if (static_cast<int>(sv.size()) != n)
            throw std::domain_error("CylinderSpec: need one vertical spin per column");
        if (family == ColumnFamily::QBoson) {
            if (static_cast<int>(y.size()) != n)
                throw std::domain_error(
                    "CylinderSpec: bosonic family needs one y per column");
            for (const S& uj : u)
                for (const S& ym : y)
                    if (S(uj * ym) == S(0))
                        throw std::domain_error(
                            "CylinderSpec: bosonic family needs u * y nonzero");
        } else {
            if (static_cast<int>(v.size()) != n)
                throw std::domain_error("CylinderSpec: need one v per column");
            for (const S& vm : v)
                if (vm == S(0))
                    throw std::domain_error("CylinderSpec: v must be nonzero");
            if (family == ColumnFamily::QPush && P < 1)
                throw std::domain_error("CylinderSpec: pushing family needs P >= 1");
        }
    }
};

// Number of truncated seam tuples: (cap+1)^{n(n-1)/2}, clamped on overflow.
inline long winding_state_count(int n, long cap) {
    const long lim = 1L << 60;
    long total = 1;
    for (int m = 1; m <= n; ++m)
        for (int i = m + 1; i <= n; ++i) {
            if (cap + 1 > 0 && total > lim / (cap + 1)) return lim;
            total *= cap + 1;
        }
    return total;
}

// Truncated seam tuples, one ArrowState per column, with a mixed-radix index.
struct WindingBasis {
    int n = 0;
    long cap = 0;
    std::vector<std::vector<ArrowState>> columns;                    // [m-1]
    std::vector<std::unordered_map<std::string, long>> column_index;  // [m-1]
    std::vector<long> stride;                                        // [m-1]
    long total = 1;

    static WindingBasis build(int n, long cap) {
        if (n < 1) throw std::domain_error("WindingBasis: need n >= 1");
        if (cap < 0) throw std::domain_error("WindingBasis: negative cap");
        if (winding_state_count(n, cap) >= (1L << 60))
            throw std::runtime_error("WindingBasis: state space overflows");
        WindingBasis b;
        b.n = n;
        b.cap = cap;
        b.columns.resize(n);
        b.column_index.resize(n);
        b.stride.assign(n, 1);
        for (int m = 1; m <= n; ++m) {
            std::vector<long> caps(n, 0);
            for (int i = m + 1; i <= n; ++i) caps[i - 1] = cap;
            for (const ArrowState& fin : box_states(caps)) {
                ArrowState st = ArrowState::with_saturation(fin, m);
                b.column_index[m - 1].emplace(
                    st.str(), static_cast<long>(b.columns[m - 1].size()));
                b.columns[m - 1].push_back(st);
            }
        }
        b.total = 1;
        for (int m = 1; m <= n; ++m) {
            b.stride[m - 1] = b.total;
            b.total *= static_cast<long>(b.columns[m - 1].size());
        }
        return b;
    }

    long digit(long t, int m) const {
        return (t / stride[m - 1]) % static_cast<long>(columns[m - 1].size());
    }
};

namespace detail {

// Per-site bundle of the n column-weight evaluators of a spec.
template <typename S>
struct ColumnEvaluators {
    ColumnFamily family = ColumnFamily::Masep;
    long hcap = -1;  // horizontal capacity; -1 = unbounded
    S q{0};
    std::vector<QueueParams<S>> qp;       // masep / qpush, per column
    std::vector<std::pair<S, S>> bos;     // qboson: (s_m, u_j * y_m)

    static ColumnEvaluators make(const CylinderSpec<S>& spec, int site) {
        ColumnEvaluators ev;
        ev.family = spec.family;
        ev.q = spec.q;
        const S& uj = spec.u[site - 1];
        if (spec.family == ColumnFamily::QBoson) {
            for (int m = 1; m <= spec.n; ++m)
                ev.bos.emplace_back(spec.sv[m - 1], S(uj * spec.y[m - 1]));
        } else {
            long L = spec.family == ColumnFamily::Masep ? 1 : spec.P;
            ev.hcap = L;
            for (int m = 1; m <= spec.n; ++m)
                ev.qp.push_back(QueueParams<S>::finite_spin(
                    m, L, checked_div(uj, spec.v[m - 1]), spec.sv[m - 1], spec.q));
        }
        return ev;
    }

    S weight(int m, const ArrowState& A, const ArrowState& B, const ArrowState& C,
             const ArrowState& D) const {
        if (family == ColumnFamily::QBoson)
            return qboson_weight(bos[m - 1].first, bos[m - 1].second, q, m, A, B, C, D);
        return queue_gauge_weight(qp[m - 1], A, B, C, D);
    }
};

// Core of the one-site operator: walk the n-column stack over the truncated
// seam tuples with a caller-supplied column evaluator weight(m, A, B, C, D)
// and horizontal capacity (hcap < 0 = unbounded).  Internal horizontal edges
// are forced by arrow conservation; `ent` enters the leftmost column and
// `exits` leaves the rightmost.
template <typename S, typename Weight>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> site_operator_core(
    int n, long hcap, const Weight& weight, const ArrowState& exits,
    const WindingBasis& basis, const ArrowState& ent) {
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    Mat X = Mat::Zero(basis.total, basis.total);

    std::vector<const ArrowState*> A(n);
    std::vector<long> cdig(n, 0);
    for (long a = 0; a < basis.total; ++a) {
        for (int m = 1; m <= n; ++m)
            A[m - 1] = &basis.columns[m - 1][basis.digit(a, m)];

        // Walk columns m = n..1; B is the horizontal bundle entering column m.
        std::function<void(int, const ArrowState&, const S&)> walk =
            [&](int m, const ArrowState& B, const S& acc) {
                if (hcap >= 0 && B.total() > hcap) return;
                // Colors below m may not leave column m, so any such arrival
                // would shift the seam tuple off the basis for good.
                for (int i = 1; i < m; ++i)
                    if (B.at(i) != 0) return;
                const ArrowState& Am = *A[m - 1];
                if (m == 1) {
                    // The bundle leaving the last column is the site exit.
                    ArrowState fin(n);
                    for (int i = 2; i <= n; ++i) {
                        long ci = Am.at(i) + B.at(i) - exits.at(i);
                        if (ci < 0 || ci > basis.cap) return;
                        fin.set(i, ci);
                    }
                    ArrowState C = ArrowState::with_saturation(fin, 1);
                    S w = weight(1, Am, B, C, exits);
                    if (w == S(0)) return;
                    cdig[0] = basis.column_index[0].at(C.str());
                    long c = 0;
                    for (int k = 1; k <= n; ++k) c += cdig[k - 1] * basis.stride[k - 1];
                    X(a, c) += S(acc * w);
                    return;
                }
                // Enumerate the out-bundle D of column m: colors above m are
                // pinned between conservation and the seam caps, the reservoir
                // color m is free up to the remaining horizontal capacity (or,
                // unbounded families, up to what later columns can absorb).
                ArrowState D(n);
                std::function<void(int, long)> pick = [&](int i, long dtot) {
                    if (i == m) {
                        long dmax = hcap >= 0
                                        ? hcap - dtot
                                        : exits.at(m) + (m - 1) * basis.cap;
                        for (long d = 0; d <= dmax; ++d) {
                            D.set(m, d);
                            ArrowState fin(n);
                            for (int k = m + 1; k <= n; ++k)
                                fin.set(k, Am.at(k) + B.at(k) - D.at(k));
                            ArrowState C = ArrowState::with_saturation(fin, m);
                            S w = weight(m, Am, B, C, D);
                            if (w == S(0)) continue;
                            cdig[m - 1] = basis.column_index[m - 1].at(C.str());
                            walk(m - 1, D, S(acc * w));
                        }
                        D.set(m, 0);
                        return;
                    }
                    long hi = Am.at(i) + B.at(i);
                    long lo = std::max(0L, hi - basis.cap);
                    if (hcap >= 0) hi = std::min(hi, hcap - dtot);
                    for (long d = lo; d <= hi; ++d) {
                        D.set(i, d);
                        pick(i - 1, dtot + d);
                    }
                    D.set(i, 0);
                };
                pick(n, 0);
            };
        walk(n, ent, S(1));
    }
    return X;
}

}  // namespace detail

// One-site operator over the truncated seam tuples.  The matrix element from
// the tuple below the site to the tuple above is the product of the n column
// weights, with every internal horizontal edge forced by arrow conservation;
// `exits` is the arrow bundle leaving the site to the right and `entrance`
// (default: no arrows) enters the leftmost column.
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> site_operator(
    const CylinderSpec<S>& spec, int site, const ArrowState& exits,
    const WindingBasis& basis, const ArrowState* entrance = nullptr) {
    spec.validate();
    if (site < 1 || site > spec.N)
        throw std::domain_error("site_operator: site out of range");
    if (exits.n() != spec.n || !exits.finite())
        throw std::domain_error("site_operator: exit bundle must be finite with n colors");
    if (auto c = spec.site_capacity(); c && exits.total() > *c)
        throw std::domain_error("site_operator: exit bundle exceeds site capacity");
    if (basis.n != spec.n)
        throw std::domain_error("site_operator: basis color count mismatch");
    const int n = spec.n;
    ArrowState empty(n);
    const ArrowState& ent = entrance ? *entrance : empty;
    if (ent.n() != n || !ent.finite())
        throw std::domain_error("site_operator: entrance must be finite with n colors");

    auto ev = detail::ColumnEvaluators<S>::make(spec, site);
    return detail::site_operator_core<S>(
        n, ev.hcap,
        [&ev](int m, const ArrowState& A, const ArrowState& B, const ArrowState& C,
              const ArrowState& D) { return ev.weight(m, A, B, C, D); },
        exits, basis, ent);
}

namespace detail {

// Trace of the N-site operator product at a fixed truncation basis, with the
// seam tuple below site 1 identified with the one above site N.  Operators are
// cached by (site parameter, exit bundle, entrance bundle).
template <typename S>
S truncated_trace(const CylinderSpec<S>& spec, const RingState& V,
                  const RingState* entrance, const WindingBasis& basis) {
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    std::unordered_map<std::string, Mat> cache;
    Mat M;
    for (int j = 1; j <= spec.N; ++j) {
        std::string key = scalar_str(spec.u[j - 1]) + '#' + V[j - 1].str() + '#' +
                          (entrance ? (*entrance)[j - 1].str() : std::string("-"));
        auto it = cache.find(key);
        if (it == cache.end()) {
            const ArrowState* ent = entrance ? &(*entrance)[j - 1] : nullptr;
            it = cache.emplace(key, site_operator(spec, j, V[j - 1], basis, ent))
                     .first;
        }
        if (j == 1)
            M = it->second;
        else
            M = Mat(M * it->second);
    }
    return M.trace();
}

}  // namespace detail

// Cylinder weight of one ring configuration: winding sums truncated at
// adaptively doubled caps (starting at 2) until the value is stable to
// spec.tol and the observed shell decay certifies the tail.  Throws if some
// color is absent from V (the untruncated sum diverges there), or if the caps
// hit the given ceilings before certifying.
template <typename S>
S partition(const CylinderSpec<S>& spec, const RingState& V,
            const RingState* entrance = nullptr, long state_ceiling = 4096,
            long cap_ceiling = 1024) {
    spec.validate();
    if (static_cast<int>(V.size()) != spec.N)
        throw std::domain_error("partition: need one site bundle per ring site");
    auto scap = spec.site_capacity();
    for (const ArrowState& Vj : V) {
        if (Vj.n() != spec.n || !Vj.finite())
            throw std::domain_error("partition: site bundles must be finite with n colors");
        if (scap && Vj.total() > *scap)
            throw std::domain_error("partition: site bundle exceeds site capacity");
    }
    for (int c = 1; c <= spec.n; ++c) {
        long tot = 0;
        for (const ArrowState& Vj : V) tot += Vj.at(c);
        if (tot == 0)
            throw std::domain_error(
                "partition: no arrows of color " + std::to_string(c) +
                " on the ring; the winding sum diverges unless every color appears");
    }
    if (entrance) {
        if (static_cast<int>(entrance->size()) != spec.N)
            throw std::domain_error("partition: entrance needs one bundle per site");
        for (const ArrowState& e : *entrance)
            if (e.n() != spec.n || !e.finite())
                throw std::domain_error(
                    "partition: entrance bundles must be finite with n colors");
    }

    S z_prev{};
    double delta_prev = -1.0;
    int stable_rounds = 0;
    bool have_prev = false;
    for (long cap = 2; cap <= cap_ceiling; cap *= 2) {
        if (winding_state_count(spec.n, cap) > state_ceiling)
            throw std::runtime_error(
                "partition: winding truncation needs more than " +
                std::to_string(state_ceiling) +
                " seam states before reaching the tolerance");
        WindingBasis basis = WindingBasis::build(spec.n, cap);
        S z = detail::truncated_trace(spec, V, entrance, basis);
        if (have_prev) {
            double az = std::abs(to_double(z));
            double delta = std::abs(to_double(S(z - z_prev)));
            bool stable = delta == 0.0 || (az > 0 && delta < 1e-14 * az);
            if (stable) {
                if (++stable_rounds >= 2) return z;
            } else {
                stable_rounds = 0;
                if (az > 0 && delta < spec.tol * az && delta_prev > 0) {
                    // Shell sums shrink at least geometrically once the decay
                    // sets in; extrapolate the remaining tail from the last
                    // observed ratio and accept only a certified remainder.
                    double rho = delta / delta_prev;
                    if (rho < 1 && delta * rho / (1 - rho) < spec.tol * az) return z;
                }
            }
            delta_prev = delta;
        }
        z_prev = z;
        have_prev = true;
    }
    throw std::runtime_error(
        "partition: winding sums failed to reach the tolerance within cap " +
        std::to_string(cap_ceiling));
}

// Normalized cylinder weights over one sector, in canonical state order.
template <typename S>
struct SectorDistribution {
    Sector sector;
    std::vector<RingState> states;
    std::vector<S> weight;  // truncated cylinder weights (shared constants included)
    S total{0};
    std::vector<S> prob;
};

// Evaluate and normalize the cylinder weights of every state in the sector.
// Distinct states are independent, so they are spread over `threads`.  A
// vanishing (or, float backend, non-finite) total is reported as a degenerate
// parameter choice rather than silently normalized.
template <typename S>
SectorDistribution<S> sector_distribution(const CylinderSpec<S>& spec,
                                          const Sector& sector, int threads = 1,
                                          long state_ceiling = 4096,
                                          long cap_ceiling = 1024) {
    spec.validate();
    sector.validate();
    if (sector.n != spec.n || sector.N != spec.N)
        throw std::domain_error("sector_distribution: sector shape mismatch");
    if (sector.capacity != spec.site_capacity())
        throw std::domain_error(
            "sector_distribution: sector capacity must match the weight family");
    for (long c : sector.counts)
        if (c < 1)
            throw std::domain_error(
                "sector_distribution: every color needs at least one arrow");

    SectorDistribution<S> out;
    out.sector = sector;
    out.states = enumerate_sector(sector);
    long count = static_cast<long>(out.states.size());
    out.weight.assign(count, S(0));

    auto run = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i)
            out.weight[i] =
                partition(spec, out.states[i], nullptr, state_ceiling, cap_ceiling);
    };
    if (threads <= 1 || count < 2) {
        run(0, count);
    } else {
        int nt = static_cast<int>(std::min<long>(threads, count));
        std::vector<std::future<void>> futs;
        long chunk = (count + nt - 1) / nt;
        for (int t = 0; t < nt; ++t) {
            long lo = t * chunk, hi = std::min(count, lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, run, lo, hi));
        }
        for (auto& f : futs) f.get();
    }

    out.total = S(0);
    for (const S& w : out.weight) {
        if constexpr (!is_exact_v<S>) {
            if (!std::isfinite(to_double(w)))
                throw std::runtime_error(
                    "sector_distribution: non-finite weight (degenerate parameters)");
        }
        out.total += w;
    }
    if (out.total == S(0))
        throw std::runtime_error(
            "sector_distribution: weights sum to zero (degenerate parameters)");
    out.prob.reserve(out.weight.size());
    for (const S& w : out.weight) out.prob.push_back(checked_div(w, out.total));
    return out;
}

}  // namespace ringq
