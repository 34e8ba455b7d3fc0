#pragma once

// Exact infinitesimal generators for the three ring processes (multi-species
// ASEP, colored q-Boson, colored q-PushTASEP with site capacity P), plus
// brute-force stationary distributions via exact null-space solves.  These
// serve as the ground-truth oracle against which the cylinder partition
// functions are compared.
//
// States of a ring with N sites and n colors are vectors of per-site
// occupation vectors.  The canonical ordering is lexicographic over sites,
// where each site occupation is compared by its counts read from the highest
// color down to the lowest; for site capacity 1 this coincides with comparing
// the site's color label in {0, 1, ..., n}.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ringq/arrows.hpp"
#include "ringq/scalar.hpp"
#include "ringq/states.hpp"

namespace ringq {

// Sparse rate matrix over the canonically ordered sector states.  Row = source
// state; every row sums to zero, off-diagonal entries are the jump rates.
template <typename S>
struct GeneratorMatrix {
    Sector sector;
    std::vector<RingState> states;
    Eigen::SparseMatrix<S, Eigen::RowMajor> rates;
    std::unordered_map<std::string, long> index;

    long index_of(const RingState& st) const {
        auto it = index.find(state_str(st));
        if (it == index.end())
            throw std::domain_error("GeneratorMatrix: state outside sector");
        return it->second;
    }
};

namespace detail {

// Assemble a generator from a per-row rate emitter.  row_fn(i, state, emit)
// calls emit(target_state, rate) for every jump out of state i; the diagonal
// is set to minus the row sum.  Rows can be built in parallel.
template <typename S, typename RowFn>
GeneratorMatrix<S> build_generator(const Sector& sec, long ceiling, int threads,
                                   RowFn row_fn) {
    GeneratorMatrix<S> g;
    g.sector = sec;
    g.states = enumerate_sector(sec, ceiling);
    long m = static_cast<long>(g.states.size());
    g.index.reserve(m);
    for (long i = 0; i < m; ++i) g.index.emplace(state_str(g.states[i]), i);

    using Trip = Eigen::Triplet<S>;
    auto run_rows = [&](long lo, long hi) {
        std::vector<Trip> trips;
        for (long i = lo; i < hi; ++i) {
            S out_rate(0);
            auto emit = [&](const RingState& target, const S& rate) {
                if (rate == S(0)) return;
                long j = g.index_of(target);
                if (j == i) return;  // null jumps do not change the state
                trips.emplace_back(i, j, rate);
                out_rate += rate;
            };
            row_fn(i, g.states[i], emit);
            if (out_rate != S(0)) trips.emplace_back(i, i, S(-out_rate));
        }
        return trips;
    };

    std::vector<Trip> all;
    if (threads <= 1 || m < 64) {
        all = run_rows(0, m);
    } else {
        long chunk = (m + threads - 1) / threads;
        std::vector<std::future<std::vector<Trip>>> futs;
        for (long lo = 0; lo < m; lo += chunk)
            futs.push_back(std::async(std::launch::async, run_rows, lo,
                                      std::min(lo + chunk, m)));
        for (auto& f : futs) {
            auto part = f.get();
            all.insert(all.end(), part.begin(), part.end());
        }
    }
    g.rates.resize(m, m);
    g.rates.setFromTriplets(all.begin(), all.end());
    return g;
}

}  // namespace detail

// Multi-species ASEP: adjacent swap (k, k+1) at rate 1 when the left color is
// smaller, rate q when it is larger (cyclically, including (N, 1)).
template <typename S>
GeneratorMatrix<S> masep_generator(int N, int n, const S& q, const Sector& sec,
                                   long ceiling = 500000, int threads = 1) {
    if (sec.N != N || sec.n != n)
        throw std::domain_error("masep_generator: sector mismatch");
    if (!sec.capacity || *sec.capacity != 1)
        throw std::domain_error("masep_generator: site capacity must be 1");
    return detail::build_generator<S>(
        sec, ceiling, threads, [N, q](long, const RingState& st, auto emit) {
            for (int k = 0; k < N; ++k) {
                int kp = (k + 1) % N;
                int a = site_color(st[k]), b = site_color(st[kp]);
                if (a == b) continue;
                S rate = (a < b) ? S(1) : q;
                RingState t = st;
                std::swap(t[k], t[kp]);
                emit(t, rate);
            }
        });
}

// Colored q-Boson: a particle of color i hops from site k to k-1 at rate
// u_k^{-1} (1 - q^{V(k)_i}) q^{V(k)_{i+1} + ... + V(k)_n}.
template <typename S>
GeneratorMatrix<S> qboson_generator(int N, int n, const S& q,
                                    const std::vector<S>& u, const Sector& sec,
                                    long ceiling = 500000, int threads = 1) {
    if (sec.N != N || sec.n != n)
        throw std::domain_error("qboson_generator: sector mismatch");
    if (sec.capacity)
        throw std::domain_error("qboson_generator: sites must be unbounded");
    if (static_cast<int>(u.size()) != N)
        throw std::domain_error("qboson_generator: need one u per site");
    return detail::build_generator<S>(
        sec, ceiling, threads, [N, n, q, &u](long, const RingState& st, auto emit) {
            for (int k = 0; k < N; ++k) {
                int km = (k + N - 1) % N;
                for (int i = 1; i <= n; ++i) {
                    long vi = st[k].at(i);
                    if (vi == 0) continue;
                    long tail = st[k].range_total(i + 1, n);
                    S rate = checked_div(
                        S(S(S(1) - pow_int(q, vi)) * pow_int(q, tail)), u[k]);
                    if (rate == S(0)) continue;
                    RingState t = st;
                    t[k].add(i, -1);
                    t[km].add(i, 1);
                    emit(t, rate);
                }
            }
        });
}

namespace detail {

// One instantaneous q-PushTASEP cascade: an active particle of some color
// moves rightward (possibly winding), displacing particles as it goes, until
// it deactivates.  Starting from (cfg, color, pos) the absorption
// probabilities over final configurations solve a finite linear system; the
// geometric sums over ring windings are captured exactly by the solve.
//
// Branch probabilities at a site holding B when color c arrives:
//   stay:           1 - q^{P - |B|}
//   displace d < c: q^{P - B_{[d,n]}} - q^{P - B_{[d+1,n]}}   (zero if B_d = 0)
//   pass through:   q^{P - B_{[c,n]}}
// These expressions are polynomial in q and remain valid at q = 0, where they
// reduce to the deterministic displacement rules.
template <typename S>
std::vector<std::pair<RingState, S>> qpush_cascade(const RingState& start_cfg,
                                                   int start_color, int start_pos,
                                                   const S& q, long P,
                                                   long node_ceiling) {
    struct Node {
        RingState cfg;
        int color;
        int pos;
    };
    int N = static_cast<int>(start_cfg.size());
    int n = start_cfg.empty() ? 0 : start_cfg[0].n();
    auto node_key = [](const RingState& cfg, int c, int p) {
        return state_str(cfg) + "#" + std::to_string(c) + "@" + std::to_string(p);
    };

    std::vector<Node> nodes;
    std::unordered_map<std::string, long> nidx;
    auto intern = [&](RingState cfg, int c, int p) {
        std::string key = node_key(cfg, c, p);
        auto it = nidx.find(key);
        if (it != nidx.end()) return it->second;
        long id = static_cast<long>(nodes.size());
        if (id >= node_ceiling)
            throw std::runtime_error("qpush_cascade: node count exceeds ceiling");
        nidx.emplace(std::move(key), id);
        nodes.push_back(Node{std::move(cfg), c, p});
        return id;
    };

    // trans[i]: (j, prob) transitions; absorb[i]: (final config, prob).
    std::vector<std::vector<std::pair<long, S>>> trans;
    std::vector<std::vector<std::pair<RingState, S>>> absorb;
    intern(start_cfg, start_color, start_pos);
    for (long i = 0; i < static_cast<long>(nodes.size()); ++i) {
        // nodes may grow while iterating; take copies of the fields we need
        RingState cfg = nodes[i].cfg;
        int c = nodes[i].color;
        int p = nodes[i].pos;
        const ArrowState& B = cfg[p];
        trans.emplace_back();
        absorb.emplace_back();
        S p_stay = S(S(1) - pow_int(q, P - B.total()));
        if (p_stay != S(0)) {
            RingState fin = cfg;
            fin[p].add(c, 1);
            absorb[i].emplace_back(std::move(fin), p_stay);
        }
        for (int d = 1; d < c; ++d) {
            if (B.at(d) == 0) continue;
            S pd = S(pow_int(q, P - B.range_total(d, n)) -
                     pow_int(q, P - B.range_total(d + 1, n)));
            if (pd == S(0)) continue;
            RingState next = cfg;
            next[p].add(c, 1);
            next[p].add(d, -1);
            long j = intern(std::move(next), d, (p + 1) % N);
            trans[i].emplace_back(j, pd);
        }
        S p_pass = pow_int(q, P - B.range_total(c, n));
        if (p_pass != S(0)) {
            long j = intern(cfg, c, (p + 1) % N);
            trans[i].emplace_back(j, p_pass);
        }
    }

    long m = static_cast<long>(nodes.size());
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
    // Expected visit counts y to each node starting from node 0 solve
    // (I - Q)^T y = e_0; the chain absorbs almost surely, so I - Q is
    // invertible and the winding sums are finite.
    Mat A = Mat::Identity(m, m);
    for (long i = 0; i < m; ++i)
        for (const auto& [j, pr] : trans[i]) A(j, i) -= pr;
    Vec b = Vec::Zero(m);
    b(0) = S(1);
    Eigen::FullPivLU<Mat> lu(A);
    Vec y = lu.solve(b);

    std::unordered_map<std::string, long> fidx;
    std::vector<std::pair<RingState, S>> result;
    for (long i = 0; i < m; ++i) {
        if (y(i) == S(0)) continue;
        for (const auto& [fin, pr] : absorb[i]) {
            std::string key = state_str(fin);
            auto it = fidx.find(key);
            if (it == fidx.end()) {
                fidx.emplace(std::move(key), static_cast<long>(result.size()));
                result.emplace_back(fin, S(y(i) * pr));
            } else {
                result[it->second].second += y(i) * pr;
            }
        }
    }
    return result;
}

}  // namespace detail

// Colored q-PushTASEP with per-site capacity P.  A particle of color j at
// site k activates at rate u_k^{-1} (q^{-A_j} - 1) q^{P - A_{[j+1,n]}} and
// triggers an instantaneous rightward cascade; the macroscopic jump rate is
// the activation rate times the total probability of all cascades mapping the
// state to the target, with ring windings summed exactly.  Valid for all
// q in [0,1); at q = 0 the dynamics degenerates to the deterministic
// displacement rules (and the chain is typically not irreducible).
template <typename S>
GeneratorMatrix<S> qpush_generator(int N, int n, const S& q, long P,
                                   const std::vector<S>& u, const Sector& sec,
                                   long ceiling = 500000, int threads = 1) {
    if (sec.N != N || sec.n != n)
        throw std::domain_error("qpush_generator: sector mismatch");
    if (!sec.capacity || *sec.capacity != P)
        throw std::domain_error("qpush_generator: sector capacity must equal P");
    if (static_cast<int>(u.size()) != N)
        throw std::domain_error("qpush_generator: need one u per site");
    if (N < 2) throw std::domain_error("qpush_generator: need N >= 2");
    return detail::build_generator<S>(
        sec, ceiling, threads,
        [N, n, q, P, &u, ceiling](long, const RingState& st, auto emit) {
            for (int k = 0; k < N; ++k) {
                const ArrowState& A = st[k];
                for (int j = 1; j <= n; ++j) {
                    if (A.at(j) == 0) continue;
                    S act = checked_div(
                        S(pow_int(q, P - A.range_total(j, n)) -
                          pow_int(q, P - A.range_total(j + 1, n))),
                        u[k]);
                    if (act == S(0)) continue;
                    RingState red = st;
                    red[k].add(j, -1);
                    auto finals = detail::qpush_cascade(red, j, (k + 1) % N, q,
                                                        P, ceiling);
                    for (const auto& [fin, pr] : finals)
                        emit(fin, S(act * pr));
                }
            }
        });
}

// ---------------------------------------------------------------------------
// Stationary distributions.

template <typename S>
struct StationaryResult {
    std::vector<S> pi;          // aligned with the generator's state order
    std::vector<long> support;  // indices of the recurrent class
    bool irreducible = true;
};

namespace detail {

// Iterative Tarjan strongly-connected components on the jump graph.
inline std::vector<long> scc_components(
    const std::vector<std::vector<long>>& adj, long& count) {
    long m = static_cast<long>(adj.size());
    std::vector<long> comp(m, -1), low(m, 0), disc(m, -1), stk;
    std::vector<bool> on(m, false);
    long timer = 0;
    count = 0;
    std::vector<std::pair<long, size_t>> call;
    for (long s = 0; s < m; ++s) {
        if (disc[s] != -1) continue;
        call.emplace_back(s, 0);
        while (!call.empty()) {
            auto& [v, ei] = call.back();
            if (ei == 0) {
                disc[v] = low[v] = timer++;
                stk.push_back(v);
                on[v] = true;
            }
            bool descended = false;
            while (ei < adj[v].size()) {
                long w = adj[v][ei++];
                if (disc[w] == -1) {
                    call.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on[w]) low[v] = std::min(low[v], disc[w]);
            }
            if (descended) continue;
            if (low[v] == disc[v]) {
                while (true) {
                    long w = stk.back();
                    stk.pop_back();
                    on[w] = false;
                    comp[w] = count;
                    if (w == v) break;
                }
                ++count;
            }
            long vv = v;
            call.pop_back();
            if (!call.empty())
                low[call.back().first] = std::min(low[call.back().first], low[vv]);
        }
    }
    return comp;
}

}  // namespace detail

// The unique stationary probability vector pi with pi G = 0.  If the chain is
// not irreducible the computation is restricted to the terminal recurrent
// class; multiple terminal classes raise an error listing them.
template <typename S>
StationaryResult<S> stationary_exact(const GeneratorMatrix<S>& g) {
    long m = static_cast<long>(g.states.size());
    if (m == 0) throw std::domain_error("stationary_exact: empty sector");

    std::vector<std::vector<long>> adj(m);
    for (long i = 0; i < m; ++i)
        for (typename Eigen::SparseMatrix<S, Eigen::RowMajor>::InnerIterator it(
                 g.rates, i);
             it; ++it)
            if (it.col() != i && it.value() != S(0))
                adj[i].push_back(it.col());

    long ncomp = 0;
    std::vector<long> comp = detail::scc_components(adj, ncomp);
    std::vector<bool> terminal(ncomp, true);
    for (long i = 0; i < m; ++i)
        for (long j : adj[i])
            if (comp[j] != comp[i]) terminal[comp[i]] = false;

    std::vector<long> term_ids;
    for (long c = 0; c < ncomp; ++c)
        if (terminal[c]) term_ids.push_back(c);
    if (term_ids.size() != 1) {
        std::ostringstream msg;
        msg << "stationary_exact: " << term_ids.size()
            << " recurrent classes:";
        for (long c : term_ids) {
            long sz = 0;
            long sample = -1;
            for (long i = 0; i < m; ++i)
                if (comp[i] == c) {
                    ++sz;
                    if (sample < 0) sample = i;
                }
            msg << " {size " << sz << ", e.g. " << state_str(g.states[sample])
                << "}";
        }
        throw std::runtime_error(msg.str());
    }

    StationaryResult<S> res;
    res.irreducible = (ncomp == 1);
    for (long i = 0; i < m; ++i)
        if (comp[i] == term_ids[0]) res.support.push_back(i);
    long mc = static_cast<long>(res.support.size());
    std::vector<long> pos(m, -1);
    for (long r = 0; r < mc; ++r) pos[res.support[r]] = r;

    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
    Mat A = Mat::Zero(mc, mc);  // restricted G^T
    for (long i = 0; i < m; ++i) {
        if (pos[i] < 0) continue;
        for (typename Eigen::SparseMatrix<S, Eigen::RowMajor>::InnerIterator it(
                 g.rates, i);
             it; ++it)
            if (pos[it.col()] >= 0) A(pos[it.col()], pos[i]) += it.value();
    }

    Vec x;
    Eigen::FullPivLU<Mat> lu(A);
    Mat ker = lu.kernel();
    if (ker.cols() == 1) {
        x = ker.col(0);
    } else {
        // Float fallback: pin the normalization row and solve directly.
        Mat B = A;
        for (long c = 0; c < mc; ++c) B(mc - 1, c) = S(1);
        Vec rhs = Vec::Zero(mc);
        rhs(mc - 1) = S(1);
        x = Eigen::FullPivLU<Mat>(B).solve(rhs);
    }
    S total(0);
    for (long r = 0; r < mc; ++r) total += x(r);
    if (total == S(0)) throw std::runtime_error("stationary_exact: degenerate solve");
    if (total < S(0))
        for (long r = 0; r < mc; ++r) x(r) = S(-x(r));
    total = abs_val(total);

    res.pi.assign(m, S(0));
    for (long r = 0; r < mc; ++r) res.pi[res.support[r]] = S(x(r) / total);
    return res;
}

}  // namespace ringq
