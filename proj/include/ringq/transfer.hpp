#pragma once
// Transfer operators on the ring and their stationarity checks.
//
//   * twisted_operator  — cyclic product of two-site swap factors on the
//                         single-occupancy ring
//   * straight_operator — auxiliary spin-1/2 line crossing every site of a
//                         higher-spin ring
//   * SiteStack / seam_row_value — mixed-spin ring measure rows, with the
//                         seam winding sum closed in exact arithmetic via a
//                         detected linear recurrence
//   * check_twisted_stationarity / check_straight_stationarity /
//     twisted_commutation_residual — the invariance identities, exact to the
//                         last bit on the rational backend
//   * poisson_limit_residual — convergence of high powers of the operators,
//                         near the degenerate parameter point, to the matrix
//                         exponentials of the continuous-time generators
//
// Matrix convention throughout: row = source state, rows sum to one.

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

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ringq/arrows.hpp"
#include "ringq/cylinder.hpp"
#include "ringq/generators.hpp"
#include "ringq/scalar.hpp"
#include "ringq/states.hpp"
#include "ringq/weights.hpp"

namespace ringq {

// ---------------------------------------------------------------------------
// Operator container
// ---------------------------------------------------------------------------

// Dense transfer operator over an explicit state list.  When has_aux is set,
// states[i][0] is the auxiliary line and the remaining entries are the ring
// sites; otherwise states[i][j] is ring site j+1.
template <typename S>
struct TransferOperator {
    std::string kind;
    int N = 0, n = 0;
    S q{0};
    bool has_aux = false;
    std::vector<RingState> states;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> matrix;
    std::unordered_map<std::string, long> index;

    long index_of(const RingState& st) const {
        auto it = index.find(state_str(st));
        if (it == index.end())
            throw std::domain_error("TransferOperator: state outside the space");
        return it->second;
    }
};

namespace detail {

inline void index_states(std::vector<RingState>& states,
                         std::unordered_map<std::string, long>& index) {
    index.reserve(states.size());
    for (long i = 0; i < static_cast<long>(states.size()); ++i)
        index.emplace(state_str(states[i]), i);
}

// All single-occupancy colorings of N ring sites, site 1 most significant.
inline std::vector<RingState> single_occupancy_states(int N, int n) {
    long total = 1;
    for (int j = 0; j < N; ++j) {
        total *= (n + 1);
        if (total > 200000)
            throw std::runtime_error("transfer: state count exceeds ceiling");
    }
    std::vector<RingState> out;
    out.reserve(total);
    RingState cur(N, ArrowState(n));
    std::function<void(int)> rec = [&](int j) {
        if (j == N) {
            out.push_back(cur);
            return;
        }
        for (int c = 0; c <= n; ++c) {
            cur[j] = c == 0 ? ArrowState(n) : ArrowState::unit(n, c);
            rec(j + 1);
        }
    };
    rec(0);
    return out;
}

// All bundles over n colors with total <= cap.
inline std::vector<ArrowState> bundles_up_to(int n, long cap) {
    std::vector<ArrowState> out;
    ArrowState cur(n);
    std::function<void(int, long)> rec = [&](int c, long rem) {
        if (c > n) {
            out.push_back(cur);
            return;
        }
        for (long k = 0; k <= rem; ++k) {
            cur.set(c, k);
            rec(c + 1, rem - k);
        }
        cur.set(c, 0);
    };
    rec(1, cap);
    return out;
}

// Joint states [aux, site 1..N]: auxiliary line holding at most one arrow,
// sites holding up to site_cap each, total arrow count <= total_cap.
inline std::vector<RingState> aux_line_states(int N, int n, long total_cap,
                                              long site_cap) {
    std::vector<RingState> out;
    RingState cur(N + 1, ArrowState(n));
    std::function<void(int, long)> rec = [&](int j, long rem) {
        if (j == N + 1) {
            out.push_back(cur);
            return;
        }
        long room = site_cap >= 0 ? std::min(rem, site_cap) : rem;
        for (const ArrowState& b : bundles_up_to(n, room)) {
            cur[j] = b;
            rec(j + 1, rem - b.total());
        }
        if (out.size() > 200000)
            throw std::runtime_error("transfer: state count exceeds ceiling");
    };
    for (int c = 0; c <= n; ++c) {
        cur[0] = c == 0 ? ArrowState(n) : ArrowState::unit(n, c);
        rec(1, total_cap - cur[0].total());
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Swap factors and the twisted operator
// ---------------------------------------------------------------------------

// Single swap factor on ordered color pairs, index i*(n+1)+j for (i, j).
// Row = source pair, rows sum to one.
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> pair_swap_matrix(int n,
                                                                  const S& z,
                                                                  const S& q) {
    if (n < 1) throw std::domain_error("pair_swap_matrix: need n >= 1");
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    int d = n + 1;
    Mat X = Mat::Zero(d * d, d * d);
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            for (int k = 0; k <= n; ++k)
                for (int l = 0; l <= n; ++l) {
                    S w = r_weight(z, q, a, b, k, l);
                    if (w != S(0)) X(a * d + b, l * d + k) += w;
                }
    return X;
}

// Jump rates of the swap factor near z = 1: from (i, j) the pair swaps to
// (j, i) at rate 1 when i < j and rate q when i > j.  Same pair indexing as
// pair_swap_matrix; rows sum to zero.
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> pair_swap_rates(int n,
                                                                 const S& q) {
    if (n < 1) throw std::domain_error("pair_swap_rates: need n >= 1");
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    int d = n + 1;
    Mat X = Mat::Zero(d * d, d * d);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            S r = i < j ? S(1) : q;
            X(i * d + j, j * d + i) += r;
            X(i * d + j, i * d + j) -= r;
        }
    return X;
}

// Cyclic product of swap factors with common ratio z = u1 / u, one factor per
// adjacent pair (j, j+1) and finally (N, 1), applied in that order.  Acts on
// the full single-occupancy space; color counts are conserved.
template <typename S>
TransferOperator<S> twisted_operator(int N, int n, const S& q, const S& u,
                                     const S& u1) {
    if (N < 2) throw std::domain_error("twisted_operator: need N >= 2");
    if (n < 1) throw std::domain_error("twisted_operator: need n >= 1");
    S z = checked_div(u1, u);
    TransferOperator<S> op;
    op.kind = "twisted";
    op.N = N;
    op.n = n;
    op.q = q;
    op.states = detail::single_occupancy_states(N, n);
    detail::index_states(op.states, op.index);

    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    long m = static_cast<long>(op.states.size());
    auto factor = [&](int a, int b) {
        Mat F = Mat::Zero(m, m);
        for (long i = 0; i < m; ++i) {
            const RingState& st = op.states[i];
            int ca = site_color(st[a - 1]), cb = site_color(st[b - 1]);
            for (int k = 0; k <= n; ++k)
                for (int l = 0; l <= n; ++l) {
                    S w = r_weight(z, q, ca, cb, k, l);
                    if (w == S(0)) continue;
                    RingState t = st;
                    t[a - 1] = l == 0 ? ArrowState(n) : ArrowState::unit(n, l);
                    t[b - 1] = k == 0 ? ArrowState(n) : ArrowState::unit(n, k);
                    F(i, op.index_of(t)) += w;
                }
        }
        return F;
    };
    Mat M = factor(1, 2);
    for (int j = 2; j <= N; ++j) M = Mat(M * factor(j, j % N + 1));
    op.matrix = M;
    return op;
}

// ---------------------------------------------------------------------------
// Straight operator: auxiliary spin-1/2 line
// ---------------------------------------------------------------------------

// Product of one-column crossings carrying an auxiliary spin-1/2 line across
// every ring site, site N first.  Per-site parameters are given through the
// square of the site spin (sigma_j) and the site combo (w_j = spin * spectral);
// the crossing at site j then uses spin^2 = sigma_j and spin * spectral =
// x * sigma_j / w_j.  States are the joint [aux, sites] configurations with
// total arrow count <= total_cap, which the crossings conserve.
template <typename S>
TransferOperator<S> straight_operator_combos(int N, int n, const S& q, const S& x,
                                             const std::vector<S>& sigma,
                                             const std::vector<S>& w,
                                             long total_cap) {
    if (N < 1) throw std::domain_error("straight_operator: need N >= 1");
    if (n < 1) throw std::domain_error("straight_operator: need n >= 1");
    if (q == S(0))
        throw std::domain_error("straight_operator: q must be nonzero");
    if (static_cast<int>(sigma.size()) != N || static_cast<int>(w.size()) != N)
        throw std::domain_error("straight_operator: need sigma, w per site");
    if (total_cap < 0)
        throw std::domain_error("straight_operator: negative total cap");
    TransferOperator<S> op;
    op.kind = "straight";
    op.N = N;
    op.n = n;
    op.q = q;
    op.has_aux = true;
    op.states = detail::aux_line_states(N, n, total_cap, -1);
    detail::index_states(op.states, op.index);

    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    long m = static_cast<long>(op.states.size());
    auto factor = [&](int j) {
        S s_x = checked_div(S(x * sigma[j - 1]), w[j - 1]);
        Mat F = Mat::Zero(m, m);
        for (long i = 0; i < m; ++i) {
            const RingState& st = op.states[i];
            int k = site_color(st[0]);
            const ArrowState& A = st[j];
            // The out-edge color l forces the site update by conservation.
            for (int l = 0; l <= n; ++l) {
                ArrowState B = A;
                if (k >= 1) B.add(k, 1);
                if (l >= 1) {
                    if (B.at(l) == 0) continue;
                    B.add(l, -1);
                }
                S wgt = l_weight_ss(sigma[j - 1], s_x, q, A, k, B, l);
                if (wgt == S(0)) continue;
                RingState t = st;
                t[0] = l == 0 ? ArrowState(n) : ArrowState::unit(n, l);
                t[j] = B;
                F(i, op.index_of(t)) += wgt;
            }
        }
        return F;
    };
    Mat M = factor(N);
    for (int j = N - 1; j >= 1; --j) M = Mat(M * factor(j));
    op.matrix = M;
    return op;
}

// Same operator in raw per-site parameters: spectral u_j and spin s_j on the
// ring sites, spectral x on the auxiliary line.
template <typename S>
TransferOperator<S> straight_operator(int N, int n, const S& q, const S& x,
                                      const std::vector<S>& u,
                                      const std::vector<S>& sh,
                                      long total_cap) {
    if (static_cast<int>(u.size()) != N || static_cast<int>(sh.size()) != N)
        throw std::domain_error("straight_operator: need u, s per site");
    std::vector<S> sigma, w;
    for (int j = 0; j < N; ++j) {
        sigma.push_back(S(sh[j] * sh[j]));
        w.push_back(S(sh[j] * u[j]));
    }
    return straight_operator_combos(N, n, q, x, sigma, w, total_cap);
}

// Auxiliary-line operator for the finite-capacity pushing family: the line
// crosses sites 1..N in increasing order, each crossing being a fused vertex
// with horizontal capacity P (the site) and a spin-1/2 vertical line (the
// aux).  xs[j-1] is the fused spectral argument at site j.
template <typename S>
TransferOperator<S> qpush_aux_operator(int N, int n, const S& q, long P,
                                       const std::vector<S>& xs,
                                       long total_cap) {
    if (N < 1) throw std::domain_error("qpush_aux_operator: need N >= 1");
    if (n < 1) throw std::domain_error("qpush_aux_operator: need n >= 1");
    if (P < 1) throw std::domain_error("qpush_aux_operator: need P >= 1");
    if (static_cast<int>(xs.size()) != N)
        throw std::domain_error("qpush_aux_operator: need one x per site");
    TransferOperator<S> op;
    op.kind = "qpush-aux";
    op.N = N;
    op.n = n;
    op.q = q;
    op.has_aux = true;
    op.states = detail::aux_line_states(N, n, total_cap, P);
    detail::index_states(op.states, op.index);

    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    long m = static_cast<long>(op.states.size());
    auto factor = [&](int j) {
        FusedParams<S> p(xs[j - 1], pow_int(q, P), q, q);
        Mat F = Mat::Zero(m, m);
        for (long i = 0; i < m; ++i) {
            const RingState& st = op.states[i];
            const ArrowState& e = st[0];
            const ArrowState& A = st[j];
            for (int l = 0; l <= n; ++l) {
                ArrowState ep = l == 0 ? ArrowState(n) : ArrowState::unit(n, l);
                ArrowState D = A;
                if (e.total() > 0) D.add(site_color(e), 1);
                if (l >= 1) {
                    if (D.at(l) == 0) continue;
                    D.add(l, -1);
                }
                if (D.total() > P) continue;
                S wgt = fused_weight(p, e, A, ep, D);
                if (wgt == S(0)) continue;
                RingState t = st;
                t[0] = ep;
                t[j] = D;
                F(i, op.index_of(t)) += wgt;
            }
        }
        return F;
    };
    Mat M = factor(1);
    for (int j = 2; j <= N; ++j) M = Mat(M * factor(j));
    op.matrix = M;
    return op;
}

// ---------------------------------------------------------------------------
// Mixed-spin site stacks and exact seam summation
// ---------------------------------------------------------------------------

// Raw column stack of one ring site: n queue columns sharing a horizontal
// line, evaluated without gauge or normalization so that the state-independent
// constants drop out of every identity.
template <typename S>
struct SiteStack {
    long hcap = -1;  // horizontal capacity; -1 = unbounded
    std::vector<QueueParams<S>> cols;

    // Site whose horizontal line holds at most one arrow (combo w = spin *
    // spectral); the only stack shape reaching q = 0.
    static SiteStack spin_half(int n, const S& w, const std::vector<S>& v,
                               const std::vector<S>& sv, const S& q) {
        SiteStack st;
        st.hcap = 1;
        for (int m = 1; m <= n; ++m)
            st.cols.push_back(QueueParams<S>::finite_spin(
                m, 1, checked_div(w, v[m - 1]), sv[m - 1], q));
        return st;
    }

    // Site of arbitrary spin, parameterized by sigma = spin^2 and the combo
    // w = spin * spectral.  A sigma equal to a negative power of q induces the
    // matching finite horizontal capacity.
    static SiteStack generic(int n, const S& sigma, const S& w,
                             const std::vector<S>& v, const std::vector<S>& sv,
                             const S& q) {
        SiteStack st;
        for (int m = 1; m <= n; ++m)
            st.cols.push_back(QueueParams<S>::combos(
                m, sigma, checked_div(w, v[m - 1]), sv[m - 1], q));
        if (st.cols[0].cap_h) st.hcap = *st.cols[0].cap_h;
        return st;
    }

    S weight(int m, const ArrowState& A, const ArrowState& B,
             const ArrowState& C, const ArrowState& D) const {
        return queue_weight_stripped(cols[m - 1], A, B, C, D);
    }
};

namespace detail {

// Diagonal trace slices of the ring of stacks, indexed by the free seam
// digit t (the count of the top color stored below the seam in the first
// column).  Only rings with one or two colors have a one-dimensional seam;
// the basis is padded so every slice up to tmax is computed without clipping.
template <typename S>
std::vector<S> seam_slices(const std::vector<SiteStack<S>>& stacks,
                           const RingState& V, const RingState* entrance,
                           int n, long tmax) {
    if (n < 1 || n > 2)
        throw std::domain_error(
            "seam_slices: seam summation handles at most two colors");
    long arrows = 0;
    for (const ArrowState& b : V) arrows += b.total();
    if (entrance)
        for (const ArrowState& b : *entrance) arrows += b.total();
    long pad = (n == 1) ? 0 : tmax + arrows + 2;
    WindingBasis basis = WindingBasis::build(n, pad);

    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    ArrowState empty(n);
    Mat M;
    for (size_t j = 0; j < stacks.size(); ++j) {
        const ArrowState& ent = entrance ? (*entrance)[j] : empty;
        const SiteStack<S>& sk = stacks[j];
        Mat X = site_operator_core<S>(
            n, sk.hcap,
            [&sk](int m, const ArrowState& A, const ArrowState& B,
                  const ArrowState& C, const ArrowState& D) {
                return sk.weight(m, A, B, C, D);
            },
            V[j], basis, ent);
        M = j == 0 ? X : Mat(M * X);
    }
    if (n == 1) return {M(0, 0)};
    std::vector<S> f;
    f.reserve(tmax + 1);
    for (long t = 0; t <= tmax; ++t) f.push_back(M(t, t));
    return f;
}

// Solve A x = b by Gaussian elimination with a nonzero pivot; returns false
// when the system is singular.  Exact on rational scalars.
template <typename S>
bool solve_linear(std::vector<std::vector<S>> A, std::vector<S> b,
                  std::vector<S>& x) {
    int r = static_cast<int>(A.size());
    for (int c = 0; c < r; ++c) {
        int piv = -1;
        for (int i = c; i < r; ++i)
            if (A[i][c] != S(0)) {
                piv = i;
                break;
            }
        if (piv < 0) return false;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (int i = c + 1; i < r; ++i) {
            if (A[i][c] == S(0)) continue;
            S f = checked_div(A[i][c], A[c][c]);
            for (int k = c; k < r; ++k) A[i][k] = S(A[i][k] - f * A[c][k]);
            b[i] = S(b[i] - f * b[c]);
        }
    }
    x.assign(r, S(0));
    for (int i = r - 1; i >= 0; --i) {
        S acc = b[i];
        for (int k = i + 1; k < r; ++k) acc = S(acc - A[i][k] * x[k]);
        x[i] = checked_div(acc, A[i][i]);
    }
    return true;
}

// Detected linear recurrence f(t + r) = sum_j a_j f(t + j - 1), valid from
// t >= t0, fitted on the leading slices and verified exactly on all the rest.
template <typename S>
struct SeamRecurrence {
    int order = 0;
    long t0 = 1;
    std::vector<S> coeff;
};

template <typename S>
std::optional<SeamRecurrence<S>> find_recurrence(const std::vector<S>& f,
                                                 int max_order) {
    long len = static_cast<long>(f.size());
    for (long t0 = 1; t0 <= 3; ++t0)
        for (int r = 1; r <= max_order; ++r) {
            if (t0 + 2 * r + 1 > len) continue;
            std::vector<std::vector<S>> A;
            std::vector<S> b;
            for (long i = t0; i < t0 + r; ++i) {
                std::vector<S> row;
                for (int j = 1; j <= r; ++j) row.push_back(f[i + j - 1]);
                A.push_back(row);
                b.push_back(f[i + r]);
            }
            std::vector<S> a;
            if (!solve_linear(A, b, a)) continue;
            bool ok = true;
            for (long i = t0; i + r < len && ok; ++i) {
                S acc(0);
                for (int j = 1; j <= r; ++j) acc += S(a[j - 1] * f[i + j - 1]);
                if (acc != f[i + r]) ok = false;
            }
            if (ok) return SeamRecurrence<S>{r, t0, a};
        }
    return std::nullopt;
}

// Exact sum of all slices t >= 0 of a sequence that settles into a detected
// recurrence whose characteristic roots lie inside the unit disc.
template <typename S>
S sum_series_exact(const std::vector<S>& f) {
    long len = static_cast<long>(f.size());
    if (len == 0) throw std::domain_error("sum_series_exact: empty sequence");
    bool tail_zero = true;
    for (long t = 1; t < len; ++t)
        if (f[t] != S(0)) tail_zero = false;
    if (tail_zero) return f[0];
    auto rec = find_recurrence(f, 5);
    if (!rec)
        throw std::runtime_error(
            "sum_series_exact: no linear recurrence matches the seam slices");
    // A contracting tail keeps late slices no larger than early ones.
    double early = 0, late = 0;
    for (long t = 1; t <= 3 && t < len; ++t)
        early = std::max(early, std::abs(to_double(f[t])));
    for (long t = std::max<long>(1, len - 3); t < len; ++t)
        late = std::max(late, std::abs(to_double(f[t])));
    if (late > early * (1 + 1e-9) + 1e-300)
        throw std::runtime_error("sum_series_exact: seam slices do not decay");
    S asum(0);
    for (const S& a : rec->coeff) asum += a;
    if (asum == S(1))
        throw std::runtime_error(
            "sum_series_exact: recurrence has a unit characteristic root");
    // Tail over t >= t0 from the recurrence: with partial sums F_k of the
    // shifted slices g(i) = f(t0 - 1 + i),
    //   (1 - sum a_j) * tail = F_r - sum_j a_j F_{j-1}.
    int r = rec->order;
    std::vector<S> F(r + 1, S(0));
    for (int k = 1; k <= r; ++k) F[k] = S(F[k - 1] + f[rec->t0 - 1 + k]);
    S rhs = F[r];
    for (int j = 1; j <= r; ++j) rhs = S(rhs - rec->coeff[j - 1] * F[j - 1]);
    S tail = checked_div(rhs, S(S(1) - asum));
    S head(0);
    for (long t = 0; t < rec->t0; ++t) head += f[t];
    return S(head + tail);
}

// Floating-point seam sum: accumulate slices until the geometric tail bound
// drops below the working precision, growing the window as needed.
template <typename S>
S sum_series_float(const std::vector<SiteStack<S>>& stacks, const RingState& V,
                   const RingState* entrance, int n) {
    S prev{0};
    bool have_prev = false;
    for (long tmax = 48; tmax <= 768; tmax *= 2) {
        auto f = seam_slices(stacks, V, entrance, n, tmax);
        S tot{0};
        for (const S& v : f) tot += v;
        double ratio = 0;
        for (long t = static_cast<long>(f.size()) - 3;
             t < static_cast<long>(f.size()); ++t) {
            double a = std::abs(to_double(f[t - 1]));
            double b = std::abs(to_double(f[t]));
            if (a > 0) ratio = std::max(ratio, b / a);
        }
        double tail = std::abs(to_double(f.back()));
        if (ratio < 0.999) tail = tail * ratio / (1 - ratio);
        double scale = std::abs(to_double(tot)) + 1e-300;
        bool stable = have_prev && std::abs(to_double(S(tot - prev))) <= 1e-13 * scale;
        if ((tail <= 1e-15 * scale && ratio < 0.999) || stable) return tot;
        prev = tot;
        have_prev = true;
    }
    throw std::runtime_error("seam sum did not converge");
}

}  // namespace detail

// Seam-summed ring measure row: the weight of exit bundles V (with optional
// per-site entrance bundles) under the ring of raw stacks, with the winding
// sum over the seam closed exactly on rational scalars and to working
// precision on floating point.
template <typename S>
S seam_row_value(const std::vector<SiteStack<S>>& stacks, const RingState& V,
                 const RingState* entrance = nullptr) {
    if (stacks.empty()) throw std::domain_error("seam_row_value: no sites");
    int n = static_cast<int>(stacks[0].cols.size());
    if (static_cast<int>(V.size()) != static_cast<int>(stacks.size()))
        throw std::domain_error("seam_row_value: need one exit bundle per site");
    if (entrance && entrance->size() != V.size())
        throw std::domain_error(
            "seam_row_value: need one entrance bundle per site");
    if constexpr (is_exact_v<S>) {
        auto f = detail::seam_slices(stacks, V, entrance, n, 17);
        return detail::sum_series_exact(f);
    } else {
        return detail::sum_series_float(stacks, V, entrance, n);
    }
}

// ---------------------------------------------------------------------------
// Stationarity checks
// ---------------------------------------------------------------------------

struct StationarityReport {
    bool exact_zero = false;  // every residual vanished identically
    double residual = 0;      // max residual relative to the sector row scale
    long states = 0;
    std::string worst;
};

namespace detail {

template <typename S>
void fold_residual(StationarityReport& rep, const S& res, const S& scale,
                   const RingState& st) {
    if constexpr (is_exact_v<S>) {
        if (res != S(0)) rep.exact_zero = false;
    } else {
        rep.exact_zero = false;
    }
    double rel = std::abs(to_double(res)) /
                 std::max(std::abs(to_double(scale)), 1e-300);
    if (rel > rep.residual) {
        rep.residual = rel;
        rep.worst = state_str(st);
    }
}

// Sectors of single-occupancy ring states where every color shows up.
inline std::vector<std::vector<long>> full_sectors(int N, int n) {
    std::vector<std::vector<long>> out;
    std::vector<long> cur(n, 0);
    std::function<void(int, long)> rec = [&](int c, long used) {
        if (c > n) {
            out.push_back(cur);
            return;
        }
        for (long k = 1; used + k + (n - c) <= N; ++k) {
            cur[c - 1] = k;
            rec(c + 1, used + k);
        }
    };
    rec(1, 0);
    return out;
}

// Evaluate seam rows for a batch of (exit, entrance) pairs, optionally in
// parallel.
template <typename S>
std::vector<S> seam_rows(const std::vector<SiteStack<S>>& stacks,
                         const std::vector<RingState>& exits,
                         const RingState* entrance, int threads) {
    long m = static_cast<long>(exits.size());
    std::vector<S> vals(m);
    auto run = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i)
            vals[i] = seam_row_value(stacks, exits[i], entrance);
    };
    if (threads <= 1 || m < 4) {
        run(0, m);
    } else {
        std::vector<std::future<void>> futs;
        long chunk = (m + threads - 1) / threads;
        for (long lo = 0; lo < m; lo += chunk)
            futs.push_back(std::async(std::launch::async, run, lo,
                                      std::min(lo + chunk, m)));
        for (auto& f : futs) f.get();
    }
    return vals;
}

}  // namespace detail

// Parameters of the twisted invariance identity: single-occupancy ring of N
// sites, site 1 carrying combo w1 and the rest w, colors with spectral
// parameters v and spins sv.  The operator ratio is tied to z = w1 / w.
template <typename S>
struct TwistedStationarity {
    int N = 3;
    int n = 2;
    S q{0};
    S w{1};
    S w1{1};
    std::vector<S> v, sv;

    void validate() const {
        if (N < 2) throw std::domain_error("TwistedStationarity: need N >= 2");
        if (n < 1 || n > 2)
            throw std::domain_error(
                "TwistedStationarity: seam summation handles at most two colors");
        if (static_cast<int>(v.size()) != n ||
            static_cast<int>(sv.size()) != n)
            throw std::domain_error("TwistedStationarity: need v, sv per color");
    }

    std::vector<SiteStack<S>> stacks() const {
        std::vector<SiteStack<S>> st;
        st.push_back(SiteStack<S>::spin_half(n, w1, v, sv, q));
        for (int j = 2; j <= N; ++j)
            st.push_back(SiteStack<S>::spin_half(n, w, v, sv, q));
        return st;
    }
};

// Residual of (row measure) * (twisted operator) - (row measure) over every
// full sector, relative to the largest row value in the sector.  Exactly zero
// on the rational backend.
template <typename S>
StationarityReport check_twisted_stationarity(const TwistedStationarity<S>& c,
                                              int threads = 1) {
    c.validate();
    auto stacks = c.stacks();
    TransferOperator<S> op =
        twisted_operator(c.N, c.n, c.q, c.w, c.w1);
    StationarityReport rep;
    rep.exact_zero = true;
    for (const auto& counts : detail::full_sectors(c.N, c.n)) {
        Sector sec{c.n, c.N, counts, 1};
        auto states = enumerate_sector(sec);
        std::vector<long> idx;
        for (const auto& st : states) idx.push_back(op.index_of(st));
        auto pi = detail::seam_rows(stacks, states, nullptr, threads);
        S scale(0);
        for (const S& p : pi)
            if (std::abs(to_double(p)) > std::abs(to_double(scale))) scale = p;
        long m = static_cast<long>(states.size());
        for (long b = 0; b < m; ++b) {
            S acc(0);
            for (long a = 0; a < m; ++a)
                acc += S(pi[a] * op.matrix(idx[a], idx[b]));
            detail::fold_residual(rep, S(acc - pi[b]), scale, states[b]);
        }
        rep.states += m;
    }
    return rep;
}

// Commutation of the twisted operator with the full matrix of seam rows (one
// row per entrance configuration), checked sector by sector.
template <typename S>
StationarityReport twisted_commutation_residual(const TwistedStationarity<S>& c,
                                                int threads = 1) {
    c.validate();
    auto stacks = c.stacks();
    TransferOperator<S> op =
        twisted_operator(c.N, c.n, c.q, c.w, c.w1);
    StationarityReport rep;
    rep.exact_zero = true;
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    for (const auto& counts : detail::full_sectors(c.N, c.n)) {
        Sector sec{c.n, c.N, counts, 1};
        auto states = enumerate_sector(sec);
        long m = static_cast<long>(states.size());
        std::vector<long> idx;
        for (const auto& st : states) idx.push_back(op.index_of(st));
        Mat Q(m, m), T(m, m);
        for (long a = 0; a < m; ++a) {
            auto row = detail::seam_rows(stacks, states, &states[a], threads);
            for (long b = 0; b < m; ++b) {
                Q(a, b) = row[b];
                T(a, b) = op.matrix(idx[a], idx[b]);
            }
        }
        Mat C = Mat(Q * T - T * Q);
        S scale(0);
        for (long a = 0; a < m; ++a)
            for (long b = 0; b < m; ++b)
                if (std::abs(to_double(Q(a, b))) > std::abs(to_double(scale)))
                    scale = Q(a, b);
        for (long a = 0; a < m; ++a)
            for (long b = 0; b < m; ++b)
                detail::fold_residual(rep, C(a, b), scale, states[b]);
        rep.states += m;
    }
    return rep;
}

// Parameters of the straight invariance identity: ring of N higher-spin sites
// (squared spins sigma, combos w) plus one spin-1/2 site carrying combo x,
// inserted by the auxiliary line.  counts fixes the sector of joint states.
template <typename S>
struct StraightStationarity {
    int N = 2;
    int n = 2;
    S q{0};
    S x{1};
    std::vector<S> sigma, w;  // per ring site
    std::vector<S> v, sv;     // per color
    std::vector<long> counts; // per color, aux included

    void validate() const {
        if (N < 1) throw std::domain_error("StraightStationarity: need N >= 1");
        if (n < 1 || n > 2)
            throw std::domain_error(
                "StraightStationarity: seam summation handles at most two colors");
        if (q == S(0))
            throw std::domain_error("StraightStationarity: q must be nonzero");
        if (static_cast<int>(sigma.size()) != N ||
            static_cast<int>(w.size()) != N)
            throw std::domain_error(
                "StraightStationarity: need sigma, w per site");
        if (static_cast<int>(v.size()) != n ||
            static_cast<int>(sv.size()) != n)
            throw std::domain_error("StraightStationarity: need v, sv per color");
        if (static_cast<int>(counts.size()) != n)
            throw std::domain_error("StraightStationarity: need counts per color");
        for (long k : counts)
            if (k < 1)
                throw std::domain_error(
                    "StraightStationarity: every color must be present");
    }

    // Stack ring in operator state order: auxiliary site first.
    std::vector<SiteStack<S>> stacks() const {
        std::vector<SiteStack<S>> st;
        st.push_back(SiteStack<S>::spin_half(n, x, v, sv, q));
        for (int j = 1; j <= N; ++j)
            st.push_back(SiteStack<S>::generic(n, sigma[j - 1], w[j - 1], v, sv, q));
        return st;
    }
};

// Residual of (row measure) * (straight operator) - (row measure) over the
// joint sector, relative to the largest row value.  Exactly zero on the
// rational backend.
template <typename S>
StationarityReport check_straight_stationarity(const StraightStationarity<S>& c,
                                               int threads = 1) {
    c.validate();
    auto stacks = c.stacks();
    long total = 0;
    for (long k : c.counts) total += k;
    TransferOperator<S> op =
        straight_operator_combos(c.N, c.n, c.q, c.x, c.sigma, c.w, total);
    StationarityReport rep;
    rep.exact_zero = true;
    // Joint sector: all [aux, sites] states with the given color counts.
    std::vector<RingState> states;
    for (const RingState& st : op.states) {
        bool ok = true;
        for (int m = 1; m <= c.n; ++m) {
            long tot = 0;
            for (const ArrowState& b : st) tot += b.at(m);
            if (tot != c.counts[m - 1]) ok = false;
        }
        if (ok) states.push_back(st);
    }
    std::vector<long> idx;
    for (const auto& st : states) idx.push_back(op.index_of(st));
    auto pi = detail::seam_rows(stacks, states, nullptr, threads);
    S scale(0);
    for (const S& p : pi)
        if (std::abs(to_double(p)) > std::abs(to_double(scale))) scale = p;
    long m = static_cast<long>(states.size());
    for (long b = 0; b < m; ++b) {
        S acc(0);
        for (long a = 0; a < m; ++a)
            acc += S(pi[a] * op.matrix(idx[a], idx[b]));
        detail::fold_residual(rep, S(acc - pi[b]), scale, states[b]);
    }
    rep.states = m;
    return rep;
}

// ---------------------------------------------------------------------------
// Continuous-time limits
// ---------------------------------------------------------------------------

struct PoissonPoint {
    double eps = 0;
    long steps = 0;
    double error = 0;  // max entry deviation from the matrix exponential
};

struct PoissonTable {
    std::vector<PoissonPoint> points;
    double slope = 0;  // log-log least-squares order of the error in eps
};

namespace detail {

inline Eigen::MatrixXd mat_power(Eigen::MatrixXd M, long k) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(M.rows(), M.cols());
    while (k > 0) {
        if (k & 1) R = R * M;
        M = M * M;
        k >>= 1;
    }
    return R;
}

inline double fit_loglog_slope(const std::vector<PoissonPoint>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (const auto& p : pts) {
        if (p.error <= 0 || p.eps <= 0) continue;
        double lx = std::log(p.eps), ly = std::log(p.error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) return 0;
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace detail

// Convergence of high powers of the transfer operators, near the degenerate
// parameter point, to exp(t G) for the matching continuous-time generator on
// one fully packed sector (one arrow per color).  Floating point only.
inline PoissonTable poisson_limit_residual(ColumnFamily kind, double t,
                                           const std::vector<double>& eps,
                                           int N = 3, int n = 2,
                                           double q = 0.25, long P = 2) {
    if (N < 2 || n < 1)
        throw std::domain_error("poisson_limit_residual: need N >= 2, n >= 1");
    PoissonTable table;
    std::vector<long> counts(n, 1);
    Eigen::MatrixXd target;   // exp(t G) on the sector
    std::vector<long> rows;   // operator indices of the sector states
    auto exp_of = [&](const GeneratorMatrix<double>& g) {
        Eigen::MatrixXd G = Eigen::MatrixXd(g.rates);
        return Eigen::MatrixXd((t * G).exp());
    };

    if (kind == ColumnFamily::Masep) {
        if (N < n + 1)
            throw std::domain_error("poisson_limit_residual: need an empty site");
        Sector sec{n, N, counts, 1};
        auto g = masep_generator<double>(N, n, q, sec);
        target = exp_of(g);
        for (double e : eps) {
            long k = static_cast<long>(std::floor((1 - q) * t / e));
            auto op = twisted_operator<double>(N, n, q, 1.0, 1.0 - e);
            std::vector<long> idx;
            for (const auto& st : g.states) idx.push_back(op.index_of(st));
            long m = static_cast<long>(idx.size());
            Eigen::MatrixXd B(m, m);
            for (long a = 0; a < m; ++a)
                for (long b = 0; b < m; ++b) B(a, b) = op.matrix(idx[a], idx[b]);
            double err = (detail::mat_power(B, k) - target).cwiseAbs().maxCoeff();
            table.points.push_back({e, k, err});
        }
    } else {
        long total = n;
        Sector sec{n, N, counts, std::nullopt};
        if (kind == ColumnFamily::QPush) sec.capacity = P;
        auto g = kind == ColumnFamily::QBoson
                     ? qboson_generator<double>(N, n, q,
                                                std::vector<double>(N, 1.0), sec)
                     : qpush_generator<double>(N, n, q, P,
                                               std::vector<double>(N, 1.0), sec);
        target = exp_of(g);
        for (double e : eps) {
            long k = static_cast<long>(std::floor(t / e));
            TransferOperator<double> op;
            if (kind == ColumnFamily::QBoson) {
                std::vector<double> sigma(N, e * e), w(N, e);
                op = straight_operator_combos<double>(N, n, q, -1.0, sigma, w, total);
            } else {
                std::vector<double> xs(N, std::pow(q, 1.0 - P) / e);
                op = qpush_aux_operator<double>(N, n, q, P, xs, total);
            }
            long m = static_cast<long>(op.states.size());
            Eigen::MatrixXd M(m, m);
            for (long a = 0; a < m; ++a)
                for (long b = 0; b < m; ++b) M(a, b) = op.matrix(a, b);
            Eigen::MatrixXd Mk = detail::mat_power(M, k);
            // Project onto the sector with an empty auxiliary line.
            std::vector<long> idx;
            for (const auto& st : g.states) {
                RingState joint(N + 1, ArrowState(n));
                for (int j = 0; j < N; ++j) joint[j + 1] = st[j];
                idx.push_back(op.index_of(joint));
            }
            long ms = static_cast<long>(idx.size());
            Eigen::MatrixXd B(ms, ms);
            for (long a = 0; a < ms; ++a)
                for (long b = 0; b < ms; ++b) B(a, b) = Mk(idx[a], idx[b]);
            double err = (B - target).cwiseAbs().maxCoeff();
            table.points.push_back({e, k, err});
        }
    }
    table.slope = detail::fit_loglog_slope(table.points);
    return table;
}

}  // namespace ringq
