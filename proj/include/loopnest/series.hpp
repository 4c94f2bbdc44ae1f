#ifndef LOOPNEST_SERIES_HPP
#define LOOPNEST_SERIES_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "loopnest/poly.hpp"

namespace loopnest {

struct divergent_grading_error : std::runtime_error {
    explicit divergent_grading_error(const std::string& w) : std::runtime_error(w) {}
};
struct empty_sector_error : std::runtime_error {
    explicit empty_sector_error(const std::string& w) : std::runtime_error(w) {}
};

// Model parameters. Each weight is either an exact rational or the
// corresponding formal symbol (nullopt).
struct LoopModelSpec {
    std::optional<Rational> n, g, h, alpha;
    std::map<int, Poly> extra_face_weights; // usual-map sub-model hook

    Poly wn() const { return n ? Poly(*n) : Poly::var(VN); }
    Poly wg() const { return g ? Poly(*g) : Poly::var(VG); }
    Poly wh() const { return h ? Poly(*h) : Poly::var(VH); }
    Poly wa() const { return alpha ? Poly(*alpha) : Poly::var(VA); }
};

// Series of disks indexed by boundary perimeter, along with the truncation
// they were computed under.
struct PerimeterFamily {
    std::vector<Poly> F; // F[l], 0 <= l <= l_max
    Trunc trunc;
    int l_max() const { return int(F.size()) - 1; }
};

struct AnnulusMatrix {
    // A[k][l] for 1 <= k <= K, 0 <= l <= L;  R[k][l] = A[k][l] / k.
    std::vector<std::vector<Poly>> A, R;
    int K = 0, L = 0;
};

// Taylor coefficients of R(x,z) = n ln 1/(1 - a h (x+z) - (1-a^2) h^2 x z),
// exact. A = dR/dx shifted by one power of x.
inline AnnulusMatrix annulus_coefficients(const LoopModelSpec& spec, int K, int L,
                                          const Trunc& tr) {
    if (K < 1 || L < 0) throw std::invalid_argument("annulus_coefficients: bad range");
    if (K > 64 || L > 64)
        throw std::invalid_argument("annulus_coefficients: range exceeds expansion budget");
    AnnulusMatrix out;
    out.K = K;
    out.L = L;

    Poly ah = Poly::mul(spec.wa(), spec.wh(), tr);
    Poly one(Rational(1));
    Poly h2 = Poly::mul(spec.wh(), spec.wh(), tr);
    Poly a2 = Poly::mul(spec.wa(), spec.wa(), tr);
    Poly coef11 = Poly::mul(one - a2, h2, tr); // (1 - a^2) h^2

    // Bivariate arrays indexed by (x-power, z-power).
    auto zero_grid = [&](int K_, int L_) {
        return std::vector<std::vector<Poly>>(K_ + 1, std::vector<Poly>(L_ + 1));
    };
    auto P = zero_grid(K, L);
    if (K >= 1) P[1][0] = ah;
    if (L >= 1) P[0][1] = ah;
    if (K >= 1 && L >= 1) P[1][1] = coef11;

    auto Rg = zero_grid(K, L);
    auto Pm = P; // P^m
    int max_m = K + L;
    for (int m = 1; m <= max_m; ++m) {
        Rational inv_m(1, m);
        for (int i = 0; i <= K; ++i)
            for (int j = 0; j <= L; ++j)
                if (!Pm[i][j].is_zero()) Rg[i][j] += Pm[i][j].scaled(inv_m);
        if (m == max_m) break;
        auto next = zero_grid(K, L);
        for (int i = 0; i <= K; ++i)
            for (int j = 0; j <= L; ++j) {
                if (Pm[i][j].is_zero()) continue;
                if (i + 1 <= K) next[i + 1][j] += Poly::mul(Pm[i][j], ah, tr);
                if (j + 1 <= L) next[i][j + 1] += Poly::mul(Pm[i][j], ah, tr);
                if (i + 1 <= K && j + 1 <= L) next[i + 1][j + 1] += Poly::mul(Pm[i][j], coef11, tr);
            }
        Pm = std::move(next);
    }

    Poly wn = spec.wn();
    out.R.assign(K + 1, std::vector<Poly>(L + 1));
    out.A.assign(K + 1, std::vector<Poly>(L + 1));
    for (int k = 1; k <= K; ++k)
        for (int l = 0; l <= L; ++l) {
            out.R[k][l] = Poly::mul(wn, Rg[k][l], tr);
            out.A[k][l] = out.R[k][l].scaled(Rational(k));
        }
    return out;
}

namespace detail {

inline int tutte_window(const Trunc& tr, int l_max) {
    return std::max(l_max, 2 * tr.max_u + tr.max_face) + 2;
}

inline void check_weight_grading(const std::vector<Poly>& w) {
    auto has_const = [](const Poly& p) {
        for (const auto& t : p.terms())
            if (t.mono == mono_one()) return true;
        return false;
    };
    bool w1c = w.size() > 1 && has_const(w[1]);
    bool w2c = w.size() > 2 && has_const(w[2]);
    bool whigh = false;
    for (std::size_t k = 3; k < w.size(); ++k)
        if (has_const(w[k])) whigh = true;
    if (w2c || (w1c && whigh))
        throw divergent_grading_error(
            "face weights admit infinitely many maps at fixed volume");
}

// Root-edge deletion recursion for rooted planar maps with a boundary:
//   F_l = sum_k w_k F_{l+k-2} + sum_{l'=0}^{l-2} F_{l'} F_{l-2-l'},  F_0 = u.
// `weights` may carry u-dependence (renormalized weights); solved by plain
// fixed-point iteration, which terminates under the ring truncation.
inline std::vector<Poly> tutte_solve(const std::vector<Poly>& weights, const Trunc& tr,
                                     int l_win) {
    check_weight_grading(weights);
    int K = int(weights.size()) - 1;
    std::vector<Poly> F(l_win + 1), prev;
    F[0] = Poly::var(VU);
    int guard = l_win + tr.max_u + tr.max_face + 8;
    for (int it = 0; it <= guard; ++it) {
        prev = F;
        for (int l = 1; l <= l_win; ++l) {
            Poly rhs;
            for (int k = 1; k <= K; ++k) {
                if (weights[k].is_zero()) continue;
                int lp = l + k - 2;
                if (lp <= l_win) rhs += Poly::mul(weights[k], prev[lp], tr);
            }
            for (int lp = 0; lp <= l - 2; ++lp)
                rhs += Poly::mul(prev[lp], prev[l - 2 - lp], tr);
            F[l] = rhs;
        }
        if (F == prev) return F;
    }
    throw divergent_grading_error("tutte_solve: fixed point did not stabilize");
}

// Linear companion solve: X_l = seed_l + sum_k w_k X_{l+k-2} + 2 sum F X,
// used for vertex-marked and face-marked series at fixed weights/F.
inline std::vector<Poly> marked_solve(const std::vector<Poly>& weights,
                                      const std::vector<Poly>& F,
                                      const std::vector<Poly>& seed, const Trunc& tr) {
    int l_win = int(F.size()) - 1;
    int K = int(weights.size()) - 1;
    std::vector<Poly> X(l_win + 1), prev;
    X[0] = seed[0];
    int guard = l_win + tr.max_u + tr.max_face + 8;
    for (int it = 0; it <= guard; ++it) {
        prev = X;
        for (int l = 1; l <= l_win; ++l) {
            Poly rhs = seed[l];
            for (int k = 1; k <= K; ++k) {
                if (weights[k].is_zero()) continue;
                int lp = l + k - 2;
                if (lp <= l_win) rhs += Poly::mul(weights[k], prev[lp], tr);
            }
            for (int lp = 0; lp <= l - 2; ++lp)
                rhs += Poly::mul(F[lp], prev[l - 2 - lp], tr).scaled(Rational(2));
            X[l] = rhs;
        }
        if (X == prev) return X;
    }
    throw divergent_grading_error("marked_solve: fixed point did not stabilize");
}

} // namespace detail

// Usual rooted maps with prescribed face weights (no loops).
inline PerimeterFamily tutte_disk_series(const std::map<int, Poly>& face_weights,
                                         const Trunc& tr, int l_max) {
    int K = 1;
    for (const auto& [k, w] : face_weights)
        if (!w.is_zero()) K = std::max(K, k);
    std::vector<Poly> w(K + 1);
    for (const auto& [k, wk] : face_weights)
        if (k >= 1 && k <= K) w[k] = wk;
    int l_win = detail::tutte_window(tr, l_max);
    auto F = detail::tutte_solve(w, tr, l_win);
    PerimeterFamily out;
    out.trunc = tr;
    out.F.assign(F.begin(), F.begin() + l_max + 1);
    return out;
}

// Everything the nested-loop substitution produces for one model/truncation.
struct NestedSeries {
    std::vector<Poly> G;                 // renormalized weights, index = degree
    PerimeterFamily disks;               // F_l
    std::vector<Poly> F_full;            // internal window
    std::vector<Poly> pointed_gasket;    // vertex-marked usual series at G
    std::vector<std::vector<Poly>> two_boundary_gasket; // [m][l], marked face degree m
    AnnulusMatrix annuli;
    Trunc trunc;
    int l_win = 0;
};

// Fixed point G_k = g_k + sum_{l>=0} A_{k,l} F_l with F = usual-map series
// evaluated at G. The l = 0 inner-boundary term (a ring closing onto a
// single vertex) is included; the enumeration census fixes this convention.
inline NestedSeries nested_fixed_point(const LoopModelSpec& spec, const Trunc& tr, int l_max) {
    NestedSeries out;
    out.trunc = tr;
    int K = std::max({3, tr.max_face});
    int Lfix = std::max(0, tr.max_face - 1);
    out.annuli = annulus_coefficients(spec, K, Lfix, tr);
    int l_win = detail::tutte_window(tr, std::max(l_max, Lfix));
    out.l_win = l_win;

    std::vector<Poly> bare(K + 1);
    bare[3] = spec.wg();
    for (const auto& [k, w] : spec.extra_face_weights)
        if (k >= 1 && k <= K) bare[k] += w;

    std::vector<Poly> G = bare;
    std::vector<Poly> F = detail::tutte_solve(G, tr, l_win);
    int guard = tr.max_u + 2;
    int it = 0;
    for (;; ++it) {
        if (it > guard)
            throw divergent_grading_error("nested_fixed_point: iteration did not stabilize");
        std::vector<Poly> Gn = bare;
        for (int k = 1; k <= K; ++k)
            for (int l = 0; l <= Lfix; ++l) {
                if (out.annuli.A[k][l].is_zero()) continue;
                Gn[k] += Poly::mul(out.annuli.A[k][l], F[l], tr);
            }
        auto Fn = detail::tutte_solve(Gn, tr, l_win);
        bool done = (Fn == F) && (Gn == G);
        G = std::move(Gn);
        F = std::move(Fn);
        if (done) break;
    }
    out.G = G;
    out.F_full = F;
    out.disks.trunc = tr;
    out.disks.F.assign(F.begin(), F.begin() + l_max + 1);

    // Vertex-marked gasket series (structural u d/du with weights held fixed).
    std::vector<Poly> seed(l_win + 1);
    seed[0] = Poly::var(VU);
    out.pointed_gasket = detail::marked_solve(G, F, seed, tr);

    // Face-marked gasket series per marked degree. Marked degrees run past
    // the face-weight cap: the second boundary of a cylinder is a marked
    // face of arbitrary perimeter, not a weighted face.
    int K_marked = std::max(K, l_max);
    out.two_boundary_gasket.assign(K_marked + 1, {});
    for (int m = 1; m <= K_marked; ++m) {
        std::vector<Poly> sd(l_win + 1);
        for (int l = 0; l <= l_win; ++l) {
            int lp = l + m - 2;
            if (l >= 1 && lp >= 0 && lp <= l_win) sd[l] = F[lp].scaled(Rational(m));
        }
        sd[0] = Poly();
        out.two_boundary_gasket[m] = detail::marked_solve(G, F, sd, tr);
    }
    return out;
}

namespace detail {

// Applies the separating-loop transfer: X = seed + s * M X with
// M_{l,l'} = sum_k two_boundary[k][l] R_{k,l'}. Terminates because M raises
// the u-grading.
inline std::vector<Poly> transfer_solve(const NestedSeries& ns, const std::vector<Poly>& seed) {
    const Trunc& tr = ns.trunc;
    int l_win = ns.l_win;
    int K = ns.annuli.K, Lfix = ns.annuli.L;
    Poly s = Poly::var(VS);

    // Precompute M_{l,l'} = sum_k F2[k at l] R_{k,l'}.
    std::vector<std::vector<Poly>> M(l_win + 1, std::vector<Poly>(Lfix + 1));
    for (int l = 0; l <= l_win; ++l)
        for (int lp = 0; lp <= Lfix; ++lp) {
            Poly acc;
            for (int k = 1; k <= K; ++k) {
                if (ns.annuli.R[k][lp].is_zero()) continue;
                const Poly& f2 = ns.two_boundary_gasket[k][l];
                if (f2.is_zero()) continue;
                acc += Poly::mul(f2, ns.annuli.R[k][lp], tr);
            }
            M[l][lp] = acc;
        }

    std::vector<Poly> X = seed, prev;
    int guard = tr.max_u + 2;
    for (int it = 0; it <= guard; ++it) {
        prev = X;
        for (int l = 0; l <= l_win; ++l) {
            Poly rhs = seed[l];
            Poly inner;
            for (int lp = 0; lp <= Lfix; ++lp) {
                if (M[l][lp].is_zero() || prev[lp].is_zero()) continue;
                inner += Poly::mul(M[l][lp], prev[lp], tr);
            }
            rhs += Poly::mul(s, inner, tr);
            X[l] = rhs;
        }
        if (X == prev) return X;
    }
    throw divergent_grading_error("transfer_solve: did not stabilize");
}

} // namespace detail

// Pointed disks refined by s per loop separating origin from boundary.
// Setting s = 1 reproduces u d/du of the disk series.
inline PerimeterFamily refined_pointed_disk(const NestedSeries& ns, int l_max) {
    auto X = detail::transfer_solve(ns, ns.pointed_gasket);
    PerimeterFamily out;
    out.trunc = ns.trunc;
    out.F.assign(X.begin(), X.begin() + l_max + 1);
    return out;
}

// Cylinders refined by s per loop separating the two boundaries, second
// perimeter fixed to l2.
inline PerimeterFamily refined_cylinder(const NestedSeries& ns, int l2, int l_max) {
    if (l2 < 1 || l2 >= int(ns.two_boundary_gasket.size()))
        throw std::invalid_argument("refined_cylinder: second perimeter out of range");
    std::vector<Poly> seed(ns.l_win + 1);
    for (int l = 0; l <= ns.l_win; ++l) seed[l] = ns.two_boundary_gasket[l2][l];
    auto X = detail::transfer_solve(ns, seed);
    PerimeterFamily out;
    out.trunc = ns.trunc;
    out.F.assign(X.begin(), X.begin() + l_max + 1);
    return out;
}

// Exact depth distribution in the (V, L) sector. The model weights must be
// numeric so coefficients live in Q; returns P -> probability.
struct DepthDistribution {
    std::vector<Rational> prob; // index = depth P
};

inline DepthDistribution depth_distribution_from(const Poly& refined_sector_vs, int V) {
    Poly sector = refined_sector_vs.coeff_of(VU, V);
    if (sector.is_zero())
        throw empty_sector_error("depth_distribution: no configuration in sector");
    int pmax = sector.degree(VS);
    std::vector<Rational> counts(pmax + 1, Rational(0));
    Rational total(0);
    for (const auto& t : sector.terms()) {
        Mono m = t.mono;
        int p = m[VS];
        m[VS] = 0;
        if (m != mono_one())
            throw std::invalid_argument("depth_distribution: weights must be numeric");
        counts[p] += t.coef;
        total += t.coef;
    }
    if (total.is_zero()) throw empty_sector_error("depth_distribution: zero mass");
    DepthDistribution d;
    d.prob.resize(pmax + 1);
    for (int p = 0; p <= pmax; ++p) d.prob[p] = counts[p] / total;
    return d;
}

inline DepthDistribution depth_distribution_pointed(const LoopModelSpec& spec, int V, int L) {
    Trunc tr;
    tr.max_u = V;
    // a triangulated disk sector (V, L) has exactly 2(V-1) - L inner faces
    tr.max_face = std::max(0, 2 * (V - 1) - L);
    auto ns = nested_fixed_point(spec, tr, L);
    auto ref = refined_pointed_disk(ns, L);
    return depth_distribution_from(ref.F[L], V);
}

inline DepthDistribution depth_distribution_cylinder(const LoopModelSpec& spec, int V, int L1,
                                                     int L2) {
    Trunc tr;
    tr.max_u = V;
    // a triangulated cylinder sector (V, L1, L2) has 2V - L1 - L2 inner faces
    tr.max_face = std::max(0, 2 * V - L1 - L2);
    auto ns = nested_fixed_point(spec, tr, std::max(L1, L2));
    auto ref = refined_cylinder(ns, L2, L1);
    return depth_distribution_from(ref.F[L1], V);
}

} // namespace loopnest

#endif
