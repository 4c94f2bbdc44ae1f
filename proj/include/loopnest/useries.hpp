#ifndef LOOPNEST_USERIES_HPP
#define LOOPNEST_USERIES_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "loopnest/elliptic.hpp"

namespace loopnest {

// Dense truncated power series in the vertex weight u with double
// coefficients; the numeric companion of the exact engine for asymptotic
// work where rational arithmetic would overflow.
struct USeries {
    std::vector<double> c; // c[j] multiplies u^j

    static USeries zero(int ord) { return USeries{std::vector<double>(ord + 1, 0.0)}; }
    static USeries unit_u(int ord) {
        USeries s = zero(ord);
        if (ord >= 1) s.c[1] = 1.0;
        return s;
    }
    int order() const { return int(c.size()) - 1; }

    friend USeries operator+(const USeries& a, const USeries& b) {
        USeries r = a;
        for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
        return r;
    }
    friend USeries operator-(const USeries& a, const USeries& b) {
        USeries r = a;
        for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
        return r;
    }
    USeries& operator+=(const USeries& b) {
        for (std::size_t i = 0; i < b.c.size(); ++i) c[i] += b.c[i];
        return *this;
    }
    friend USeries operator*(double x, const USeries& a) {
        USeries r = a;
        for (auto& v : r.c) v *= x;
        return r;
    }
    friend USeries mul(const USeries& a, const USeries& b) {
        USeries r = zero(int(a.c.size()) - 1);
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i] == 0.0) continue;
            for (std::size_t j = 0; i + j < r.c.size() && j < b.c.size(); ++j)
                r.c[i + j] += a.c[i] * b.c[j];
        }
        return r;
    }
    double max_abs_diff(const USeries& b) const {
        double m = 0;
        for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, std::fabs(c[i] - b.c[i]));
        return m;
    }
    // partial sum up to u^j_max at numeric u
    double eval(double u, int j_max = -1) const {
        if (j_max < 0 || j_max > order()) j_max = order();
        double s = 0, p = 1;
        for (int j = 0; j <= j_max; ++j) {
            s += c[j] * p;
            p *= u;
        }
        return s;
    }
    USeries euler() const { // u d/du
        USeries r = *this;
        for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] *= double(j);
        return r;
    }
};

// Numeric bending-model series per perimeter: disks, vertex-marked disks
// and the s-refined pointed family, all as u-series.
struct NumericNested {
    std::vector<USeries> F;          // disks
    std::vector<USeries> pointed;    // gasket-marked seeds
    std::vector<std::vector<USeries>> two_boundary; // [m][l]
    std::vector<std::vector<double>> A, R;          // annuli
    int l_win = 0, K = 0, Lfix = 0, ord = 0;
};

namespace detail {

inline std::vector<std::vector<double>> annulus_numeric(double n, double h, double alpha, int K,
                                                        int L) {
    // Taylor of n ln 1/(1 - a h(x+z) - (1-a^2) h^2 xz)
    std::vector<std::vector<double>> P(K + 1, std::vector<double>(L + 1, 0.0)), Rr = P, Pm = P;
    double ah = alpha * h, c11 = (1.0 - alpha * alpha) * h * h;
    if (K >= 1) Pm[1][0] = ah;
    if (L >= 1) Pm[0][1] = ah;
    if (K >= 1 && L >= 1) Pm[1][1] = c11;
    int maxm = K + L;
    for (int m = 1; m <= maxm; ++m) {
        for (int i = 0; i <= K; ++i)
            for (int j = 0; j <= L; ++j) Rr[i][j] += Pm[i][j] / m;
        if (m == maxm) break;
        std::vector<std::vector<double>> nx(K + 1, std::vector<double>(L + 1, 0.0));
        for (int i = 0; i <= K; ++i)
            for (int j = 0; j <= L; ++j) {
                if (Pm[i][j] == 0.0) continue;
                if (i + 1 <= K) nx[i + 1][j] += Pm[i][j] * ah;
                if (j + 1 <= L) nx[i][j + 1] += Pm[i][j] * ah;
                if (i + 1 <= K && j + 1 <= L) nx[i + 1][j + 1] += Pm[i][j] * c11;
            }
        Pm = std::move(nx);
    }
    for (auto& row : Rr)
        for (auto& v : row) v *= n;
    return Rr;
}

inline std::vector<USeries> tutte_numeric(const std::vector<USeries>& w, int ord, int l_win,
                                          int guard) {
    std::vector<USeries> F(l_win + 1, USeries::zero(ord)), prev;
    F[0] = USeries::unit_u(ord);
    for (int it = 0; it <= guard; ++it) {
        prev = F;
        for (int l = 1; l <= l_win; ++l) {
            USeries rhs = USeries::zero(ord);
            for (std::size_t k = 1; k < w.size(); ++k) {
                int lp = l + int(k) - 2;
                if (lp <= l_win) rhs += mul(w[k], prev[lp]);
            }
            for (int lp = 0; lp <= l - 2; ++lp) rhs += mul(prev[lp], prev[l - 2 - lp]);
            F[l] = rhs;
        }
        double d = 0;
        for (int l = 0; l <= l_win; ++l) d = std::max(d, F[l].max_abs_diff(prev[l]));
        if (d < 1e-300) return F;
        if (it == guard && d > 1e-12)
            throw numeric_error("tutte_numeric: no stabilization");
    }
    return F;
}

inline std::vector<USeries> marked_numeric(const std::vector<USeries>& w,
                                           const std::vector<USeries>& F,
                                           const std::vector<USeries>& seed, int guard) {
    int l_win = int(F.size()) - 1;
    std::vector<USeries> X = seed, prev;
    for (int it = 0; it <= guard; ++it) {
        prev = X;
        for (int l = 1; l <= l_win; ++l) {
            USeries rhs = seed[l];
            for (std::size_t k = 1; k < w.size(); ++k) {
                int lp = l + int(k) - 2;
                if (lp <= l_win) rhs += mul(w[k], prev[lp]);
            }
            for (int lp = 0; lp <= l - 2; ++lp) rhs += 2.0 * mul(F[lp], prev[l - 2 - lp]);
            X[l] = rhs;
        }
        double d = 0;
        for (int l = 0; l <= l_win; ++l) d = std::max(d, X[l].max_abs_diff(prev[l]));
        if (d < 1e-300) return X;
    }
    return X;
}

} // namespace detail

inline NumericNested nested_numeric(double n, double g, double h, double alpha, int ord,
                                    int l_max, bool with_two_boundary = true) {
    NumericNested out;
    out.ord = ord;
    out.K = std::max(3, 2 * ord);
    out.Lfix = 2 * ord;
    out.R = detail::annulus_numeric(n, h, alpha, out.K, out.Lfix);
    out.A = out.R;
    for (int k = 0; k <= out.K; ++k)
        for (int l = 0; l <= out.Lfix; ++l) out.A[k][l] *= k;
    out.l_win = std::max(l_max, 2 * ord + 2) + out.K;

    std::vector<USeries> bare(out.K + 1, USeries::zero(ord));
    bare[3].c[0] = g;
    int guard = out.l_win + 3 * ord + 8;

    std::vector<USeries> G = bare;
    auto F = detail::tutte_numeric(G, ord, out.l_win, guard);
    for (int it = 0; it <= ord + 2; ++it) {
        std::vector<USeries> Gn = bare;
        for (int k = 1; k <= out.K; ++k)
            for (int l = 0; l <= out.Lfix && l <= out.l_win; ++l)
                if (out.A[k][l] != 0.0) Gn[k] += out.A[k][l] * F[l];
        auto Fn = detail::tutte_numeric(Gn, ord, out.l_win, guard);
        double d = 0;
        for (int l = 0; l <= out.l_win; ++l) d = std::max(d, Fn[l].max_abs_diff(F[l]));
        G = std::move(Gn);
        F = std::move(Fn);
        if (d < 1e-300) break;
        if (it == ord + 2) throw numeric_error("nested_numeric: no stabilization");
    }
    out.F = F;

    std::vector<USeries> seed(out.l_win + 1, USeries::zero(ord));
    seed[0] = USeries::unit_u(ord);
    out.pointed = detail::marked_numeric(G, F, seed, guard);

    out.two_boundary.assign(out.K + 1, {});
    if (!with_two_boundary) return out;
    for (int m = 1; m <= out.K; ++m) {
        std::vector<USeries> sd(out.l_win + 1, USeries::zero(ord));
        for (int l = 1; l <= out.l_win; ++l) {
            int lp = l + m - 2;
            if (lp >= 0 && lp <= out.l_win) sd[l] = double(m) * F[lp];
        }
        out.two_boundary[m] = detail::marked_numeric(G, F, sd, guard);
    }
    return out;
}

// s-refined pointed family at numeric s.
inline std::vector<USeries> refined_pointed_numeric(const NumericNested& ns, double s) {
    int l_win = ns.l_win;
    std::vector<USeries> X = ns.pointed, prev;
    for (int it = 0; it <= ns.ord + 2; ++it) {
        prev = X;
        for (int l = 0; l <= l_win; ++l) {
            USeries rhs = ns.pointed[l];
            USeries inner = USeries::zero(ns.ord);
            for (int lp = 0; lp <= ns.Lfix && lp <= l_win; ++lp) {
                USeries m = USeries::zero(ns.ord);
                bool any = false;
                for (int k = 1; k <= ns.K; ++k) {
                    if (ns.R[k][lp] == 0.0) continue;
                    m += ns.R[k][lp] * ns.two_boundary[k][l];
                    any = true;
                }
                if (any) inner += mul(m, prev[lp]);
            }
            X[l] = rhs + s * inner;
        }
        double d = 0;
        for (int l = 0; l <= l_win; ++l) d = std::max(d, X[l].max_abs_diff(prev[l]));
        if (d < 1e-300) break;
    }
    return X;
}

} // namespace loopnest

#endif
