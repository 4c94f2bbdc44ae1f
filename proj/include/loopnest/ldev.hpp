#ifndef LOOPNEST_LDEV_HPP
#define LOOPNEST_LDEV_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "loopnest/quadrature.hpp"

namespace loopnest {

struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& w) : std::runtime_error(w) {}
};

// ---------------------------------------------------------------------------
// Map-side depth rate function.
// ---------------------------------------------------------------------------

// J(p) = p ln((2/n) p/sqrt(1+p^2)) + arccot(p) - arccos(n/2), arccot in
// (0, pi/2); continuous limit arcsin(n/2) at p = 0.
inline double rate_J(double p, double n) {
    if (!(n > 0.0 && n < 2.0)) throw std::domain_error("rate_J: n in (0,2)");
    if (p < 0.0) throw std::domain_error("rate_J: p >= 0");
    if (p == 0.0) return std::asin(n / 2.0);
    return p * std::log((2.0 / n) * p / std::sqrt(1.0 + p * p)) + std::atan2(1.0, p) -
           std::acos(n / 2.0);
}

// Variational form sup_{s in [0, 2/n]} { p ln s + arccos(ns/2) - arccos(n/2) },
// used as an independent check of the closed form.
inline double rate_J_supform(double p, double n) {
    auto f = [&](double s) { return p * std::log(s) + std::acos(n * s / 2.0); };
    double smax = 2.0 / n;
    double s_opt = quad::golden_max(f, 1e-14, smax * (1.0 - 1e-15));
    return f(s_opt) - std::acos(n / 2.0);
}

struct GaussianSummary {
    double p_opt, sigma2;
};
// Typical depth slope and Gaussian fluctuation scale; j = 1 for fixed
// perimeter, j = 2 for perimeter of order V^{c/2}.
inline GaussianSummary gaussian_summary(double n, int j, double c) {
    if (j != 1 && j != 2) throw std::domain_error("gaussian_summary: j in {1,2}");
    GaussianSummary g;
    g.p_opt = n / std::sqrt(4.0 - n * n);
    g.sigma2 = std::pow(2.0, 3 - j) * n * c / (M_PI * std::pow(4.0 - n * n, 1.5));
    return g;
}

// ---------------------------------------------------------------------------
// CLE side: conformal-radius cumulants and nesting rates.
// ---------------------------------------------------------------------------

inline double lambda_kappa_max(double kappa) { return 1.0 - 2.0 / kappa - 3.0 * kappa / 32.0; }

// Cumulant generating function of the log conformal radius; the negative
// radicand branch continues through cosh.
inline double lambda_kappa(double lam, double kappa) {
    if (!(kappa > 8.0 / 3.0 && kappa < 8.0))
        throw std::domain_error("lambda_kappa: kappa in (8/3, 8)");
    if (!(lam < lambda_kappa_max(kappa)))
        throw std::domain_error("lambda_kappa: lambda at or above the branch pole");
    double a = 1.0 - 4.0 / kappa;
    double rad = a * a + 8.0 * lam / kappa;
    double den = rad >= 0.0 ? std::cos(M_PI * std::sqrt(rad)) : std::cosh(M_PI * std::sqrt(-rad));
    return std::log(std::cos(M_PI * a) / den);
}

inline double n_of_kappa(double kappa) { return 2.0 * std::cos(M_PI * (1.0 - 4.0 / kappa)); }

// gamma_kappa(nu): parametric solution of the Legendre-Fenchel transform,
// trigonometric branch for small nu, hyperbolic for large.
inline double gamma_kappa(double nu, double kappa) {
    if (nu < 0.0) throw std::domain_error("gamma_kappa: nu >= 0");
    if (nu == 0.0) return lambda_kappa_max(kappa);
    double n = n_of_kappa(kappa);
    double k2 = kappa / (4.0 * M_PI * M_PI);
    double target = nu / k2; // v cot v or w coth w
    double arcn = std::acos(n / 2.0);
    if (target < 1.0) {
        // v cot v decreasing from 1 to 0 on (0, pi/2)
        double lo = 1e-12, hi = M_PI / 2.0 - 1e-14;
        for (int it = 0; it < 64; ++it) {
            double mid = 0.5 * (lo + hi);
            (mid * std::cos(mid) / std::sin(mid) > target ? lo : hi) = mid;
        }
        double v = 0.5 * (lo + hi);
        return k2 * (v * v / 2.0 - (v * std::cos(v) / std::sin(v)) *
                                      std::log(n / (2.0 * std::cos(v))) -
                     arcn * arcn / 2.0);
    }
    if (target == 1.0) {
        return k2 * (-std::log(n / 2.0) - arcn * arcn / 2.0);
    }
    // w coth w increasing from 1 on (0, inf)
    double lo = 1e-12, hi = std::max(4.0, target + 2.0);
    while (hi / std::tanh(hi) < target) hi *= 2.0;
    for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid / std::tanh(mid) < target ? lo : hi) = mid;
    }
    double w = 0.5 * (lo + hi);
    return k2 * (-w * w / 2.0 - (w / std::tanh(w)) * std::log(n / (2.0 * std::cosh(w))) -
                 arcn * arcn / 2.0);
}

// ---------------------------------------------------------------------------
// KPZ relation.
// ---------------------------------------------------------------------------

struct KPZParams {
    double kappa, gamma, a_gamma, c, b, n;
};

inline KPZParams kpz_params(double kappa) {
    if (!(kappa > 8.0 / 3.0 && kappa < 8.0))
        throw std::domain_error("kpz_params: kappa in (8/3, 8)");
    KPZParams k;
    k.kappa = kappa;
    k.gamma = std::min(std::sqrt(kappa), 4.0 / std::sqrt(kappa));
    k.a_gamma = 2.0 / k.gamma - k.gamma / 2.0;
    k.c = std::max(1.0, kappa / 4.0);
    k.b = std::fabs(1.0 - 4.0 / kappa);
    k.n = n_of_kappa(kappa);
    return k;
}

enum class KPZDirection { Forward, Inverse };

inline double kpz_U(double x, double gamma, KPZDirection dir) {
    if (!(gamma > 0.0 && gamma <= 2.0)) throw std::domain_error("kpz_U: gamma in (0,2]");
    double q = gamma * gamma / 4.0;
    if (dir == KPZDirection::Forward) return q * x * x + (1.0 - q) * x;
    double a = 2.0 / gamma - gamma / 2.0;
    double rad = 4.0 * x + a * a;
    if (rad < 0.0) throw std::domain_error("kpz_U: inverse outside range");
    return (std::sqrt(rad) - a) / gamma;
}

// Quantum cumulant generating function. As the composition with the KPZ
// parabola it reads Lambda_kappa(2 U_gamma(.)); the radicand is a perfect
// square and collapses to cos(pi [2 lambda'/c + b]) with c = max(1, kappa/4).
struct LambdaQDomain {
    double lo, hi;
};
inline LambdaQDomain lambda_quantum_domain(double kappa) {
    if (kappa <= 4.0) return {0.5 - 2.0 / kappa, 0.75 - 2.0 / kappa};
    return {0.5 - kappa / 8.0, 0.5 - kappa / 16.0};
}

inline double lambda_quantum(double lam_prime, double kappa) {
    auto dom = lambda_quantum_domain(kappa);
    if (lam_prime < dom.lo - 1e-12 || lam_prime > dom.hi + 1e-12)
        throw std::domain_error("lambda_quantum: lambda' outside the phase domain");
    KPZParams k = kpz_params(kappa);
    double arg = 2.0 * lam_prime / k.c + k.b;
    double den = std::cos(M_PI * arg);
    if (den <= 0.0) throw std::domain_error("lambda_quantum: at or beyond the pole");
    return std::log(std::cos(M_PI * (1.0 - 4.0 / kappa)) / den);
}

// ---------------------------------------------------------------------------
// Quantum nesting rate.
// ---------------------------------------------------------------------------

enum class Topology { Disk, Sphere };

// Theta(p) = (c/2pi) J(p') with p = (c/2pi) p' and n = n(kappa); sphere
// doubles via Theta_hat(2p) = 2 Theta(p).
inline double theta_rate(double p, double kappa, Topology topo = Topology::Disk) {
    if (p < 0.0) throw std::domain_error("theta_rate: p >= 0");
    KPZParams k = kpz_params(kappa);
    if (topo == Topology::Sphere) return 2.0 * theta_rate(p / 2.0, kappa, Topology::Disk);
    if (p == 0.0)
        return kappa <= 4.0 ? 0.75 - 2.0 / kappa : 0.5 - kappa / 16.0;
    double pp = 2.0 * M_PI * p / k.c;
    return k.c / (2.0 * M_PI) * rate_J(pp, k.n);
}

// ---------------------------------------------------------------------------
// Numeric Legendre-Fenchel transform (oracle).
// ---------------------------------------------------------------------------

struct LFResult {
    double value, argmax;
    bool boundary = false;
};

// sup_{lam in [lo,hi]} (lam x - f(lam)) by derivative bisection plus Newton
// polish; convexity is probed on a grid first.
inline LFResult legendre_fenchel(const std::function<double(double)>& f, double lo, double hi,
                                 double x, bool check_convex = true) {
    const double step = (hi - lo) * 1e-7;
    auto fp = [&](double l) { return (f(l + step) - f(l - step)) / (2.0 * step); };
    if (check_convex) {
        double prev = fp(lo + 2 * step);
        for (int i = 2; i <= 16; ++i) {
            double l = lo + (hi - lo) * i / 18.0;
            double d = fp(l);
            if (d < prev - 1e-9 * (1.0 + std::fabs(prev)))
                throw std::domain_error("legendre_fenchel: derivative not monotone (non-convex)");
            prev = d;
        }
    }
    double dlo = fp(lo + 2 * step), dhi = fp(hi - 2 * step);
    LFResult r;
    if (x <= dlo) {
        r.value = x * (lo + 2 * step) - f(lo + 2 * step);
        r.argmax = lo;
        r.boundary = true;
        return r;
    }
    if (x >= dhi) {
        r.value = x * (hi - 2 * step) - f(hi - 2 * step);
        r.argmax = hi;
        r.boundary = true;
        return r;
    }
    double a = lo + 2 * step, b = hi - 2 * step;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        (fp(m) < x ? a : b) = m;
    }
    double l = 0.5 * (a + b);
    // Newton polish on f'(l) = x with numeric second derivative
    for (int it = 0; it < 8; ++it) {
        double d1 = fp(l);
        double d2 = (fp(l + step) - fp(l - step)) / (2.0 * step);
        if (!(std::fabs(d2) > 0)) break;
        double nl = l - (d1 - x) / d2;
        if (nl <= lo || nl >= hi) break;
        l = nl;
    }
    r.value = x * l - f(l);
    r.argmax = l;
    return r;
}

// ---------------------------------------------------------------------------
// Quantum quadrature oracle: the radius-mixing convolution evaluated
// directly; the returned empirical rate converges to Theta(p) as A grows.
// ---------------------------------------------------------------------------

inline double quantum_quadrature_rate(double p, double kappa, double A,
                                      Topology topo = Topology::Disk) {
    if (!(p > 0.0)) throw std::domain_error("quantum_quadrature: p > 0");
    if (!(A > 0.0)) throw std::domain_error("quantum_quadrature: A > 0");
    KPZParams k = kpz_params(kappa);
    double ag = k.a_gamma, g = k.gamma;

    // After t = A/y the exponent is -A phi(y) with
    //   phi(y) = (y - ag)^2 / (2 y) + gamma_kappa(gamma p y) / y.
    auto phi = [&](double y) {
        return (y - ag) * (y - ag) / (2.0 * y) + gamma_kappa(g * p * y, kappa) / y;
    };
    if (topo == Topology::Disk) {
        // bracket the minimum of phi, factor the exponential scale out of
        // the integrand so the quadrature works at O(1) magnitudes
        double ymin = 1e-3, ymax = 8.0 + 4.0 * p;
        double best = phi(1.0), ybest = 1.0;
        for (double y = ymin; y <= ymax; y += 0.005) {
            double v = phi(y);
            if (v < best) {
                best = v;
                ybest = y;
            }
        }
        double lo = ybest, hi = ybest;
        while (lo > 1e-6 && phi(lo) < best + 80.0 / A) lo *= 0.95;
        while (phi(hi) < best + 80.0 / A) hi *= 1.05;
        double I = quad::integrate(
            [&](double y) {
                return std::sqrt(A / (2.0 * M_PI * y)) * std::exp(-A * (phi(y) - best));
            },
            lo, hi, 1e-13);
        if (!(I > 0.0)) throw convergence_error("quantum_quadrature: vanishing integral");
        return best / g - std::log(I) / (g * A);
    }
    // Sphere: two independent radius factors, one shared loop count. The
    // rate term depends on the y's only through S = 1/y1 + 1/y2; tabulate
    // gamma_kappa(g p / S) S on a dense grid to keep the 2-D quadrature
    // affordable.
    double ymin = 1e-4, ymax = 16.0 + 8.0 * p;
    double Smin = 2.0 / ymax, Smax = 2.0 / ymin;
    const int NG = 20000;
    std::vector<double> grid(NG + 1);
    double lS0 = std::log(Smin), lS1 = std::log(Smax);
    for (int i = 0; i <= NG; ++i) {
        double S = std::exp(lS0 + (lS1 - lS0) * i / NG);
        grid[i] = gamma_kappa(g * p / S, kappa) * S;
    }
    auto rate_term = [&](double S) {
        double t = (std::log(S) - lS0) / (lS1 - lS0) * NG;
        int i = std::max(0, std::min(NG - 1, int(t)));
        double f = t - i;
        return grid[i] * (1.0 - f) + grid[i + 1] * f;
    };
    auto phi2 = [&](double y1, double y2) {
        double S = 1.0 / y1 + 1.0 / y2;
        return (y1 - ag) * (y1 - ag) / (2.0 * y1) + (y2 - ag) * (y2 - ag) / (2.0 * y2) +
               rate_term(S);
    };
    double ybest = 1.0, best = phi2(1.0, 1.0);
    for (double y = 0.05; y <= 8.0 + 4.0 * p; y += 0.01) {
        double v = phi2(y, y);
        if (v < best) {
            best = v;
            ybest = y;
        }
    }
    double lo = ybest, hi = ybest;
    while (lo > 2e-4 && phi2(lo, ybest) < best + 40.0 / A) lo *= 0.93;
    while (hi < ymax / 1.3 && phi2(hi, ybest) < best + 40.0 / A) hi *= 1.07;
    auto inner = [&](double y1) {
        return quad::integrate(
            [&](double y2) {
                return std::sqrt(A / (2.0 * M_PI * y1)) * std::sqrt(A / (2.0 * M_PI * y2)) *
                       std::exp(-A * (phi2(y1, y2) - best));
            },
            lo, hi, 1e-9);
    };
    double I = quad::integrate(inner, lo, hi, 1e-8);
    if (!(I > 0.0)) throw convergence_error("quantum_quadrature: vanishing integral");
    return best / g - std::log(I) / (g * A);
}

// Three-point fit of rate(A) = Theta + (a + b ln A)/A, removing the leading
// finite-size corrections of the saddle evaluation.
inline double richardson_rate(double p, double kappa, Topology topo = Topology::Disk) {
    double A1 = 100, A2 = 200, A3 = 400;
    double r1 = quantum_quadrature_rate(p, kappa, A1, topo);
    double r2 = quantum_quadrature_rate(p, kappa, A2, topo);
    double r3 = quantum_quadrature_rate(p, kappa, A3, topo);
    // solve [1, 1/A, lnA/A] x = r for the constant term
    double M[3][3] = {{1, 1 / A1, std::log(A1) / A1},
                      {1, 1 / A2, std::log(A2) / A2},
                      {1, 1 / A3, std::log(A3) / A3}};
    double rhs[3] = {r1, r2, r3};
    // Gaussian elimination (3x3)
    for (int i = 0; i < 3; ++i) {
        int piv = i;
        for (int j = i + 1; j < 3; ++j)
            if (std::fabs(M[j][i]) > std::fabs(M[piv][i])) piv = j;
        std::swap(M[i], M[piv]);
        std::swap(rhs[i], rhs[piv]);
        for (int j = i + 1; j < 3; ++j) {
            double f = M[j][i] / M[i][i];
            for (int c = i; c < 3; ++c) M[j][c] -= f * M[i][c];
            rhs[j] -= f * rhs[i];
        }
    }
    double x2 = rhs[2] / M[2][2];
    double x1 = (rhs[1] - M[1][2] * x2) / M[1][1];
    double x0 = (rhs[0] - M[0][1] * x1 - M[0][2] * x2) / M[0][0];
    return x0;
}

// ---------------------------------------------------------------------------
// Weighted loops: bivariate rates.
// ---------------------------------------------------------------------------

struct WeightLaw {
    enum Kind { BernoulliPM1, Gaussian, FiniteSupport } kind = BernoulliPM1;
    double sigma2 = 1.0;
    std::vector<double> values, probs;

    double cumulant(double lam) const {
        switch (kind) {
            case BernoulliPM1: return std::log(std::cosh(lam));
            case Gaussian: return 0.5 * sigma2 * lam * lam;
            case FiniteSupport: {
                double s = 0;
                for (std::size_t i = 0; i < values.size(); ++i)
                    s += probs[i] * std::exp(lam * values[i]);
                return std::log(s);
            }
        }
        return 0;
    }
    double cumulant_prime(double lam) const {
        switch (kind) {
            case BernoulliPM1: return std::tanh(lam);
            case Gaussian: return sigma2 * lam;
            case FiniteSupport: {
                double s = 0, sx = 0;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    double w = probs[i] * std::exp(lam * values[i]);
                    s += w;
                    sx += w * values[i];
                }
                return sx / s;
            }
        }
        return 0;
    }
    double mean_min() const {
        switch (kind) {
            case BernoulliPM1: return -1.0;
            case Gaussian: return -1e300;
            case FiniteSupport: {
                double m = values[0];
                for (double v : values) m = std::min(m, v);
                return m;
            }
        }
        return 0;
    }
    double mean_max() const {
        switch (kind) {
            case BernoulliPM1: return 1.0;
            case Gaussian: return 1e300;
            case FiniteSupport: {
                double m = values[0];
                for (double v : values) m = std::max(m, v);
                return m;
            }
        }
        return 0;
    }
};

// Solves q/p = Lambda_mu'(lambda') on the strictly increasing cumulant
// derivative (Newton with bisection fallback).
inline double conjugate_parameter(const WeightLaw& law, double ratio) {
    if (!(ratio > law.mean_min() && ratio < law.mean_max()))
        throw std::domain_error("bivariate rate: q/p outside the moment range");
    double lo = -1.0, hi = 1.0;
    while (law.cumulant_prime(lo) > ratio) lo *= 2.0;
    while (law.cumulant_prime(hi) < ratio) hi *= 2.0;
    double lam = 0.5 * (lo + hi);
    for (int it = 0; it < 120; ++it) {
        double f = law.cumulant_prime(lam) - ratio;
        if (std::fabs(f) < 1e-14) return lam;
        if (f > 0)
            hi = lam;
        else
            lo = lam;
        double d = (law.cumulant_prime(lam + 1e-7) - law.cumulant_prime(lam - 1e-7)) / 2e-7;
        double nl = d > 0 ? lam - f / d : 0.5 * (lo + hi);
        lam = (nl > lo && nl < hi) ? nl : 0.5 * (lo + hi);
    }
    return lam;
}

enum class BivariateModel { Map, CLE };

// J(p,q) = J(p) + q lam' - p Lambda_mu(lam'); the CLE variant replaces J by
// Theta at the quantum scaling.
inline double bivariate_rate(double p, double q, BivariateModel model, double n_or_kappa,
                             const WeightLaw& law, Topology topo = Topology::Disk) {
    if (!(p > 0.0)) throw std::domain_error("bivariate_rate: p > 0");
    double lam = conjugate_parameter(law, q / p);
    double extra = q * lam - p * law.cumulant(lam);
    if (model == BivariateModel::Map) return rate_J(p, n_or_kappa) + extra;
    return theta_rate(p, n_or_kappa, topo) + extra;
}

// gamma_kappa(nu, alpha) = gamma_kappa(nu) + lam' alpha - nu Lambda_mu(lam').
inline double gamma_kappa_weighted(double nu, double alpha, double kappa, const WeightLaw& law) {
    if (!(nu > 0.0)) throw std::domain_error("gamma_kappa_weighted: nu > 0");
    double lam = conjugate_parameter(law, alpha / nu);
    return gamma_kappa(nu, kappa) + lam * alpha - nu * law.cumulant(lam);
}

} // namespace loopnest

#endif
