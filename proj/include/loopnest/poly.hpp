#ifndef LOOPNEST_POLY_HPP
#define LOOPNEST_POLY_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "loopnest/rational.hpp"

namespace loopnest {

// Variable slots of the shared polynomial ring. Everything exact in the
// combinatorial layer lives in Q[u, s, n, g, h, a].
enum Var : int { VU = 0, VS = 1, VN = 2, VG = 3, VH = 4, VA = 5 };
inline constexpr int kNumVars = 6;

using Mono = std::array<std::uint8_t, kNumVars>;

inline Mono mono_one() { return Mono{0, 0, 0, 0, 0, 0}; }
inline Mono mono_var(Var v, std::uint8_t p = 1) {
    Mono m = mono_one();
    m[v] = p;
    return m;
}

// Degree truncation applied by every ring operation: u-degree capped by
// max_u, total (g+h)-degree capped by max_face. max_face bounds the face
// content so that formal-weight computations stay finite.
struct Trunc {
    int max_u = 64;
    int max_face = 64;
    bool keeps(const Mono& m) const {
        return m[VU] <= max_u && int(m[VG]) + int(m[VH]) <= max_face;
    }
};

struct Term {
    Mono mono;
    Rational coef;
};

inline bool mono_less(const Mono& a, const Mono& b) { return a < b; }

// Sparse multivariate polynomial, terms sorted by monomial (lex over the
// exponent array), no zero coefficients stored.
class Poly {
public:
    Poly() = default;
    explicit Poly(const Rational& c) {
        if (!c.is_zero()) terms_.push_back({mono_one(), c});
    }
    explicit Poly(std::int64_t c) : Poly(Rational(c)) {}

    static Poly var(Var v, std::uint8_t p = 1) {
        Poly q;
        q.terms_.push_back({mono_var(v, p), Rational(1)});
        return q;
    }
    static Poly term(const Mono& m, const Rational& c) {
        Poly q;
        if (!c.is_zero()) q.terms_.push_back({m, c});
        return q;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coef != b.terms_[i].coef)
                return false;
        return true;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Rational coeff(const Mono& m) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Mono& k) { return mono_less(t.mono, k); });
        if (it != terms_.end() && it->mono == m) return it->coef;
        return Rational(0);
    }

    void add_term(const Mono& m, const Rational& c) {
        if (c.is_zero()) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Mono& k) { return mono_less(t.mono, k); });
        if (it != terms_.end() && it->mono == m) {
            it->coef += c;
            if (it->coef.is_zero()) terms_.erase(it);
        } else {
            terms_.insert(it, {m, c});
        }
    }

    int degree(Var v) const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, int(t.mono[v]));
        return d;
    }

    friend Poly operator+(const Poly& a, const Poly& b) { return merged(a, b, false); }
    friend Poly operator-(const Poly& a, const Poly& b) { return merged(a, b, true); }
    Poly operator-() const {
        Poly r = *this;
        for (auto& t : r.terms_) t.coef = -t.coef;
        return r;
    }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }

    Poly scaled(const Rational& c) const {
        if (c.is_zero()) return Poly();
        Poly r = *this;
        for (auto& t : r.terms_) t.coef *= c;
        return r;
    }

    // Truncated product.
    static Poly mul(const Poly& a, const Poly& b, const Trunc& tr) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::map<Mono, Rational> acc;
        for (const auto& ta : a.terms_) {
            for (const auto& tb : b.terms_) {
                Mono m;
                bool ok = true;
                for (int i = 0; i < kNumVars; ++i) {
                    int e = int(ta.mono[i]) + int(tb.mono[i]);
                    if (e > 255) { ok = false; break; }
                    m[i] = std::uint8_t(e);
                }
                if (!ok || !tr.keeps(m)) continue;
                auto [it, fresh] = acc.emplace(m, Rational(0));
                it->second += ta.coef * tb.coef;
            }
        }
        Poly r;
        r.terms_.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (!c.is_zero()) r.terms_.push_back({m, c});
        return r;
    }

    Poly truncated(const Trunc& tr) const {
        Poly r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_)
            if (tr.keeps(t.mono)) r.terms_.push_back(t);
        return r;
    }

    // Coefficient of v^p, as a polynomial in the remaining variables.
    Poly coeff_of(Var v, int p) const {
        Poly r;
        for (const auto& t : terms_) {
            if (int(t.mono[v]) != p) continue;
            Mono m = t.mono;
            m[v] = 0;
            r.add_term(m, t.coef);
        }
        return r;
    }

    // Substitute a rational value for one variable.
    Poly eval_var(Var v, const Rational& x) const {
        Poly r;
        for (const auto& t : terms_) {
            Rational c = t.coef;
            for (int i = 0; i < t.mono[v]; ++i) c *= x;
            Mono m = t.mono;
            m[v] = 0;
            r.add_term(m, c);
        }
        return r;
    }

    // d/dv scaled by v (Euler operator on one variable): v d/dv.
    Poly euler(Var v) const {
        Poly r = *this;
        std::vector<Term> keep;
        keep.reserve(r.terms_.size());
        for (auto& t : r.terms_) {
            if (t.mono[v] == 0) continue;
            t.coef *= Rational(t.mono[v]);
            keep.push_back(t);
        }
        r.terms_ = std::move(keep);
        return r;
    }

    double eval_double(const std::array<double, kNumVars>& x) const {
        double s = 0;
        for (const auto& t : terms_) {
            double p = t.coef.to_double();
            for (int i = 0; i < kNumVars; ++i)
                for (int e = 0; e < t.mono[i]; ++e) p *= x[i];
            s += p;
        }
        return s;
    }

private:
    std::vector<Term> terms_;

    static Poly merged(const Poly& a, const Poly& b, bool sub) {
        Poly r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && mono_less(a.terms_[i].mono, b.terms_[j].mono))) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || mono_less(b.terms_[j].mono, a.terms_[i].mono)) {
                Term t = b.terms_[j++];
                if (sub) t.coef = -t.coef;
                r.terms_.push_back(t);
            } else {
                Rational c = sub ? a.terms_[i].coef - b.terms_[j].coef : a.terms_[i].coef + b.terms_[j].coef;
                if (!c.is_zero()) r.terms_.push_back({a.terms_[i].mono, c});
                ++i;
                ++j;
            }
        }
        return r;
    }
};

inline Poly operator*(const Poly& a, const Rational& c) { return a.scaled(c); }
inline Poly operator*(const Rational& c, const Poly& a) { return a.scaled(c); }

} // namespace loopnest

#endif
