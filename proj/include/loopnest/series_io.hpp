#ifndef LOOPNEST_SERIES_IO_HPP
#define LOOPNEST_SERIES_IO_HPP

#include <json.hpp>

#include "loopnest/poly.hpp"

namespace loopnest {

// Dump format for exact series in u (and optionally s) with coefficients in
// Q[n]: {"vars":["u","s"],"max_u":N,"terms":[{"exp":[a,b],
// "coef_n_poly":["p0/q0","p1/q1",...]}]}. Round-trips bit-exactly.
inline nlohmann::json series_to_json(const Poly& p, int max_u, bool has_s) {
    for (const auto& t : p.terms()) {
        if (t.mono[VG] || t.mono[VH] || t.mono[VA])
            throw std::invalid_argument("series_to_json: g/h/alpha must be specialized first");
        if (!has_s && t.mono[VS])
            throw std::invalid_argument("series_to_json: series carries s but has_s is false");
    }
    nlohmann::json j;
    j["vars"] = has_s ? nlohmann::json::array({"u", "s"}) : nlohmann::json::array({"u"});
    j["max_u"] = max_u;

    // Collect (u,s) cells in deterministic order, each with its n-polynomial.
    std::map<std::pair<int, int>, std::map<int, Rational>> cells;
    for (const auto& t : p.terms())
        cells[{t.mono[VU], t.mono[VS]}][t.mono[VN]] = t.coef;

    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [us, npoly] : cells) {
        nlohmann::json cell;
        if (has_s)
            cell["exp"] = nlohmann::json::array({us.first, us.second});
        else
            cell["exp"] = nlohmann::json::array({us.first});
        int nmax = npoly.rbegin()->first;
        nlohmann::json coefs = nlohmann::json::array();
        for (int k = 0; k <= nmax; ++k) {
            auto it = npoly.find(k);
            coefs.push_back(it == npoly.end() ? "0" : it->second.str());
        }
        cell["coef_n_poly"] = coefs;
        terms.push_back(cell);
    }
    j["terms"] = terms;
    return j;
}

inline Poly series_from_json(const nlohmann::json& j, int* max_u_out = nullptr, bool* has_s_out = nullptr) {
    bool has_s = j.at("vars").size() > 1;
    if (max_u_out) *max_u_out = j.at("max_u").get<int>();
    if (has_s_out) *has_s_out = has_s;
    Poly p;
    for (const auto& cell : j.at("terms")) {
        int eu = cell.at("exp")[0].get<int>();
        int es = has_s && cell.at("exp").size() > 1 ? cell.at("exp")[1].get<int>() : 0;
        const auto& coefs = cell.at("coef_n_poly");
        for (std::size_t k = 0; k < coefs.size(); ++k) {
            Rational c = Rational::from_string(coefs[k].get<std::string>());
            if (c.is_zero()) continue;
            Mono m = mono_one();
            m[VU] = std::uint8_t(eu);
            m[VS] = std::uint8_t(es);
            m[VN] = std::uint8_t(k);
            p.add_term(m, c);
        }
    }
    return p;
}

} // namespace loopnest

#endif
