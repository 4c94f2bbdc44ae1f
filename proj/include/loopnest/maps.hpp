#ifndef LOOPNEST_MAPS_HPP
#define LOOPNEST_MAPS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "loopnest/poly.hpp"

namespace loopnest {

struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& w) : std::runtime_error(w) {}
};

// Rooted combinatorial map as a permutation pair on half-edges 0..2E-1.
// sigma = next half-edge around its vertex, iota = edge pairing involution,
// phi = sigma o iota traverses faces. Root is half-edge 0; boundary faces
// are listed in label order (face of the root first).
struct RootedMap {
    int nh = 0;
    std::vector<int> sigma, iota, phi;
    std::vector<int> vert_of, face_of;
    std::vector<int> face_deg;
    std::vector<int> eid; // contiguous edge index per half-edge
    std::vector<int> boundary;
    std::vector<int> broot; // distinguished half-edge per boundary (broot[0] == 0)
    int n_vertices = 0, n_faces = 0;

    int edges() const { return nh / 2; }
    int euler() const { return n_vertices - edges() + n_faces; }

    int edge_id(int h) const { return eid[h]; }

    std::vector<int> code() const {
        std::vector<int> c;
        c.reserve(2 * nh + broot.size());
        c.insert(c.end(), sigma.begin(), sigma.end());
        c.insert(c.end(), iota.begin(), iota.end());
        c.insert(c.end(), broot.begin(), broot.end());
        return c;
    }

    // Fills vert_of/face_of/face_deg from sigma/iota.
    void index() {
        phi.assign(nh, 0);
        for (int h = 0; h < nh; ++h) phi[h] = sigma[iota[h]];
        vert_of.assign(nh, -1);
        n_vertices = 0;
        for (int h = 0; h < nh; ++h) {
            if (vert_of[h] >= 0) continue;
            for (int x = h; vert_of[x] < 0; x = sigma[x]) vert_of[x] = n_vertices;
            ++n_vertices;
        }
        face_of.assign(nh, -1);
        face_deg.clear();
        n_faces = 0;
        for (int h = 0; h < nh; ++h) {
            if (face_of[h] >= 0) continue;
            int deg = 0;
            for (int x = h; face_of[x] < 0; x = phi[x]) {
                face_of[x] = n_faces;
                ++deg;
            }
            face_deg.push_back(deg);
            ++n_faces;
        }
        eid.assign(nh, -1);
        int ne = 0;
        for (int h = 0; h < nh; ++h) {
            if (eid[h] >= 0) continue;
            eid[h] = eid[iota[h]] = ne++;
        }
    }
};

namespace detail {

// Breadth-first relabeling from the root; the resulting code is the
// canonical form of the rooted map (roots rigidify, so equality of codes
// is isomorphism).
inline std::vector<int> canonical_order(int nh, const std::vector<int>& sigma,
                                        const std::vector<int>& iota) {
    std::vector<int> lab(nh, -1), order;
    order.reserve(nh);
    auto discover = [&](int h) {
        for (int x = h; lab[x] < 0; x = sigma[x]) {
            lab[x] = int(order.size());
            order.push_back(x);
        }
    };
    discover(0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        int m = iota[order[i]];
        if (lab[m] < 0) discover(m);
    }
    return order; // order[new] = old
}

inline void relabel(RootedMap& m) {
    auto order = canonical_order(m.nh, m.sigma, m.iota);
    std::vector<int> lab(m.nh);
    for (int i = 0; i < m.nh; ++i) lab[order[i]] = i;
    std::vector<int> s(m.nh), io(m.nh);
    for (int i = 0; i < m.nh; ++i) {
        s[i] = lab[m.sigma[order[i]]];
        io[i] = lab[m.iota[order[i]]];
    }
    // Boundary roots carry the marking through the relabel.
    std::vector<int> broot;
    for (int r : m.broot) broot.push_back(lab[r]);
    m.sigma = std::move(s);
    m.iota = std::move(io);
    m.index();
    m.broot = std::move(broot);
    m.boundary.clear();
    for (int r : m.broot) m.boundary.push_back(m.face_of[r]);
}

inline bool connected_polygons(int npoly, const std::vector<int>& poly_of,
                               const std::vector<int>& mate) {
    if (npoly <= 1) return true;
    std::vector<int> parent(npoly);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t h = 0; h < mate.size(); ++h) {
        int a = find(poly_of[h]), b = find(poly_of[mate[h]]);
        if (a != b) parent[a] = b;
    }
    int r = find(0);
    for (int p = 1; p < npoly; ++p)
        if (find(p) != r) return false;
    return true;
}

inline void enum_pairings(std::vector<int>& mate, const std::function<void()>& cb) {
    int n = int(mate.size());
    int a = -1;
    for (int i = 0; i < n; ++i)
        if (mate[i] < 0) { a = i; break; }
    if (a < 0) { cb(); return; }
    for (int b = a + 1; b < n; ++b) {
        if (mate[b] >= 0) continue;
        mate[a] = b;
        mate[b] = a;
        enum_pairings(mate, cb);
        mate[a] = -1;
        mate[b] = -1;
    }
}

// Multisets of inner face degrees from `allowed` (sorted) summing to target.
inline void enum_multisets(const std::vector<int>& allowed, int target, std::size_t start,
                           std::vector<int>& cur, const std::function<void()>& cb) {
    if (target == 0) { cb(); return; }
    for (std::size_t i = start; i < allowed.size(); ++i) {
        if (allowed[i] > target) continue;
        cur.push_back(allowed[i]);
        enum_multisets(allowed, target - allowed[i], i, cur, cb);
        cur.pop_back();
    }
}

} // namespace detail

struct MapConstraints {
    std::vector<int> boundary_perims;       // one (disk) or two (cylinder)
    std::vector<int> allowed_inner_degrees; // empty = any degree >= 1
    int max_edges = 8;
    int hard_budget = 8;                    // configured cap; exceeding throws
};

// One loop configuration on a map: the crossed edge set, its loops and the
// Boltzmann statistics.
struct LoopConfig {
    std::uint64_t crossed = 0;                 // bitmask over edge ids
    std::vector<std::vector<int>> loops;       // edge ids per loop
    int n_loops = 0, t1 = 0, t2 = 0, bending = 0;
};

namespace detail {

// Enumerates every gluing of the given polygons (boundaries first, the
// first one rooted at its side 0), keeps planar connected ones, and hands
// each canonical representative to the callback exactly once.
inline void glue_and_visit(const std::vector<int>& polys, int n_boundaries,
                           const std::function<void(const RootedMap&)>& visit,
                           long* labeled_count = nullptr) {
    int nh = 0;
    for (int d : polys) nh += d;
    if (nh == 0) return;
    if (nh % 2) return;

    std::vector<int> poly_of(nh), phi(nh);
    {
        int off = 0;
        for (std::size_t p = 0; p < polys.size(); ++p) {
            for (int i = 0; i < polys[p]; ++i) {
                poly_of[off + i] = int(p);
                phi[off + i] = off + (i + 1) % polys[p];
            }
            off += polys[p];
        }
    }

    std::set<std::vector<int>> seen;
    std::vector<int> mate(nh, -1);

    std::function<void()> leaf = [&]() {
        if (!connected_polygons(int(polys.size()), poly_of, mate)) return;
        RootedMap m;
        m.nh = nh;
        m.iota = mate;
        m.sigma.assign(nh, 0);
        for (int h = 0; h < nh; ++h) m.sigma[h] = phi[mate[h]];
        m.index();
        if (m.euler() != 2) return;
        if (labeled_count) ++*labeled_count;
        m.boundary.clear();
        m.broot.clear();
        for (int b = 0; b < n_boundaries; ++b) {
            int off = 0;
            for (int p = 0; p < b; ++p) off += polys[p];
            m.broot.push_back(off);
            m.boundary.push_back(m.face_of[off]);
        }
        detail::relabel(m);
        if (seen.insert(m.code()).second) visit(m);
    };
    detail::enum_pairings(mate, leaf);
}

} // namespace detail

// Exactly one canonical representative per rooted isomorphism class, in
// deterministic order.
inline std::vector<RootedMap> enumerate_rooted_maps(const MapConstraints& cs) {
    if (cs.max_edges > cs.hard_budget)
        throw budget_error("enumerate_rooted_maps: max_edges exceeds budget");
    int bsum = 0;
    for (int p : cs.boundary_perims) {
        if (p < 0) throw std::invalid_argument("negative perimeter");
        bsum += p;
    }

    std::vector<RootedMap> out;
    // Vertex map: single boundary of perimeter 0, no edges.
    if (cs.boundary_perims.size() == 1 && cs.boundary_perims[0] == 0) {
        RootedMap m;
        m.nh = 0;
        m.n_vertices = 1;
        m.n_faces = 1;
        m.face_deg = {0};
        m.boundary = {0};
        out.push_back(m);
    }
    if (std::count(cs.boundary_perims.begin(), cs.boundary_perims.end(), 0) &&
        (cs.boundary_perims.size() > 1 || bsum > 0))
        return out; // a perimeter-0 boundary only exists in the vertex map

    std::vector<int> allowed = cs.allowed_inner_degrees;
    if (allowed.empty())
        for (int d = 1; d <= 2 * cs.max_edges; ++d) allowed.push_back(d);
    std::sort(allowed.begin(), allowed.end());
    allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());

    for (int E = std::max(1, (bsum + 1) / 2); E <= cs.max_edges; ++E) {
        int inner_sum = 2 * E - bsum;
        if (inner_sum < 0) continue;
        std::vector<int> cur;
        std::vector<std::vector<int>> multisets;
        detail::enum_multisets(allowed, inner_sum, 0, cur,
                               [&]() { multisets.push_back(cur); });
        for (const auto& ms : multisets) {
            std::vector<int> polys = cs.boundary_perims;
            polys.insert(polys.end(), ms.begin(), ms.end());
            detail::glue_and_visit(polys, int(cs.boundary_perims.size()),
                                   [&](const RootedMap& m) { out.push_back(m); });
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const RootedMap& a, const RootedMap& b) {
        if (a.nh != b.nh) return a.nh < b.nh;
        return a.code() < b.code();
    });
    return out;
}

// All crossed-edge configurations: every inner face incident to 0 or 2
// crossed half-edges, boundary faces to none.
inline std::vector<LoopConfig> loop_overlays(const RootedMap& m) {
    int E = m.edges();
    std::vector<bool> is_boundary(m.n_faces, false);
    for (int b : m.boundary) is_boundary[b] = true;

    std::vector<LoopConfig> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << E); ++mask) {
        std::vector<int> inc(m.n_faces, 0);
        bool ok = true;
        for (int h = 0; h < m.nh && ok; ++h) {
            if (mask >> m.edge_id(h) & 1) {
                if (is_boundary[m.face_of[h]]) ok = false;
                else if (++inc[m.face_of[h]] > 2) ok = false;
            }
        }
        if (!ok) continue;
        for (int f = 0; f < m.n_faces && ok; ++f)
            if (inc[f] == 1) ok = false;
        if (!ok) continue;

        LoopConfig cfg;
        cfg.crossed = mask;
        int t2 = 0;
        for (int f = 0; f < m.n_faces; ++f)
            if (inc[f] == 2) ++t2;
        cfg.t2 = t2;
        cfg.t1 = m.n_faces - int(m.boundary.size()) - t2;

        // Trace loops: from a crossed half-edge, find the other crossed side
        // of its face, hop across that edge, repeat.
        std::vector<int> other(m.nh, -1); // other crossed side within the same face
        {
            std::vector<std::vector<int>> sides(m.n_faces);
            for (int h = 0; h < m.nh; ++h)
                if (mask >> m.edge_id(h) & 1) sides[m.face_of[h]].push_back(h);
            for (int f = 0; f < m.n_faces; ++f) {
                if (sides[f].size() == 2) {
                    other[sides[f][0]] = sides[f][1];
                    other[sides[f][1]] = sides[f][0];
                }
            }
        }
        std::vector<bool> edge_done(E, false);
        std::vector<int> turns; // per visited triangle along the current loop
        for (int e = 0; e < E; ++e) {
            if (!(mask >> e & 1) || edge_done[e]) continue;
            std::vector<int> loop_edges;
            turns.clear();
            int h = -1;
            for (int x = 0; x < m.nh; ++x)
                if (m.edge_id(x) == e) { h = x; break; }
            int start = h;
            bool triangles_only = true;
            do {
                edge_done[m.edge_id(h)] = true;
                loop_edges.push_back(m.edge_id(h));
                int exit = other[h];
                if (m.face_deg[m.face_of[h]] == 3)
                    turns.push_back(exit == m.phi[h] ? +1 : -1);
                else
                    triangles_only = false;
                h = m.iota[exit];
            } while (h != start);
            if (triangles_only && turns.size() >= 1) {
                int b = 0;
                int k = int(turns.size());
                for (int i = 0; i < k; ++i)
                    if (turns[i] == turns[(i + 1) % k]) ++b;
                if (k == 1) b = 1; // single turn is cyclically adjacent to itself
                cfg.bending += b;
            }
            cfg.loops.push_back(loop_edges);
        }
        cfg.n_loops = int(cfg.loops.size());
        out.push_back(cfg);
    }
    return out;
}

namespace detail {

// Vertex components of the map with one loop's crossed edges removed.
inline std::vector<int> components_without(const RootedMap& m, const std::vector<int>& loop_edges) {
    std::vector<bool> cut(m.edges(), false);
    for (int e : loop_edges) cut[e] = true;
    std::vector<int> parent(m.n_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int h = 0; h < m.nh; ++h) {
        if (cut[m.edge_id(h)]) continue;
        int a = find(m.vert_of[h]), b = find(m.vert_of[m.iota[h]]);
        if (a != b) parent[a] = b;
    }
    std::vector<int> comp(m.n_vertices);
    for (int v = 0; v < m.n_vertices; ++v) comp[v] = find(v);
    return comp;
}

inline int face_vertex(const RootedMap& m, int face) {
    for (int h = 0; h < m.nh; ++h)
        if (m.face_of[h] == face) return m.vert_of[h];
    return 0; // vertex map
}

} // namespace detail

// Number of loops separating vertex v from the first boundary face.
inline int separating_count_vertex(const RootedMap& m, const LoopConfig& cfg, int v) {
    if (m.nh == 0) return 0;
    int bv = detail::face_vertex(m, m.boundary[0]);
    int p = 0;
    for (const auto& le : cfg.loops) {
        auto comp = detail::components_without(m, le);
        if (comp[v] != comp[bv]) ++p;
    }
    return p;
}

// Number of loops separating the two boundary faces.
inline int separating_count_boundaries(const RootedMap& m, const LoopConfig& cfg) {
    int v1 = detail::face_vertex(m, m.boundary[0]);
    int v2 = detail::face_vertex(m, m.boundary[1]);
    int p = 0;
    for (const auto& le : cfg.loops) {
        auto comp = detail::components_without(m, le);
        if (comp[v1] != comp[v2]) ++p;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Exact censuses. All return polynomials in (u, s, n, g, h, a).
// ---------------------------------------------------------------------------

enum class Marking { None, PointedVertex, SecondBoundary };

// Bending-energy triangulation model: all inner faces are triangles, weight
// g unvisited / h visited, n per loop, a per same-direction turn pair, u per
// vertex, s per separating loop w.r.t. the marking.
inline Poly loop_census(const std::vector<int>& boundary_perims, int max_edges,
                        Marking marking, int hard_budget = 8) {
    MapConstraints cs;
    cs.boundary_perims = boundary_perims;
    cs.allowed_inner_degrees = {3};
    cs.max_edges = max_edges;
    cs.hard_budget = hard_budget;
    auto maps = enumerate_rooted_maps(cs);

    Poly total;
    for (const auto& m : maps) {
        auto overlays = m.nh == 0 ? std::vector<LoopConfig>{LoopConfig{}} : loop_overlays(m);
        int V = std::max(m.n_vertices, 1);
        for (const auto& cfg : overlays) {
            Mono base = mono_one();
            base[VU] = std::uint8_t(V);
            base[VN] = std::uint8_t(cfg.n_loops);
            base[VG] = std::uint8_t(cfg.t1);
            base[VH] = std::uint8_t(cfg.t2);
            base[VA] = std::uint8_t(cfg.bending);
            if (marking == Marking::None) {
                total.add_term(base, Rational(1));
            } else if (marking == Marking::PointedVertex) {
                for (int v = 0; v < V; ++v) {
                    Mono mm = base;
                    mm[VS] = std::uint8_t(m.nh == 0 ? 0 : separating_count_vertex(m, cfg, v));
                    total.add_term(mm, Rational(1));
                }
            } else {
                Mono mm = base;
                mm[VS] = std::uint8_t(separating_count_boundaries(m, cfg));
                total.add_term(mm, Rational(1));
            }
        }
    }
    return total;
}

// Usual maps (no loops): weight wt[k] per inner face of degree k, exact.
inline Poly usual_census(const std::vector<int>& boundary_perims,
                         const std::map<int, Poly>& face_wt, int max_edges, bool pointed,
                         int hard_budget = 8) {
    MapConstraints cs;
    cs.boundary_perims = boundary_perims;
    for (const auto& [k, w] : face_wt)
        if (!w.is_zero()) cs.allowed_inner_degrees.push_back(k);
    cs.max_edges = max_edges;
    cs.hard_budget = hard_budget;
    auto maps = enumerate_rooted_maps(cs);

    Trunc tr; // generous default truncation
    Poly total;
    for (const auto& m : maps) {
        int V = std::max(m.n_vertices, 1);
        Poly w(Rational(1));
        std::vector<bool> is_boundary(std::max(m.n_faces, 1), false);
        for (int b : m.boundary) is_boundary[b] = true;
        for (int f = 0; f < m.n_faces; ++f) {
            if (is_boundary[f]) continue;
            w = Poly::mul(w, face_wt.at(m.face_deg[f]), tr);
        }
        Mono mu = mono_var(VU, std::uint8_t(V));
        Poly contrib = Poly::mul(Poly::term(mu, Rational(pointed ? V : 1)), w, tr);
        total += contrib;
    }
    return total;
}

} // namespace loopnest

#endif
