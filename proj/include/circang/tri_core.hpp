#pragma once

// Ideal triangulations: parsing, edge and cusp classes, quad bookkeeping,
// gluing matrices, dual-graph curves and peripheral curves.
//
// Conventions:
//  * gluings[t][f] = {t', f', perm}: face f of tetrahedron t is glued to face
//    f' = perm[f] of t', vertex i of t going to vertex perm[i] of t'.
//    Oriented triangulations have every perm odd.
//  * Quad slots per tetrahedron: 0 = {01,23}, 1 = {02,13}, 2 = {03,12}, in the
//    cyclic order z -> z' -> z''. Global quad index is slot * N + tet.

#include <circang/exact_linalg.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace circang {

class TriangulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Well-formed input that fails a mathematical precondition (not a structure,
// residual too large, no solution).
class MathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Signals a violated internal invariant (bug or theory violation), as opposed to bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

using Perm = std::array<int, 4>;

inline int perm_sign(const Perm& p) {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) inv += p[i] > p[j];
    return inv % 2 ? -1 : 1;
}

inline Perm perm_inverse(const Perm& p) {
    Perm q{};
    for (int i = 0; i < 4; ++i) q[p[i]] = i;
    return q;
}

// Local edge numbering 01,02,03,12,13,23.
inline int local_edge(int a, int b) {
    if (a > b) std::swap(a, b);
    static constexpr int idx[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return idx[a][b];
}
inline constexpr std::array<std::array<int, 2>, 6> kEdgeVertices{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
inline constexpr std::array<int, 6> kEdgeSlot{0, 1, 2, 2, 1, 0};

inline int edge_slot(int a, int b) { return kEdgeSlot[local_edge(a, b)]; }

// The two vertices of {0,1,2,3} other than a and b, in increasing order.
inline std::array<int, 2> complement2(int a, int b) {
    std::array<int, 2> r{};
    int k = 0;
    for (int i = 0; i < 4; ++i)
        if (i != a && i != b) r[k++] = i;
    return r;
}
inline int remaining_vertex(int a, int b, int c) { return 6 - a - b - c; }

struct Gluing {
    int tet = -1;
    int face = -1;
    Perm perm{};
};

// One passage of a curve through a tetrahedron.
struct CurveStep {
    int tet, entry, exit;
    bool operator==(const CurveStep&) const = default;
};

// Closed path in the dual graph, read cyclically.
struct CurvePath {
    std::vector<CurveStep> steps;

    bool reduced() const {
        return std::all_of(steps.begin(), steps.end(), [](const CurveStep& s) { return s.entry != s.exit; });
    }
};

// Passage through the cusp triangle at vertex `vertex` of `tet`.
struct CuspStep {
    int tet, vertex, entry, exit;
};

struct PeripheralCurve {
    int cusp = 0;
    enum class Role { Meridian, Longitude } role = Role::Meridian;
    IntVector coefficients;
    std::vector<CuspStep> walk;  // empty when the row was supplied explicitly

    CurvePath as_path() const {
        CurvePath p;
        for (const auto& s : walk) p.steps.push_back({s.tet, s.entry, s.exit});
        return p;
    }
};

// Passage around an edge: in `tet`, around local edge {v,w} (v tracks one end),
// entering through face `entry` and leaving through face `exit`.
struct EdgeStep {
    int tet, v, w, entry, exit;
};

class IdealTriangulation {
public:
    IdealTriangulation(std::string name, std::vector<std::array<Gluing, 4>> gluings,
                       std::optional<IntMatrix> peripheral = std::nullopt)
        : name_(std::move(name)), gluings_(std::move(gluings)), peripheral_(std::move(peripheral)) {
        validate_and_derive();
    }

    const std::string& name() const { return name_; }
    int num_tetrahedra() const { return static_cast<int>(gluings_.size()); }
    int num_quads() const { return 3 * num_tetrahedra(); }
    int num_edges() const { return static_cast<int>(edge_members_.size()); }
    int num_cusps() const { return static_cast<int>(cusp_members_.size()); }
    const Gluing& gluing(int t, int f) const { return gluings_[t][f]; }
    const std::vector<std::array<Gluing, 4>>& gluings() const { return gluings_; }
    const std::optional<IntMatrix>& explicit_peripheral() const { return peripheral_; }

    int quad(int tet, int slot) const { return slot * num_tetrahedra() + tet; }
    int quad_tet(int q) const { return q % num_tetrahedra(); }
    int quad_slot(int q) const { return q / num_tetrahedra(); }

    int edge_class(int tet, int a, int b) const { return edge_class_[tet * 6 + local_edge(a, b)]; }
    int cusp(int tet, int v) const { return cusp_[tet * 4 + v]; }
    int valence(int e) const { return static_cast<int>(edge_walks_[e].size()); }
    // Members listed as (tet, local edge index), ascending.
    const std::vector<std::pair<int, int>>& edge_members(int e) const { return edge_members_[e]; }
    const std::vector<std::pair<int, int>>& cusp_members(int c) const { return cusp_members_[c]; }
    // Cyclic walk around edge class e starting at its lowest member, v the lower local vertex there.
    const std::vector<EdgeStep>& edge_walk(int e) const { return edge_walks_[e]; }
    // Number of ends of edge class e at cusp c (0, 1 or 2).
    int incidence(int e, int c) const {
        const auto& s = edge_walks_[e].front();
        return (cusp(s.tet, s.v) == c) + (cusp(s.tet, s.w) == c);
    }

private:
    void validate_and_derive();

    std::string name_;
    std::vector<std::array<Gluing, 4>> gluings_;
    std::optional<IntMatrix> peripheral_;
    std::vector<int> edge_class_, cusp_;
    std::vector<std::vector<std::pair<int, int>>> edge_members_, cusp_members_;
    std::vector<std::vector<EdgeStep>> edge_walks_;
};

namespace detail {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};

// Number classes in order of their lowest member.
inline std::vector<int> canonical_classes(UnionFind& uf, int n, int& count) {
    std::vector<int> id(n, -1), out(n);
    count = 0;
    for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        if (id[r] < 0) id[r] = count++;
        out[i] = id[r];
    }
    return out;
}

}  // namespace detail

inline void IdealTriangulation::validate_and_derive() {
    const int N = num_tetrahedra();
    if (N < 2) throw TriangulationError("malformed file: at least two tetrahedra are required");
    for (int t = 0; t < N; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = gluings_[t][f];
            if (g.tet < 0) throw TriangulationError("unglued face: tetrahedron " + std::to_string(t) + " face " + std::to_string(f));
            if (g.tet >= N || g.face < 0 || g.face > 3)
                throw TriangulationError("malformed file: gluing target out of range at tetrahedron " + std::to_string(t));
            Perm s = g.perm;
            std::sort(s.begin(), s.end());
            if (s != Perm{0, 1, 2, 3}) throw TriangulationError("malformed file: invalid permutation at tetrahedron " + std::to_string(t));
            if (g.perm[f] != g.face)
                throw TriangulationError("malformed file: permutation does not carry face " + std::to_string(f) + " of tetrahedron " +
                                         std::to_string(t) + " to the stated face");
            if (g.tet == t && g.face == f) throw TriangulationError("malformed file: face glued to itself");
            const Gluing& back = gluings_[g.tet][g.face];
            if (back.tet != t || back.face != f || back.perm != perm_inverse(g.perm))
                throw TriangulationError("inconsistent gluing: tetrahedron " + std::to_string(t) + " face " + std::to_string(f) +
                                         " is not glued back by the inverse permutation");
            if (perm_sign(g.perm) != -1)
                throw TriangulationError("orientation inconsistency: tetrahedron " + std::to_string(t) + " face " + std::to_string(f));
        }

    detail::UnionFind ue(6 * N), uc(4 * N);
    for (int t = 0; t < N; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = gluings_[t][f];
            for (int v = 0; v < 4; ++v)
                if (v != f) uc.unite(4 * t + v, 4 * g.tet + g.perm[v]);
            for (int e = 0; e < 6; ++e) {
                auto [a, b] = kEdgeVertices[e];
                if (a == f || b == f) continue;
                ue.unite(6 * t + e, 6 * g.tet + local_edge(g.perm[a], g.perm[b]));
            }
        }
    int ne = 0, nc = 0;
    edge_class_ = detail::canonical_classes(ue, 6 * N, ne);
    cusp_ = detail::canonical_classes(uc, 4 * N, nc);
    edge_members_.assign(ne, {});
    cusp_members_.assign(nc, {});
    for (int i = 0; i < 6 * N; ++i) edge_members_[edge_class_[i]].push_back({i / 6, i % 6});
    for (int i = 0; i < 4 * N; ++i) cusp_members_[cusp_[i]].push_back({i / 4, i % 4});

    edge_walks_.assign(ne, {});
    for (int e = 0; e < ne; ++e) {
        auto [t0, le] = edge_members_[e].front();
        auto [v0, w0] = kEdgeVertices[le];
        int x0 = complement2(v0, w0)[0];
        int t = t0, v = v0, w = w0, x = x0;
        for (;;) {
            int y = remaining_vertex(v, w, x);
            edge_walks_[e].push_back({t, v, w, x, y});
            const Gluing& g = gluings_[t][y];
            t = g.tet;
            v = g.perm[v];
            w = g.perm[w];
            x = g.face;
            if (t == t0 && local_edge(v, w) == le) {
                if (v != v0 || x != x0) throw TriangulationError("malformed file: edge identified with itself reversed");
                break;
            }
            if (edge_walks_[e].size() > edge_members_[e].size())
                throw InternalError("edge walk did not close");
        }
        if (edge_walks_[e].size() != edge_members_[e].size()) throw InternalError("edge walk missed members");
    }

    // Each cusp link is a closed orientable surface; a torus iff its Euler characteristic vanishes.
    std::vector<int> ends(nc, 0);
    for (int e = 0; e < ne; ++e) {
        const auto& s = edge_walks_[e].front();
        ++ends[cusp(s.tet, s.v)];
        ++ends[cusp(s.tet, s.w)];
    }
    for (int c = 0; c < nc; ++c) {
        int triangles = static_cast<int>(cusp_members_[c].size());
        if (2 * ends[c] != triangles)
            throw TriangulationError("non-torus cusp: cusp " + std::to_string(c) + " has Euler characteristic " +
                                     std::to_string(ends[c] - triangles / 2));
    }
    if (ne != N) throw InternalError("edge count differs from tetrahedron count despite torus cusps");

    if (peripheral_ && (peripheral_->rows() != static_cast<std::size_t>(2 * nc) || peripheral_->cols() != static_cast<std::size_t>(3 * N)))
        throw TriangulationError("peripheral matrix of wrong shape: expected " + std::to_string(2 * nc) + "x" + std::to_string(3 * N));
}

// ---------------------------------------------------------------------------
// Parsing

inline IdealTriangulation parse_triangulation_json(const nlohmann::json& j) {
    if (!j.is_object()) throw TriangulationError("malformed file: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "name" && it.key() != "tetrahedra" && it.key() != "gluings" && it.key() != "peripheral")
            throw TriangulationError("malformed file: unknown field '" + it.key() + "'");
    try {
        std::string name = j.at("name").get<std::string>();
        int N = j.at("tetrahedra").get<int>();
        const auto& gl = j.at("gluings");
        if (N < 0 || !gl.is_array() || gl.size() != static_cast<std::size_t>(N))
            throw TriangulationError("malformed file: gluings must list one entry per tetrahedron");
        std::vector<std::array<Gluing, 4>> gluings(N);
        for (int t = 0; t < N; ++t) {
            if (!gl[t].is_array() || gl[t].size() != 4) throw TriangulationError("malformed file: each tetrahedron needs 4 face gluings");
            for (int f = 0; f < 4; ++f) {
                const auto& e = gl[t][f];
                if (e.is_null()) continue;  // reported as unglued
                if (!e.is_array() || e.size() != 3 || !e[2].is_array() || e[2].size() != 4)
                    throw TriangulationError("malformed file: gluing entries are [tet, face, [4 ints]]");
                Gluing g;
                g.tet = e[0].get<int>();
                g.face = e[1].get<int>();
                for (int i = 0; i < 4; ++i) g.perm[i] = e[2][i].get<int>();
                gluings[t][f] = g;
            }
        }
        std::optional<IntMatrix> periph;
        if (j.contains("peripheral")) {
            auto rows = j.at("peripheral").get<std::vector<std::vector<long long>>>();
            if (rows.empty()) throw TriangulationError("peripheral matrix of wrong shape: no rows");
            for (const auto& r : rows)
                if (r.size() != static_cast<std::size_t>(3 * N))
                    throw TriangulationError("peripheral matrix of wrong shape: rows need " + std::to_string(3 * N) + " entries");
            periph = IntMatrix::from_rows(rows);
        }
        return IdealTriangulation(std::move(name), std::move(gluings), std::move(periph));
    } catch (const nlohmann::json::exception& e) {
        throw TriangulationError(std::string("malformed file: ") + e.what());
    }
}

inline IdealTriangulation parse_triangulation(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw TriangulationError(std::string("malformed file: ") + e.what());
    }
    return parse_triangulation_json(j);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TriangulationError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline IdealTriangulation load_triangulation(const std::string& path) { return parse_triangulation(read_text_file(path)); }

inline nlohmann::json to_json(const IdealTriangulation& T) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& row : T.gluings()) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& x : row) r.push_back({x.tet, x.face, x.perm});
        g.push_back(r);
    }
    nlohmann::json j{{"name", T.name()}, {"tetrahedra", T.num_tetrahedra()}, {"gluings", g}};
    if (T.explicit_peripheral()) {
        const auto& P = *T.explicit_peripheral();
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < P.rows(); ++i) {
            nlohmann::json r = nlohmann::json::array();
            for (std::size_t k = 0; k < P.cols(); ++k) r.push_back(static_cast<long long>(P(i, k)));
            rows.push_back(r);
        }
        j["peripheral"] = rows;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Curves

// Cyclic free reduction of a closed sequence of crossings. A crossing is a
// (cell, side exited) pair; `enter(c)` gives the (cell, side entered) it leads
// to. A crossing that leaves through the side just entered cancels with its
// predecessor.
template <class Enter>
std::vector<std::pair<int, int>> reduce_crossings(const std::vector<std::pair<int, int>>& cr, Enter enter) {
    std::vector<std::pair<int, int>> st;
    for (const auto& c : cr) {
        if (!st.empty() && c == enter(st.back()))
            st.pop_back();
        else
            st.push_back(c);
    }
    std::size_t lo = 0, hi = st.size();
    while (hi - lo >= 2 && st[lo] == enter(st[hi - 1])) {
        ++lo;
        --hi;
    }
    return {st.begin() + lo, st.begin() + hi};
}

// Closed path from a cyclic list of crossings (tet, face exited).
template <class Tri>
CurvePath path_from_crossings(const Tri& T, const std::vector<std::pair<int, int>>& crossings) {
    CurvePath p;
    const std::size_t n = crossings.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& prev = crossings[(i + n - 1) % n];
        const Gluing& g = T.gluing(prev.first, prev.second);
        if (g.tet != crossings[i].first) throw InternalError("crossings do not form a closed path");
        p.steps.push_back({crossings[i].first, g.face, crossings[i].second});
    }
    return p;
}

// Cancel backtracking (leaving through the face just entered) cyclically until none is left.
inline CurvePath reduce_path(const IdealTriangulation& T, const CurvePath& p) {
    std::vector<std::pair<int, int>> cr;
    for (const auto& st : p.steps) cr.push_back({st.tet, st.exit});
    auto r = reduce_crossings(cr, [&](const std::pair<int, int>& c) {
        const Gluing& g = T.gluing(c.first, c.second);
        return std::make_pair(g.tet, g.face);
    });
    return path_from_crossings(T, r);
}

inline Z2Vector curve_coefficients_mod2(const IdealTriangulation& T, const CurvePath& path) {
    if (!path.reduced()) throw std::invalid_argument("unreduced path: a step enters and exits through the same face");
    Z2Vector v(T.num_quads());
    for (const auto& s : path.steps) v.flip(T.quad(s.tet, edge_slot(s.entry, s.exit)));
    return v;
}

// Spanning-tree cycle basis of the dual graph, reduced. Tree grown breadth-first from tetrahedron `root`.
inline std::vector<CurvePath> cycle_basis(const IdealTriangulation& T, int root = 0) {
    const int N = T.num_tetrahedra();
    std::vector<int> parent(N, -1), parent_face(N, -1), depth(N, -1);
    std::vector<std::vector<bool>> tree(N, std::vector<bool>(4, false));
    std::deque<int> q{root};
    depth[root] = 0;
    while (!q.empty()) {
        int t = q.front();
        q.pop_front();
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = T.gluing(t, f);
            if (depth[g.tet] >= 0) continue;
            depth[g.tet] = depth[t] + 1;
            parent[g.tet] = t;
            parent_face[g.tet] = g.face;  // face of the child leading back to the parent
            tree[t][f] = tree[g.tet][g.face] = true;
            q.push_back(g.tet);
        }
    }
    // Crossings from the root down to t.
    auto down = [&](int t) {
        std::vector<std::pair<int, int>> c;
        while (t != root) {
            int p = parent[t];
            c.push_back({p, T.gluing(t, parent_face[t]).face});
            t = p;
        }
        std::reverse(c.begin(), c.end());
        return c;
    };
    std::vector<CurvePath> basis;
    for (int t = 0; t < N; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = T.gluing(t, f);
            if (tree[t][f] || std::make_pair(g.tet, g.face) < std::make_pair(t, f)) continue;
            auto c = down(t);
            c.push_back({t, f});
            auto back = down(g.tet);
            for (auto it = back.rbegin(); it != back.rend(); ++it) c.push_back({T.gluing(it->first, it->second).tet,
                                                                                T.gluing(it->first, it->second).face});
            basis.push_back(reduce_path(T, path_from_crossings(T, c)));
        }
    return basis;
}

// Small loop encircling edge class e.
inline CurvePath edge_loop(const IdealTriangulation& T, int e) {
    CurvePath p;
    for (const auto& s : T.edge_walk(e)) p.steps.push_back({s.tet, s.entry, s.exit});
    return p;
}

// ---------------------------------------------------------------------------
// Gluing matrices

struct GluingData {
    int N = 0, k = 0;
    IntMatrix G;   // N x 3N, blocks [G | G' | G'']
    IntMatrix Gd;  // 2k x 3N, rows mu_1, lambda_1, ..., mu_k, lambda_k
    std::vector<PeripheralCurve> peripheral;

    IntVector peripheral_row(std::size_t i) const { return Gd.row(i); }
};

// Coefficient vector of a walk in the cusp triangulation. A passage through the
// triangle at vertex v, entering through the side in face a and leaving through
// the side in face b, cuts the corner at edge vw (w the fourth vertex); it counts
// +1 when the corner lies on the left, i.e. when (v,a,b,w) is an odd permutation.
inline IntVector cusp_walk_coefficients(const IdealTriangulation& T, const std::vector<CuspStep>& walk) {
    IntVector c(T.num_quads());
    for (const auto& s : walk) {
        int w = remaining_vertex(s.vertex, s.entry, s.exit);
        int sign = -perm_sign({s.vertex, s.entry, s.exit, w});
        c[T.quad(s.tet, edge_slot(s.vertex, w))] += sign;
    }
    return c;
}

// Neumann-Zagier symplectic pairing of two coefficient rows; equals -2 for a
// positively oriented meridian/longitude pair.
inline Int nz_pairing(int N, const IntVector& x, const IntVector& y) {
    Int r = 0;
    for (int t = 0; t < N; ++t) {
        Int ax = x[t] - x[2 * N + t], bx = x[N + t] - x[2 * N + t];
        Int ay = y[t] - y[2 * N + t], by = y[N + t] - y[2 * N + t];
        r += ax * by - bx * ay;
    }
    return r;
}

namespace detail {

// Walk around the link vertex at end v of edge class e (as a cusp walk).
inline std::vector<CuspStep> vertex_loop(const IdealTriangulation& T, int e, bool far_end) {
    std::vector<CuspStep> w;
    for (const auto& s : T.edge_walk(e)) w.push_back({s.tet, far_end ? s.w : s.v, s.entry, s.exit});
    return w;
}

}  // namespace detail

struct PeripheralOptions {
    // Root triangle index within each cusp for the spanning tree.
    int root = 0;
};

// Meridian/longitude walks for every cusp.
inline std::vector<PeripheralCurve> peripheral_basis(const IdealTriangulation& T, PeripheralOptions opt = {}) {
    const int N = T.num_tetrahedra();
    std::vector<PeripheralCurve> out;
    for (int c = 0; c < T.num_cusps(); ++c) {
        const auto& tri = T.cusp_members(c);
        const int nt = static_cast<int>(tri.size());
        std::map<std::pair<int, int>, int> index;
        for (int i = 0; i < nt; ++i) index[tri[i]] = i;
        auto neighbour = [&](int i, int f) {
            auto [t, v] = tri[i];
            const Gluing& g = T.gluing(t, f);
            return std::make_pair(index.at({g.tet, g.perm[v]}), g.face);
        };

        // Dual edges, oriented from the lexicographically smaller (triangle, side).
        std::map<std::pair<int, int>, int> dual;  // (triangle, side) -> dual edge id (either end)
        std::vector<std::pair<int, int>> dual_tail;
        for (int i = 0; i < nt; ++i)
            for (int f = 0; f < 4; ++f) {
                if (f == tri[i].second || dual.count({i, f})) continue;
                auto nb = neighbour(i, f);
                int id = static_cast<int>(dual_tail.size());
                dual_tail.push_back({i, f});
                dual[{i, f}] = id;
                dual[nb] = id;
            }
        // Orientation sign of crossing side f of triangle i along dual edge.
        auto crossing_sign = [&](int i, int f) { return dual_tail[dual.at({i, f})] == std::make_pair(i, f) ? 1 : -1; };

        const int root = ((opt.root % nt) + nt) % nt;
        std::vector<int> depth(nt, -1), par(nt, -1), par_side(nt, -1);
        std::vector<bool> in_tree(dual_tail.size(), false);
        std::deque<int> q{root};
        depth[root] = 0;
        while (!q.empty()) {
            int i = q.front();
            q.pop_front();
            for (int f = 0; f < 4; ++f) {
                if (f == tri[i].second) continue;
                auto [j, fj] = neighbour(i, f);
                if (depth[j] >= 0) continue;
                depth[j] = depth[i] + 1;
                par[j] = i;
                par_side[j] = fj;
                in_tree[dual.at({i, f})] = true;
                q.push_back(j);
            }
        }
        std::vector<int> nontree;
        std::vector<int> col(dual_tail.size(), -1);
        for (std::size_t d = 0; d < dual_tail.size(); ++d)
            if (!in_tree[d]) {
                col[d] = static_cast<int>(nontree.size());
                nontree.push_back(static_cast<int>(d));
            }
        const std::size_t m = nontree.size();

        // Crossings (triangle, side exited) from the root down to triangle i.
        auto down = [&](int i) {
            std::vector<std::pair<int, int>> cr;
            while (i != root) {
                int p = par[i];
                cr.push_back({p, neighbour(i, par_side[i]).second});
                i = p;
            }
            std::reverse(cr.begin(), cr.end());
            return cr;
        };
        auto reverse_crossings = [&](const std::vector<std::pair<int, int>>& cr) {
            std::vector<std::pair<int, int>> r;
            for (auto it = cr.rbegin(); it != cr.rend(); ++it) r.push_back(neighbour(it->first, it->second));
            return r;
        };
        std::vector<std::vector<std::pair<int, int>>> fundamental(m);
        for (std::size_t k = 0; k < m; ++k) {
            auto [i, f] = dual_tail[nontree[k]];
            auto cr = down(i);
            cr.push_back({i, f});
            auto back = reverse_crossings(down(neighbour(i, f).first));
            cr.insert(cr.end(), back.begin(), back.end());
            fundamental[k] = cr;
        }

        // Boundary relations: loops around each link vertex, in non-tree coordinates.
        std::vector<std::vector<Int>> rel;
        for (int e = 0; e < T.num_edges(); ++e)
            for (int end = 0; end < 2; ++end) {
                auto loop = detail::vertex_loop(T, e, end == 1);
                if (T.cusp(loop.front().tet, loop.front().vertex) != c) continue;
                std::vector<Int> row(m);
                for (const auto& s : loop) {
                    int i = index.at({s.tet, s.vertex});
                    int d = dual.at({i, s.exit});
                    if (col[d] >= 0) row[col[d]] += crossing_sign(i, s.exit);
                }
                rel.push_back(row);
            }
        IntMatrix R = IntMatrix::from_rows(rel, m);
        auto snf = smith_normal_form(R);
        if (m < 2 || snf.rank != m - 2) throw InternalError("cusp homology is not free of rank 2");
        for (std::size_t i = 0; i < snf.rank; ++i)
            if (snf.S(i, i) != 1) throw InternalError("cusp homology has torsion");

        std::array<PeripheralCurve, 2> pair;
        for (int g = 0; g < 2; ++g) {
            std::vector<std::pair<int, int>> cr;
            for (std::size_t k = 0; k < m; ++k) {
                const Int& coef = snf.V(snf.rank + g, k);
                auto piece = coef > 0 ? fundamental[k] : reverse_crossings(fundamental[k]);
                for (Int n = 0; n < (coef < 0 ? Int(-coef) : coef); ++n) cr.insert(cr.end(), piece.begin(), piece.end());
            }
            cr = reduce_crossings(cr, [&](const std::pair<int, int>& x) { return neighbour(x.first, x.second); });
            std::vector<CuspStep> walk;
            const std::size_t n = cr.size();
            for (std::size_t s = 0; s < n; ++s) {
                auto prev = neighbour(cr[(s + n - 1) % n].first, cr[(s + n - 1) % n].second);
                if (prev.first != cr[s].first) throw InternalError("cusp walk is not closed");
                auto [t, v] = tri[cr[s].first];
                walk.push_back({t, v, prev.second, cr[s].second});
            }
            pair[g].cusp = c;
            pair[g].walk = walk;
            pair[g].coefficients = cusp_walk_coefficients(T, walk);
        }
        Int w = nz_pairing(N, pair[0].coefficients, pair[1].coefficients);
        if (w == 2) {
            for (auto& x : pair[1].coefficients) x = -x;
            std::reverse(pair[1].walk.begin(), pair[1].walk.end());
            for (auto& s : pair[1].walk) std::swap(s.entry, s.exit);
        } else if (w != -2) {
            throw InternalError("peripheral pair does not pair to +-2");
        }
        pair[0].role = PeripheralCurve::Role::Meridian;
        pair[1].role = PeripheralCurve::Role::Longitude;
        out.push_back(pair[0]);
        out.push_back(pair[1]);
    }
    return out;
}

inline IntMatrix edge_gluing_matrix(const IdealTriangulation& T) {
    IntMatrix G(T.num_edges(), T.num_quads());
    for (int t = 0; t < T.num_tetrahedra(); ++t)
        for (int e = 0; e < 6; ++e) {
            auto [a, b] = kEdgeVertices[e];
            G(T.edge_class(t, a, b), T.quad(t, kEdgeSlot[e])) += 1;
        }
    return G;
}

inline GluingData gluing_matrices(const IdealTriangulation& T, const std::optional<IntMatrix>& peripheral = std::nullopt) {
    GluingData d;
    d.N = T.num_tetrahedra();
    d.k = T.num_cusps();
    d.G = edge_gluing_matrix(T);
    const std::optional<IntMatrix>& given = peripheral ? peripheral : T.explicit_peripheral();
    if (given) {
        if (given->rows() != static_cast<std::size_t>(2 * d.k) || given->cols() != static_cast<std::size_t>(3 * d.N))
            throw TriangulationError("peripheral matrix of wrong shape");
        d.Gd = *given;
        for (int i = 0; i < 2 * d.k; ++i) {
            PeripheralCurve pc;
            pc.cusp = i / 2;
            pc.role = i % 2 ? PeripheralCurve::Role::Longitude : PeripheralCurve::Role::Meridian;
            pc.coefficients = given->row(i);
            d.peripheral.push_back(pc);
        }
    } else {
        d.peripheral = peripheral_basis(T);
        d.Gd = IntMatrix(2 * d.k, 3 * d.N);
        for (int i = 0; i < 2 * d.k; ++i)
            for (int q = 0; q < 3 * d.N; ++q) d.Gd(i, q) = d.peripheral[i].coefficients[q];
    }
    return d;
}

}  // namespace circang
