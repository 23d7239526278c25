#pragma once

// The doubly truncated complex T00 of an ideal triangulation, its boundary
// subcomplex, Z_2 cohomology, the rectangle map and the fanning construction.
//
// Local coordinates in a tetrahedron: a corner (v,w,x) is the vertex of the
// doubly truncated tetrahedron near ideal vertex v, next to the edge vw, on
// the face F_x opposite vertex x.
//  * long edge   (v,w,x) - (w,v,x)   along vw inside F_x
//  * medium edge (v,w,x) - (v,y,x)   at corner v of F_x
//  * short edge  (v,w,x) - (v,w,y)   around the end v of vw
// Long and medium edges are identified across face pairings; short edges,
// rectangles, boundary hexagons and bodies belong to a single tetrahedron.

#include <circang/angle_spaces.hpp>

#include <array>
#include <deque>
#include <string>
#include <vector>

namespace circang {

enum class CellKind { Vertex, LongEdge, MediumEdge, ShortEdge, LargeHexagon, BoundaryHexagon, Rectangle, EdgeDisc, Body, Cylinder };

inline const char* to_string(CellKind k) {
    switch (k) {
        case CellKind::Vertex: return "vertex";
        case CellKind::LongEdge: return "long_edge";
        case CellKind::MediumEdge: return "medium_edge";
        case CellKind::ShortEdge: return "short_edge";
        case CellKind::LargeHexagon: return "large_hexagon";
        case CellKind::BoundaryHexagon: return "boundary_hexagon";
        case CellKind::Rectangle: return "rectangle";
        case CellKind::EdgeDisc: return "edge_disc";
        case CellKind::Body: return "body";
        case CellKind::Cylinder: return "cylinder";
    }
    return "?";
}

struct Corner {
    int v, w, x;
    bool operator==(const Corner&) const = default;
};

struct OrientedEdge {
    int cell;
    int sign;  // +1 if traversed along the cell orientation
};

struct Cell {
    CellKind kind;
    int dim = 0;
    bool boundary = false;
    // Provenance: representative tetrahedron and local indices, or edge class.
    //   vertex (v,w,x); long (v,w,x) with v<w; medium (x,v); short (v,w);
    //   large hexagon (x); boundary hexagon (v); rectangle (v,w) with v<w.
    int tet = -1;
    std::array<int, 3> local{-1, -1, -1};
    int edge_class = -1;
    int end = -1;  // discs: 0 at the walk's v end, 1 at the w end
    int tail = -1, head = -1;           // 1-cells
    std::vector<OrientedEdge> loop;     // 2-cells, cyclic boundary word
    std::vector<int> faces;             // 3-cells
};

enum class CochainSpace { Absolute, Relative, Boundary };

class CWComplex {
public:
    explicit CWComplex(const IdealTriangulation& T) : N_(T.num_tetrahedra()) { build(T); }

    int num_tetrahedra() const { return N_; }
    const std::vector<Cell>& cells(int dim) const { return cells_[dim]; }
    const Cell& cell(int dim, int i) const { return cells_[dim][i]; }
    std::size_t count(int dim) const { return cells_[dim].size(); }
    int euler_characteristic() const {
        return static_cast<int>(count(0)) - static_cast<int>(count(1)) + static_cast<int>(count(2)) -
               static_cast<int>(count(3));
    }

    // Z_2 boundary matrix: rows (d-1)-cells, columns d-cells.
    const Z2Matrix& boundary_matrix(int d) const { return bd_[d]; }

    int vertex(int t, const Corner& c) const { return vertex_[t * 24 + corner_index(c)]; }
    OrientedEdge oriented_edge(int t, const Corner& a, const Corner& b) const;
    int large_hexagon(int t, int x) const { return hex_[t * 4 + x]; }
    int boundary_hexagon(int t, int v) const { return bhex_[t * 4 + v]; }
    int rectangle(int t, int v, int w) const { return rect_[t * 6 + local_edge(v, w)]; }
    int disc(int e, int end) const { return disc_[2 * e + end]; }
    int body(int t) const { return t; }
    int cylinder(int e) const { return N_ + e; }

    // Cells allowed for cochains of the given space.
    Z2Vector support(int dim, CochainSpace s) const {
        Z2Vector m(count(dim));
        for (std::size_t i = 0; i < count(dim); ++i) {
            bool b = cells_[dim][i].boundary;
            if (s == CochainSpace::Absolute || (s == CochainSpace::Relative && !b) || (s == CochainSpace::Boundary && b))
                m.set(i);
        }
        return m;
    }

    // delta(c) on all (dim+1)-cells, then masked to the space.
    Z2Vector coboundary(int dim, const Z2Vector& c, CochainSpace s = CochainSpace::Absolute) const {
        if (c.size() != count(dim)) throw std::invalid_argument("cochain length mismatch");
        if (dim >= 3) return Z2Vector(0);
        Z2Vector r = bd_[dim + 1].transpose() * c;
        Z2Vector m = support(dim + 1, s);
        Z2Vector out(r.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r.get(i) && m.get(i)) out.set(i);
        return out;
    }

    nlohmann::json to_json() const;

    static int corner_index(const Corner& c) { return corner_table()[16 * c.v + 4 * c.w + c.x]; }
    static const std::array<Corner, 24>& corners() {
        static const std::array<Corner, 24> cs = [] {
            std::array<Corner, 24> a{};
            int i = 0;
            for (int v = 0; v < 4; ++v)
                for (int w = 0; w < 4; ++w)
                    for (int x = 0; x < 4; ++x)
                        if (v != w && v != x && w != x) a[i++] = {v, w, x};
            return a;
        }();
        return cs;
    }

private:
    static const std::array<int, 64>& corner_table() {
        static const std::array<int, 64> t = [] {
            std::array<int, 64> a{};
            a.fill(-1);
            for (int i = 0; i < 24; ++i) {
                const auto& c = corners()[i];
                a[16 * c.v + 4 * c.w + c.x] = i;
            }
            return a;
        }();
        return t;
    }

    // Local copies of long and medium edges, 12 each per tetrahedron.
    static int long_copy(int v, int w, int x) { return 2 * local_edge(v, w) + (x == complement2(v, w)[1] ? 1 : 0); }
    static int medium_copy(int x, int v) { return 3 * x + (v < x ? v : v - 1); }
    static std::pair<Corner, Corner> long_ends(int v, int w, int x) {
        int a = std::min(v, w), b = std::max(v, w);
        return {{a, b, x}, {b, a, x}};
    }
    static std::pair<Corner, Corner> medium_ends(int x, int v) {
        auto [a, b] = complement2(v, x);
        return {{v, a, x}, {v, b, x}};
    }
    static std::pair<Corner, Corner> short_ends(int v, int w) {
        auto [a, b] = complement2(v, w);
        return {{v, w, a}, {v, w, b}};
    }

    void build(const IdealTriangulation& T);
    int add_cell(int dim, Cell c) {
        c.dim = dim;
        cells_[dim].push_back(std::move(c));
        return static_cast<int>(cells_[dim].size()) - 1;
    }
    std::vector<OrientedEdge> loop_through(int t, const std::vector<Corner>& cs) const {
        std::vector<OrientedEdge> l;
        for (std::size_t i = 0; i < cs.size(); ++i) l.push_back(oriented_edge(t, cs[i], cs[(i + 1) % cs.size()]));
        return l;
    }

    int N_;
    std::array<std::vector<Cell>, 4> cells_;
    std::array<Z2Matrix, 4> bd_;
    std::vector<int> vertex_;                 // t*24 + corner -> vertex cell
    std::vector<OrientedEdge> long_, medium_;  // t*12 + copy -> edge cell with orientation of the copy
    std::vector<int> short_;                  // t*12 + (v,w) ordered index
    std::vector<int> hex_, bhex_, rect_, disc_;
};

namespace detail {

// Union-find carrying a Z_2 label relative to the root.
struct ParityUnionFind {
    std::vector<int> p, par;
    explicit ParityUnionFind(int n) : p(n), par(n, 0) { std::iota(p.begin(), p.end(), 0); }
    std::pair<int, int> find(int x) {
        if (p[x] == x) return {x, 0};
        auto [r, q] = find(p[x]);
        p[x] = r;
        par[x] ^= q;
        return {r, par[x]};
    }
    // Record label(a) = label(b) ^ d; returns false on a contradiction.
    bool unite(int a, int b, int d) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) return (pa ^ pb) == d;
        if (ra < rb) std::swap(ra, rb), std::swap(pa, pb);
        p[ra] = rb;
        par[ra] = pa ^ pb ^ d;
        return true;
    }
};

inline int ordered_pair_index(int v, int w) { return 3 * v + (w < v ? w : w - 1); }

}  // namespace detail

inline OrientedEdge CWComplex::oriented_edge(int t, const Corner& a, const Corner& b) const {
    auto along = [](const OrientedEdge& e, const Corner& tail, const Corner& a) {
        return OrientedEdge{e.cell, tail == a ? e.sign : -e.sign};
    };
    if (a.v == b.v && a.w == b.w && a.x != b.x) {
        int id = short_[t * 12 + detail::ordered_pair_index(a.v, a.w)];
        return along({id, 1}, short_ends(a.v, a.w).first, a);
    }
    if (a.x == b.x && a.v == b.v && a.w != b.w) {
        const auto& e = medium_[t * 12 + medium_copy(a.x, a.v)];
        return along(e, medium_ends(a.x, a.v).first, a);
    }
    if (a.x == b.x && a.v == b.w && a.w == b.v) {
        const auto& e = long_[t * 12 + long_copy(a.v, a.w, a.x)];
        return along(e, long_ends(a.v, a.w, a.x).first, a);
    }
    throw std::invalid_argument("corners are not joined by an edge");
}

inline void CWComplex::build(const IdealTriangulation& T) {
    const int N = N_;
    detail::UnionFind uv(24 * N);
    detail::ParityUnionFind ul(12 * N), um(12 * N);
    for (int t = 0; t < N; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = T.gluing(t, f);
            const Perm& p = g.perm;
            for (const auto& c : corners()) {
                if (c.x != f) continue;
                uv.unite(t * 24 + corner_index(c), g.tet * 24 + corner_index({p[c.v], p[c.w], g.face}));
            }
            for (int e = 0; e < 6; ++e) {
                auto [a, b] = kEdgeVertices[e];
                if (a == f || b == f) continue;
                if (!ul.unite(t * 12 + long_copy(a, b, f), g.tet * 12 + long_copy(p[a], p[b], g.face), p[a] > p[b]))
                    throw InternalError("long edge identified with itself reversed");
            }
            for (int v = 0; v < 4; ++v) {
                if (v == f) continue;
                auto [a, b] = complement2(v, f);
                if (!um.unite(t * 12 + medium_copy(f, v), g.tet * 12 + medium_copy(g.face, p[v]), p[a] > p[b]))
                    throw InternalError("medium edge identified with itself reversed");
            }
        }

    int nv = 0;
    vertex_ = detail::canonical_classes(uv, 24 * N, nv);
    for (int i = 0; i < 24 * N; ++i)
        if (vertex_[i] == static_cast<int>(cells_[0].size())) {
            Cell c{CellKind::Vertex};
            c.boundary = true;
            c.tet = i / 24;
            const auto& k = corners()[i % 24];
            c.local = {k.v, k.w, k.x};
            add_cell(0, c);
        }

    // Edge cells: long, then medium, then short; each class numbered by its lowest copy.
    auto number = [&](detail::ParityUnionFind& uf, CellKind kind, std::vector<OrientedEdge>& out, auto ends, auto local) {
        out.assign(12 * N, {-1, 1});
        std::vector<int> root_cell(12 * N, -1), root_par(12 * N, 0);
        for (int i = 0; i < 12 * N; ++i) {
            auto [r, q] = uf.find(i);
            if (root_cell[r] < 0) {
                Cell c{kind};
                c.boundary = kind == CellKind::MediumEdge;
                c.tet = i / 12;
                c.local = local(i % 12);
                auto [tl, hd] = ends(i % 12);
                c.tail = vertex(c.tet, tl);
                c.head = vertex(c.tet, hd);
                root_cell[r] = add_cell(1, c);
                root_par[r] = q;
            }
            out[i] = {root_cell[r], (q ^ root_par[r]) ? -1 : 1};
        }
    };
    std::array<std::array<int, 3>, 12> long_local{}, medium_local{};
    for (int e = 0; e < 6; ++e)
        for (int s = 0; s < 2; ++s) {
            auto [a, b] = kEdgeVertices[e];
            long_local[2 * e + s] = {a, b, complement2(a, b)[s]};
        }
    for (int x = 0; x < 4; ++x)
        for (int v = 0; v < 4; ++v)
            if (v != x) medium_local[medium_copy(x, v)] = {x, v, -1};
    number(ul, CellKind::LongEdge, long_,
           [&](int k) { auto l = long_local[k]; return long_ends(l[0], l[1], l[2]); },
           [&](int k) { return long_local[k]; });
    number(um, CellKind::MediumEdge, medium_,
           [&](int k) { auto l = medium_local[k]; return medium_ends(l[0], l[1]); },
           [&](int k) { return medium_local[k]; });
    short_.assign(12 * N, -1);
    for (int t = 0; t < N; ++t)
        for (int v = 0; v < 4; ++v)
            for (int w = 0; w < 4; ++w) {
                if (v == w) continue;
                Cell c{CellKind::ShortEdge};
                c.boundary = true;
                c.tet = t;
                c.local = {v, w, -1};
                auto [tl, hd] = short_ends(v, w);
                c.tail = vertex(t, tl);
                c.head = vertex(t, hd);
                short_[t * 12 + detail::ordered_pair_index(v, w)] = add_cell(1, c);
            }

    // 2-cells.
    hex_.assign(4 * N, -1);
    {
        detail::UnionFind uh(4 * N);
        for (int t = 0; t < N; ++t)
            for (int f = 0; f < 4; ++f) uh.unite(4 * t + f, 4 * T.gluing(t, f).tet + T.gluing(t, f).face);
        int nh = 0;
        auto cls = detail::canonical_classes(uh, 4 * N, nh);
        for (int i = 0; i < 4 * N; ++i) {
            if (cls[i] == static_cast<int>(cells_[2].size())) {
                int t = i / 4, x = i % 4;
                std::array<int, 3> o{};
                for (int k = 0, j = 0; k < 4; ++k)
                    if (k != x) o[j++] = k;
                auto [a, b, c] = o;
                Cell h{CellKind::LargeHexagon};
                h.tet = t;
                h.local = {x, -1, -1};
                h.loop = loop_through(t, {{a, b, x}, {b, a, x}, {b, c, x}, {c, b, x}, {c, a, x}, {a, c, x}});
                add_cell(2, h);
            }
            hex_[i] = cls[i];
        }
    }
    bhex_.assign(4 * N, -1);
    for (int t = 0; t < N; ++t)
        for (int v = 0; v < 4; ++v) {
            std::array<int, 3> o{};
            for (int k = 0, j = 0; k < 4; ++k)
                if (k != v) o[j++] = k;
            auto [a, b, c] = o;
            Cell h{CellKind::BoundaryHexagon};
            h.boundary = true;
            h.tet = t;
            h.local = {v, -1, -1};
            h.loop = loop_through(t, {{v, a, b}, {v, a, c}, {v, b, c}, {v, b, a}, {v, c, a}, {v, c, b}});
            bhex_[4 * t + v] = add_cell(2, h);
        }
    rect_.assign(6 * N, -1);
    for (int t = 0; t < N; ++t)
        for (int e = 0; e < 6; ++e) {
            auto [v, w] = kEdgeVertices[e];
            auto [x, y] = complement2(v, w);
            Cell r{CellKind::Rectangle};
            r.tet = t;
            r.local = {v, w, -1};
            r.edge_class = T.edge_class(t, v, w);
            r.loop = loop_through(t, {{v, w, x}, {w, v, x}, {w, v, y}, {v, w, y}});
            rect_[6 * t + e] = add_cell(2, r);
        }
    disc_.assign(2 * T.num_edges(), -1);
    for (int e = 0; e < T.num_edges(); ++e)
        for (int end = 0; end < 2; ++end) {
            Cell d{CellKind::EdgeDisc};
            d.boundary = true;
            d.edge_class = e;
            d.end = end;
            const auto& s0 = T.edge_walk(e).front();
            d.tet = s0.tet;
            d.local = {end ? s0.w : s0.v, end ? s0.v : s0.w, -1};
            for (const auto& s : T.edge_walk(e)) {
                int a = end ? s.w : s.v, b = end ? s.v : s.w;
                d.loop.push_back(oriented_edge(s.tet, {a, b, s.entry}, {a, b, s.exit}));
            }
            disc_[2 * e + end] = add_cell(2, d);
        }

    // 3-cells.
    for (int t = 0; t < N; ++t) {
        Cell b{CellKind::Body};
        b.tet = t;
        for (int f = 0; f < 4; ++f) b.faces.push_back(large_hexagon(t, f));
        for (int v = 0; v < 4; ++v) b.faces.push_back(boundary_hexagon(t, v));
        for (int e = 0; e < 6; ++e) b.faces.push_back(rect_[6 * t + e]);
        add_cell(3, b);
    }
    for (int e = 0; e < T.num_edges(); ++e) {
        Cell c{CellKind::Cylinder};
        c.edge_class = e;
        for (const auto& s : T.edge_walk(e)) c.faces.push_back(rectangle(s.tet, s.v, s.w));
        c.faces.push_back(disc(e, 0));
        c.faces.push_back(disc(e, 1));
        add_cell(3, c);
    }

    // Z_2 boundary matrices, incidences counted mod 2.
    bd_[0] = Z2Matrix(0, count(0));
    bd_[1] = Z2Matrix(count(0), count(1));
    for (std::size_t i = 0; i < count(1); ++i) {
        bd_[1].flip(cells_[1][i].tail, i);
        bd_[1].flip(cells_[1][i].head, i);
    }
    bd_[2] = Z2Matrix(count(1), count(2));
    for (std::size_t i = 0; i < count(2); ++i)
        for (const auto& oe : cells_[2][i].loop) bd_[2].flip(oe.cell, i);
    bd_[3] = Z2Matrix(count(2), count(3));
    for (std::size_t i = 0; i < count(3); ++i)
        for (int f : cells_[3][i].faces) bd_[3].flip(f, i);

    // Each 2-cell word must be a closed edge path.
    for (const auto& c : cells_[2]) {
        const std::size_t n = c.loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = cells_[1][c.loop[i].cell];
            const auto& b = cells_[1][c.loop[(i + 1) % n].cell];
            int a_end = c.loop[i].sign > 0 ? a.head : a.tail;
            int b_start = c.loop[(i + 1) % n].sign > 0 ? b.tail : b.head;
            if (a_end != b_start) throw InternalError("2-cell boundary word is not closed");
        }
    }
    if (count(0) != static_cast<std::size_t>(12 * N) || count(1) != static_cast<std::size_t>(24 * N) ||
        count(2) != static_cast<std::size_t>(14 * N) || count(3) != static_cast<std::size_t>(2 * N))
        throw InternalError("unexpected cell census");
}

inline nlohmann::json CWComplex::to_json() const {
    nlohmann::json j;
    j["tetrahedra"] = N_;
    j["euler_characteristic"] = euler_characteristic();
    for (int d = 0; d < 4; ++d) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : cells_[d]) {
            nlohmann::json o{{"kind", to_string(c.kind)}, {"boundary", c.boundary}};
            if (c.tet >= 0) o["tet"] = c.tet;
            std::vector<int> loc;
            for (int x : c.local)
                if (x >= 0) loc.push_back(x);
            if (!loc.empty()) o["local"] = loc;
            if (c.edge_class >= 0) o["edge_class"] = c.edge_class;
            if (c.end >= 0) o["end"] = c.end;
            if (d == 1) o["ends"] = {c.tail, c.head};
            if (d == 2) {
                nlohmann::json l = nlohmann::json::array();
                for (const auto& e : c.loop) l.push_back(e.sign * (e.cell + 1));
                o["boundary_word"] = l;
            }
            if (d == 3) o["faces"] = c.faces;
            arr.push_back(o);
        }
        j["cells"].push_back(arr);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Cohomology

class Cohomology {
public:
    Cohomology(const CWComplex& C, int degree, CochainSpace space) : C_(&C), deg_(degree), space_(space) {
        if (degree < 0 || degree > 3) throw std::invalid_argument("degree must be 0..3");
        const std::size_t n = C.count(degree);
        mask_ = C.support(degree, space);
        // Cocycles: delta c = 0 on allowed (degree+1)-cells, c = 0 off the space.
        Z2Matrix D(0, n);
        if (degree < 3) {
            Z2Matrix dt = C.boundary_matrix(degree + 1).transpose();
            Z2Vector m1 = C.support(degree + 1, space);
            for (std::size_t i = 0; i < dt.rows(); ++i)
                if (m1.get(i)) D.push_row(dt.row(i));
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!mask_.get(i)) {
                Z2Vector e(n);
                e.set(i);
                D.push_row(e);
            }
        auto ker = z2_solve(D, Z2Vector(D.rows()));
        cocycles_ = ker->kernel;
        basis_ = Z2Basis(n, cocycles_.size());
        if (degree > 0) {
            Z2Vector prev = C.support(degree - 1, space);
            for (std::size_t i = 0; i < C.count(degree - 1); ++i) {
                if (!prev.get(i)) continue;
                Z2Vector e(C.count(degree - 1));
                e.set(i);
                basis_.insert(C.coboundary(degree - 1, e, space), Z2Vector(cocycles_.size()));
            }
        }
        for (std::size_t j = 0; j < cocycles_.size(); ++j) {
            Z2Vector tag(cocycles_.size());
            tag.set(j);
            if (basis_.insert(cocycles_[j], tag)) {
                class_of_.push_back(j);
                reps_.push_back(cocycles_[j]);
            }
        }
    }

    int degree() const { return deg_; }
    CochainSpace space() const { return space_; }
    std::size_t dim() const { return reps_.size(); }
    // Representing cocycles of the basis classes.
    const std::vector<Z2Vector>& basis() const { return reps_; }

    bool is_cocycle(const Z2Vector& c) const {
        if (c.size() != mask_.size()) return false;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c.get(i) && !mask_.get(i)) return false;
        return C_->coboundary(deg_, c, space_).is_zero();
    }

    // Coordinates of the class of c against basis().
    Z2Vector reduce(const Z2Vector& c) const {
        if (!is_cocycle(c)) throw std::invalid_argument("reduce: input is not a cocycle of this space");
        auto [res, tag] = basis_.reduce(c);
        if (!res.is_zero()) throw InternalError("cocycle not spanned by the cohomology basis");
        Z2Vector coords(dim());
        for (std::size_t k = 0; k < class_of_.size(); ++k)
            if (tag.get(class_of_[k])) coords.set(k);
        return coords;
    }

    bool is_coboundary(const Z2Vector& c) const { return reduce(c).is_zero(); }

private:
    const CWComplex* C_;
    int deg_;
    CochainSpace space_;
    Z2Vector mask_;
    std::vector<Z2Vector> cocycles_;
    Z2Basis basis_;
    std::vector<std::size_t> class_of_;
    std::vector<Z2Vector> reps_;
};

// Inclusion of relative cochains as absolute ones (the identity on vectors).
inline Z2Vector include_relative(const CWComplex& C, const Z2Vector& c) {
    Z2Vector m = C.support(2, CochainSpace::Relative);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.get(i) && !m.get(i)) throw std::invalid_argument("cochain is not relative");
    return c;
}

inline Z2Vector restrict_to_boundary(const CWComplex& C, int dim, const Z2Vector& c) {
    Z2Vector m = C.support(dim, CochainSpace::Boundary);
    Z2Vector r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.get(i) && m.get(i)) r.set(i);
    return r;
}

// ---------------------------------------------------------------------------
// Rectangle map, fanning and its inverse

inline Z2Vector rect(const IdealTriangulation& T, const CWComplex& C, const Z2Vector& alpha) {
    if (alpha.size() != static_cast<std::size_t>(T.num_quads())) throw std::invalid_argument("rect: one bit per quad");
    Z2Vector g = Z2Matrix::from_int(edge_gluing_matrix(T)) * alpha;
    if (!g.is_zero()) throw MathError("rect: vector is not in the kernel of G mod 2");
    Z2Vector s(C.count(2));
    for (int t = 0; t < T.num_tetrahedra(); ++t)
        for (int e = 0; e < 6; ++e) {
            auto [v, w] = kEdgeVertices[e];
            if (alpha.get(T.quad(t, kEdgeSlot[e]))) s.set(C.rectangle(t, v, w));
        }
    return s;
}

// Y(sigma) = sigma + sum over large hexagons F with sigma(F) = 1 of delta(b_F).
inline Z2Vector fanning(const CWComplex& C, const Z2Vector& sigma) {
    if (sigma.size() != C.count(2)) throw std::invalid_argument("fanning: degree-2 cochain expected");
    Z2Vector b(C.count(1));
    for (std::size_t i = 0; i < C.count(2); ++i) {
        const Cell& f = C.cell(2, static_cast<int>(i));
        if (f.kind != CellKind::LargeHexagon || !sigma.get(i)) continue;
        for (const auto& e : f.loop)
            if (C.cell(1, e.cell).kind == CellKind::LongEdge) b.flip(e.cell);
    }
    return sigma ^ C.coboundary(1, b);
}

// Hexagon-supported sigma with Y(sigma) = rect(s), seeded with `seed` on the
// lowest large hexagon. Requires tetrahedron sums 0 and even parity.
inline Z2Vector defanning(const IdealTriangulation& T, const CWComplex& C, const Z2Vector& s, bool seed = false) {
    const int N = T.num_tetrahedra();
    if (s.size() != static_cast<std::size_t>(T.num_quads())) throw std::invalid_argument("defanning: one bit per quad");
    for (int t = 0; t < N; ++t)
        if (s.get(T.quad(t, 0)) ^ s.get(T.quad(t, 1)) ^ s.get(T.quad(t, 2)))
            throw MathError("defanning: tetrahedron sum is not zero");
    std::vector<int> val(C.count(2), -1);
    // Hexagon adjacency through tetrahedra: faces x, y of t meet along the edge with slot(x, y).
    std::vector<std::vector<std::pair<int, int>>> adj(C.count(2));
    for (int t = 0; t < N; ++t)
        for (int x = 0; x < 4; ++x)
            for (int y = x + 1; y < 4; ++y) {
                int a = C.large_hexagon(t, x), b = C.large_hexagon(t, y);
                int bit = s.get(T.quad(t, edge_slot(x, y)));
                adj[a].push_back({b, bit});
                adj[b].push_back({a, bit});
            }
    int start = C.large_hexagon(0, 0);
    for (int t = 0; t < N; ++t)
        for (int x = 0; x < 4; ++x) start = std::min(start, C.large_hexagon(t, x));
    val[start] = seed;
    std::deque<int> q{start};
    while (!q.empty()) {
        int a = q.front();
        q.pop_front();
        for (auto [b, bit] : adj[a]) {
            int want = val[a] ^ bit;
            if (val[b] < 0) {
                val[b] = want;
                q.push_back(b);
            } else if (val[b] != want) {
                throw MathError("defanning: propagation inconsistency (odd parity)");
            }
        }
    }
    Z2Vector sigma(C.count(2));
    for (std::size_t i = 0; i < val.size(); ++i)
        if (val[i] == 1) sigma.set(i);
    return sigma;
}

// Crossing counts of a reduced dual-graph path with the large hexagons.
inline Z2Vector curve_dual_cocycle(const IdealTriangulation&, const CWComplex& C, const CurvePath& theta) {
    if (!theta.reduced()) throw std::invalid_argument("unreduced path: a step enters and exits through the same face");
    Z2Vector c(C.count(2));
    for (const auto& st : theta.steps) c.flip(C.large_hexagon(st.tet, st.exit));
    return c;
}

// [l_theta]_2 from the mod 2 curve coefficients.
inline Z2Vector curve_ltd_mod2(const IdealTriangulation& T, const CurvePath& theta) {
    auto g = curve_coefficients_mod2(T, theta);
    const int N = T.num_tetrahedra();
    Z2Vector l(T.num_quads());
    for (int t = 0; t < N; ++t)
        for (int s = 0; s < 3; ++s)
            if (g.get(T.quad(t, (s + 2) % 3)) ^ g.get(T.quad(t, (s + 1) % 3))) l.set(T.quad(t, s));
    return l;
}

}  // namespace circang
