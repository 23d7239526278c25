#pragma once

// Shape parameters, log-parameters, combinatorial flattenings, face
// co-orientations and the SL(2,C) labelling of T00 built from a strong
// flattening, with its holonomy audit.

#include <circang/obstruction.hpp>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace circang {

using cplx = std::complex<double>;

struct ShapeTolerances {
    double eq = 1e-9;
    double round = 1e-6;
    double sing = 1e-9;
    double mat = 1e-9;
};

struct ShapeSolution {
    std::vector<cplx> z;  // per quad, quad-major
    double edge_residual = 0;
    double completeness_residual = 0;
    bool complete = false;
};

struct LogParameters {
    std::vector<cplx> Z;
    IntVector c;
    IntVector d;  // empty unless complete
    bool complete = false;
};

struct Flattening {
    std::vector<cplx> W;
    IntVector f;
    Z2Vector delta;
    bool strong = false;
    bool peripheral = false;  // G_d W = 0
};

struct FlatteningAudit {
    bool tetrahedra = false;  // W sums vanish
    bool edges = false;       // G W = 0
    bool cusps = false;       // G_d W = 0
    bool strong = false;      // even parity of f mod 2
    double residual = 0;
    bool ok() const { return tetrahedra && edges && cusps && strong; }
};

// Shapes file: {"triangulation": name, "z": [[re, im], ...]} with one slot-0
// shape per tetrahedron, or one per quad.
inline std::vector<cplx> parse_shapes_json(const nlohmann::json& j) {
    std::vector<cplx> z;
    try {
        for (const auto& p : j.at("z")) {
            if (!p.is_array() || p.size() != 2) throw TriangulationError("malformed shapes: each entry must be [re, im]");
            z.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw TriangulationError(std::string("malformed shapes: ") + e.what());
    }
    return z;
}

inline std::vector<cplx> load_shapes(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw TriangulationError(std::string("malformed shapes file: ") + e.what());
    }
    return parse_shapes_json(j);
}

namespace detail {

inline cplx monomial(const std::vector<cplx>& z, const IntVector& row) {
    cplx p = 1;
    for (std::size_t q = 0; q < row.size(); ++q) {
        long long e = static_cast<long long>(row[q]);
        if (e) p *= std::pow(z[q], static_cast<int>(e));
    }
    return p;
}

inline double max_residual(const std::vector<cplx>& z, const IntMatrix& M) {
    double r = 0;
    for (std::size_t i = 0; i < M.rows(); ++i) r = std::max(r, std::abs(monomial(z, M.row(i)) - 1.0));
    return r;
}

inline cplx linear(const std::vector<cplx>& z, const IntVector& row) {
    cplx s = 0;
    for (std::size_t q = 0; q < row.size(); ++q)
        if (row[q] != 0) s += static_cast<double>(static_cast<long long>(row[q])) * z[q];
    return s;
}

}  // namespace detail

inline ShapeSolution check_shapes(const AngleSystem& A, const std::vector<cplx>& input, const ShapeTolerances& tol = {}) {
    const auto& T = A.triangulation();
    const int N = T.num_tetrahedra();
    ShapeSolution s;
    s.z.assign(T.num_quads(), 0);
    if (input.size() != static_cast<std::size_t>(N) && input.size() != static_cast<std::size_t>(T.num_quads()))
        throw TriangulationError("expected " + std::to_string(N) + " shapes, got " + std::to_string(input.size()));
    for (int t = 0; t < N; ++t) {
        cplx z = input[t];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw TriangulationError("shape is not finite");
        if (std::abs(z) < tol.sing || std::abs(z - 1.0) < tol.sing)
            throw MathError("degenerate shape in tetrahedron " + std::to_string(t));
        s.z[T.quad(t, 0)] = z;
        s.z[T.quad(t, 1)] = 1.0 / (1.0 - z);
        s.z[T.quad(t, 2)] = (z - 1.0) / z;
    }
    if (input.size() == static_cast<std::size_t>(T.num_quads()))
        for (int q = 0; q < T.num_quads(); ++q)
            if (std::abs(input[q] - s.z[q]) > tol.eq)
                throw MathError("shapes of quad " + std::to_string(q) + " violate z' = 1/(1-z)");
    s.edge_residual = detail::max_residual(s.z, A.gluing().G);
    if (s.edge_residual > tol.eq)
        throw MathError("edge equations fail: residual " + std::to_string(s.edge_residual));
    s.completeness_residual = detail::max_residual(s.z, A.gluing().Gd);
    s.complete = s.completeness_residual < tol.eq;
    return s;
}

// Principal logarithms, tetrahedron sums normalised to i pi at slot 0.
inline LogParameters log_branches(const AngleSystem& A, const ShapeSolution& s, const ShapeTolerances& tol = {}) {
    const auto& T = A.triangulation();
    const double pi = std::numbers::pi;
    LogParameters L;
    L.complete = s.complete;
    L.Z.resize(s.z.size());
    for (std::size_t q = 0; q < s.z.size(); ++q) {
        cplx z = s.z[q];
        double arg = std::abs(z.imag()) < 1e-14 ? (z.real() > 0 ? 0.0 : pi) : std::arg(z);
        L.Z[q] = {std::log(std::abs(z)), arg};
    }
    for (int t = 0; t < T.num_tetrahedra(); ++t) {
        double im = 0;
        for (int k = 0; k < 3; ++k) im += L.Z[T.quad(t, k)].imag();
        double n = std::round((im - pi) / (2 * pi));
        if (std::abs(im - pi - 2 * pi * n) > tol.round) throw InternalError("tetrahedron log sum is not an odd multiple of i pi");
        L.Z[T.quad(t, 0)] -= cplx(0, 2 * pi * n);
    }
    auto lifted = [&](const IntMatrix& M, IntVector& out) {
        for (std::size_t i = 0; i < M.rows(); ++i) {
            cplx x = detail::linear(L.Z, M.row(i)) / cplx(0, pi);
            double r = std::round(x.real());
            if (std::abs(x - r) > tol.round) return false;
            out.push_back(Int(static_cast<long long>(r)));
        }
        return true;
    };
    if (!lifted(A.gluing().G, L.c)) throw MathError("edge log sums are not multiples of i pi");
    if (!is_even(L.c)) throw MathError("edge log sums are odd multiples of i pi");
    if (L.complete) {
        IntVector d;
        if (!lifted(A.gluing().Gd, d) || !is_even(d)) throw MathError("peripheral log sums are not even multiples of i pi");
        L.d = std::move(d);
    }
    return L;
}

inline FlatteningAudit audit_flattening(const AngleSystem& A, const LogParameters& L, const IntVector& f,
                                        const ShapeTolerances& tol = {}) {
    const auto& T = A.triangulation();
    const auto& g = A.gluing();
    if (f.size() != L.Z.size()) throw std::invalid_argument("f needs one entry per quad");
    FlatteningAudit a;
    // Z sums to i pi per tetrahedron by construction, so W sums vanish iff f sums to 1.
    a.tetrahedra = true;
    for (int t = 0; t < T.num_tetrahedra(); ++t)
        if (f[T.quad(t, 0)] + f[T.quad(t, 1)] + f[T.quad(t, 2)] != 1) a.tetrahedra = false;
    a.edges = g.G * f == L.c;
    a.cusps = L.complete && g.Gd * f == L.d;
    a.strong = A.has_even_parity(Z2Vector::from_ints(f));
    std::vector<cplx> W(L.Z.size());
    for (std::size_t q = 0; q < W.size(); ++q) W[q] = L.Z[q] - cplx(0, std::numbers::pi * static_cast<double>(static_cast<long long>(f[q])));
    for (std::size_t i = 0; i < g.G.rows(); ++i) a.residual = std::max(a.residual, std::abs(detail::linear(W, g.G.row(i))));
    if (L.complete)
        for (std::size_t i = 0; i < g.Gd.rows(); ++i) a.residual = std::max(a.residual, std::abs(detail::linear(W, g.Gd.row(i))));
    if (a.residual > tol.round) a.edges = a.cusps = false;
    return a;
}

inline bool verify_strong(const AngleSystem& A, const LogParameters& L, const IntVector& f, const ShapeTolerances& tol = {}) {
    return audit_flattening(A, L, f, tol).ok();
}

// Strong flattening; for incomplete shapes the peripheral conditions are dropped.
inline Flattening find_flattening(const AngleSystem& A, const LogParameters& L, const ShapeTolerances& tol = {}) {
    ComponentSignature sig{L.c, L.complete ? L.d : IntVector{}};
    Flattening F;
    F.f = A.integer_pseudo_angle(sig);
    F.delta = Z2Vector::from_ints(F.f);
    F.W.resize(L.Z.size());
    for (std::size_t q = 0; q < F.W.size(); ++q)
        F.W[q] = L.Z[q] - cplx(0, std::numbers::pi * static_cast<double>(static_cast<long long>(F.f[q])));
    auto a = audit_flattening(A, L, F.f, tol);
    if (!a.tetrahedra || !a.edges || !a.strong) throw InternalError("flattening solver produced an invalid vector");
    F.strong = a.strong;
    F.peripheral = a.cusps;
    return F;
}

// ---------------------------------------------------------------------------
// Co-orientations and the labelling

// out[4t + x] = 1 if face x of tetrahedron t is co-oriented out of t.
inline std::vector<int> coorient(const IdealTriangulation& T, const Z2Vector& delta, bool seed_out = true) {
    const int N = T.num_tetrahedra();
    if (delta.size() != static_cast<std::size_t>(T.num_quads())) throw std::invalid_argument("coorient: one bit per quad");
    for (int t = 0; t < N; ++t)
        if (!(delta.get(T.quad(t, 0)) ^ delta.get(T.quad(t, 1)) ^ delta.get(T.quad(t, 2))))
            throw MathError("coorient: tetrahedron parity sum is not 1");
    std::vector<int> out(4 * N, -1);
    std::vector<int> stack{0};
    out[0] = seed_out;
    auto assign = [&](int node, int want) {
        if (out[node] < 0) {
            out[node] = want;
            stack.push_back(node);
        } else if (out[node] != want) {
            throw MathError("coorient: co-orientation monodromy is inconsistent (parity is not even)");
        }
    };
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        int t = n / 4, x = n % 4;
        const Gluing& g = T.gluing(t, x);
        assign(4 * g.tet + g.face, !out[n]);
        for (int y = 0; y < 4; ++y)
            if (y != x) assign(4 * t + y, out[n] ^ 1 ^ delta.get(T.quad(t, edge_slot(x, y))));
    }
    return out;
}

struct Mat2 {
    cplx a = 1, b = 0, c = 0, d = 1;
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse() const { return {d, -b, -c, a}; }  // determinant 1
    cplx det() const { return a * d - b * c; }
    // Max-entry distance to s * identity.
    double distance_to(double s) const {
        return std::max({std::abs(a - s), std::abs(b), std::abs(c), std::abs(d - s)});
    }
    static Mat2 S() { return {0, -1, 1, 0}; }
    static Mat2 T() { return {1, -1, 0, 1}; }
    static Mat2 H(cplx W) { return {std::exp(W / 2.0), 0, 0, std::exp(-W / 2.0)}; }
};

struct Labelling {
    std::vector<int> coorientation;  // per (t, face)
    std::vector<int> orientation;    // per 1-cell: +1 if the rule agrees with the stored direction
    std::vector<Mat2> label;         // per 1-cell, along its stored direction
};

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 tet_vertex(int v) {
    static const std::array<Vec3, 4> P{{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};
    return P[v];
}
inline Vec3 sub(Vec3 a, Vec3 b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(Vec3 a, Vec3 b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Corner (v,w,x) of the doubly truncated tetrahedron: on face F_x near v, beside vw.
inline Vec3 corner_point(const Corner& c) {
    int y = remaining_vertex(c.v, c.w, c.x);
    Vec3 p{};
    for (int i = 0; i < 3; ++i) p[i] = 0.7 * tet_vertex(c.v)[i] + 0.2 * tet_vertex(c.w)[i] + 0.1 * tet_vertex(y)[i];
    return p;
}

// +1 if a -> b runs anticlockwise about the co-orientation of face x.
inline int face_rule(const Corner& a, const Corner& b, int x, bool out) {
    Vec3 centre{};
    for (int k = 0; k < 4; ++k)
        if (k != x)
            for (int i = 0; i < 3; ++i) centre[i] += tet_vertex(k)[i] / 3;
    Vec3 normal = sub(centre, tet_vertex(x));  // points out of the tetrahedron
    double s = dot(cross(sub(corner_point(a), centre), sub(corner_point(b), centre)), normal);
    return (s > 0) == out ? 1 : -1;
}

// +1 if a -> b runs anticlockwise about the edge vw seen from the ideal vertex v.
inline int short_rule(const Corner& a, const Corner& b) {
    Vec3 axis = sub(tet_vertex(a.v), tet_vertex(a.w));
    Vec3 q{};
    for (int i = 0; i < 3; ++i) q[i] = 0.7 * tet_vertex(a.v)[i] + 0.3 * tet_vertex(a.w)[i];
    double s = dot(cross(sub(corner_point(a), q), sub(corner_point(b), q)), axis);
    return s > 0 ? 1 : -1;
}

}  // namespace detail

inline Labelling build_labelling(const IdealTriangulation& T, const CWComplex& C, const Flattening& F, bool seed_out = true) {
    Labelling lab;
    lab.coorientation = coorient(T, F.delta, seed_out);
    const std::size_t ne = C.count(1);
    lab.orientation.assign(ne, 0);
    lab.label.assign(ne, Mat2{});
    auto record = [&](const OrientedEdge& oe, int rule, const Mat2& M) {
        int o = rule * oe.sign;  // rule direction relative to the stored direction
        if (lab.orientation[oe.cell] == 0) {
            lab.orientation[oe.cell] = o;
            lab.label[oe.cell] = o > 0 ? M : M.inverse();
        } else if (lab.orientation[oe.cell] != o) {
            throw InternalError("edge orientation differs between identified copies");
        }
    };
    for (int t = 0; t < T.num_tetrahedra(); ++t)
        for (const auto& c : CWComplex::corners()) {
            int y = remaining_vertex(c.v, c.w, c.x);
            bool out = lab.coorientation[4 * t + c.x];
            Corner lng{c.w, c.v, c.x}, med{c.v, y, c.x}, sh{c.v, c.w, y};
            record(C.oriented_edge(t, c, lng), detail::face_rule(c, lng, c.x, out), Mat2::S());
            record(C.oriented_edge(t, c, med), detail::face_rule(c, med, c.x, out), Mat2::T());
            record(C.oriented_edge(t, c, sh), detail::short_rule(c, sh), Mat2::H(F.W[T.quad(t, edge_slot(c.v, c.w))]));
        }
    for (int o : lab.orientation)
        if (o == 0) throw InternalError("unlabelled edge");
    return lab;
}

inline Mat2 holonomy(const Labelling& lab, const Cell& face) {
    Mat2 h;
    for (const auto& e : face.loop) h = h * (e.sign > 0 ? lab.label[e.cell] : lab.label[e.cell].inverse());
    return h;
}

struct LabellingReport {
    std::vector<double> distance;  // per 2-cell, to the expected +-identity
    Z2Vector sign_cochain;         // rectangles whose holonomy is -identity
    double max_distance = 0;
    double max_determinant_error = 0;
    double unipotence_error = 0;   // max |diagonal - 1| over boundary loops
    bool cocycle = false;          // all 2-cells within tolerance
    bool boundary_unipotent = false;
    bool ok() const { return cocycle && boundary_unipotent; }
};

inline LabellingReport verify_labelling(const CWComplex& C, const Labelling& lab, const ShapeTolerances& tol = {}) {
    LabellingReport r;
    r.sign_cochain = Z2Vector(C.count(2));
    for (const auto& M : lab.label) r.max_determinant_error = std::max(r.max_determinant_error, std::abs(M.det() - 1.0));
    for (std::size_t i = 0; i < C.count(2); ++i) {
        const Cell& f = C.cell(2, static_cast<int>(i));
        Mat2 h = holonomy(lab, f);
        double d;
        if (f.kind == CellKind::Rectangle) {
            double plus = h.distance_to(1), minus = h.distance_to(-1);
            if (minus < plus) r.sign_cochain.set(i);
            d = std::min(plus, minus);
        } else {
            d = h.distance_to(1);
        }
        r.distance.push_back(d);
        r.max_distance = std::max(r.max_distance, d);
    }
    r.cocycle = r.max_distance <= tol.mat;

    // Fundamental loops of the boundary 1-skeleton generate every peripheral monodromy.
    const std::size_t nv = C.count(0);
    std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (edge, +1 if leaving along its direction)
    for (std::size_t e = 0; e < C.count(1); ++e) {
        const Cell& c = C.cell(1, static_cast<int>(e));
        if (!c.boundary) continue;
        adj[c.tail].push_back({static_cast<int>(e), 1});
        adj[c.head].push_back({static_cast<int>(e), -1});
    }
    std::vector<Mat2> G(nv);
    std::vector<int> seen(nv, 0), tree(C.count(1), 0);
    for (std::size_t root = 0; root < nv; ++root) {
        if (seen[root]) continue;
        seen[root] = 1;
        std::vector<int> q{static_cast<int>(root)};
        for (std::size_t k = 0; k < q.size(); ++k) {
            int u = q[k];
            for (auto [e, s] : adj[u]) {
                const Cell& c = C.cell(1, e);
                int v = s > 0 ? c.head : c.tail;
                if (seen[v]) continue;
                seen[v] = 1;
                tree[e] = 1;
                G[v] = G[u] * (s > 0 ? lab.label[e] : lab.label[e].inverse());
                q.push_back(v);
            }
        }
    }
    for (std::size_t e = 0; e < C.count(1); ++e) {
        const Cell& c = C.cell(1, static_cast<int>(e));
        if (!c.boundary || tree[e]) continue;
        Mat2 h = G[c.tail] * lab.label[e] * G[c.head].inverse();
        r.unipotence_error = std::max({r.unipotence_error, std::abs(h.a - 1.0), std::abs(h.d - 1.0), std::abs(h.c)});
    }
    r.boundary_unipotent = r.unipotence_error <= tol.mat;
    return r;
}

inline nlohmann::json to_json(const LabellingReport& r) {
    return {{"holonomy_distance", r.distance},
            {"max_distance", r.max_distance},
            {"sign_cochain", r.sign_cochain.to_ints()},
            {"cocycle", r.cocycle},
            {"boundary_unipotent", r.boundary_unipotent},
            {"unipotence_error", r.unipotence_error}};
}

// ---------------------------------------------------------------------------

struct ShapesObstruction {
    ShapeSolution shapes;
    LogParameters logs;
    Flattening flattening;
    LabellingReport labelling;
    ObstructionClass obstruction;  // relative when the shapes are complete
};

inline std::vector<cplx> angle_structure_of(const ShapeSolution& s) {
    std::vector<cplx> w(s.z.size());
    for (std::size_t q = 0; q < w.size(); ++q) w[q] = s.z[q] / std::abs(s.z[q]);
    return w;
}

inline ShapesObstruction obstruction_from_shapes(const ObstructionTheory& O, const std::vector<cplx>& z,
                                                 const ShapeTolerances& tol = {}) {
    const auto& A = O.angles();
    ShapesObstruction r;
    r.shapes = check_shapes(A, z, tol);
    r.logs = log_branches(A, r.shapes, tol);
    r.flattening = find_flattening(A, r.logs, tol);
    auto lab = build_labelling(O.triangulation(), O.complex(), r.flattening);
    r.labelling = verify_labelling(O.complex(), lab, tol);
    if (!r.labelling.cocycle) throw MathError("labelling fails the cocycle conditions");
    if (r.labelling.boundary_unipotent != r.shapes.complete)
        throw InternalError("boundary unipotence disagrees with completeness");
    const bool rel = r.shapes.complete;
    r.obstruction = O.rect_class(r.flattening.delta, rel);
    if (r.labelling.sign_cochain != rect(O.triangulation(), O.complex(), r.flattening.delta))
        throw InternalError("rectangle signs differ from rect(delta)");
    Tolerances at{tol.eq, tol.eq, tol.round};
    auto w = angle_structure_of(r.shapes);
    auto cross = rel ? O.phi0(w, at) : O.phi(w, at);
    if (cross.coordinates != r.obstruction.coordinates)
        throw InternalError("obstruction from shapes differs from the angle-structure class");
    return r;
}

inline nlohmann::json to_json(const ShapesObstruction& r) {
    auto cplx_json = [](const std::vector<cplx>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : v) a.push_back({x.real(), x.imag()});
        return a;
    };
    nlohmann::json j{{"complete", r.shapes.complete},
                     {"edge_residual", r.shapes.edge_residual},
                     {"completeness_residual", r.shapes.completeness_residual},
                     {"c", ints_to_json(r.logs.c)},
                     {"f", ints_to_json(r.flattening.f)},
                     {"delta", r.flattening.delta.to_ints()},
                     {"W", cplx_json(r.flattening.W)},
                     {"strong", r.flattening.strong},
                     {"space", r.obstruction.relative ? "H2(M,dM;Z2)" : "H2(M;Z2)"},
                     {"class", r.obstruction.coordinates.to_ints()},
                     {"labelling", to_json(r.labelling)}};
    if (r.logs.complete) j["d"] = ints_to_json(r.logs.d);
    return j;
}

}  // namespace circang
