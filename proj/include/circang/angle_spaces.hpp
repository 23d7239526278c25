#pragma once

// Circle-valued angle structures: the defining monomial systems, tangent
// spaces, leading-trailing deformations, component signatures and the integer
// pseudo-angle solver.

#include <circang/tri_core.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace circang {

using CircleAngleStructure = std::vector<std::complex<double>>;

struct Tolerances {
    double unit = 1e-9;   // |omega| = 1
    double eq = 1e-9;     // equation residuals
    double round = 1e-6;  // rounding of lifted sums to integers
};

struct LTMatrices {
    IntMatrix L;      // N x 3N, row j = l_{E_j}
    IntMatrix Lstar;  // first N-1 rows of L; only filled for one cusp
    IntMatrix Ld;     // 2k x 3N, peripheral deformations
};

// Row-wise x -> (x'' - x', x - x'', x' - x) on quad-major rows.
inline IntMatrix leading_trailing(const IntMatrix& M, int N) {
    IntMatrix L(M.rows(), M.cols());
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (int t = 0; t < N; ++t)
            for (int s = 0; s < 3; ++s) L(i, s * N + t) = M(i, ((s + 2) % 3) * N + t) - M(i, ((s + 1) % 3) * N + t);
    return L;
}

inline LTMatrices lt_matrices(const GluingData& g) {
    LTMatrices m;
    m.L = leading_trailing(g.G, g.N);
    m.Ld = leading_trailing(g.Gd, g.N);
    if (g.k == 1) {
        m.Lstar = IntMatrix(g.N - 1, 3 * g.N);
        for (int i = 0; i + 1 < g.N; ++i)
            for (int q = 0; q < 3 * g.N; ++q) m.Lstar(i, q) = m.L(i, q);
    }
    IntMatrix A = g.G.stacked(g.Gd);
    IntMatrix AL = A * m.L.transpose();
    for (std::size_t i = 0; i < AL.rows(); ++i)
        for (std::size_t j = 0; j < AL.cols(); ++j)
            if (AL(i, j) != 0) throw InternalError("leading-trailing deformations do not annihilate the gluing rows");
    return m;
}

// N x 3N: row t has ones on the three quads of tetrahedron t.
inline IntMatrix tetrahedron_matrix(int N) {
    IntMatrix T(N, 3 * N);
    for (int t = 0; t < N; ++t)
        for (int s = 0; s < 3; ++s) T(t, s * N + t) = 1;
    return T;
}

// Exponent matrix of the monomial system cutting out SA (tetrahedra, edges) or
// SA_0 (plus peripheral rows), with the matching right-hand signs.
inline IntMatrix defining_matrix(const GluingData& g, bool relative) {
    IntMatrix E = tetrahedron_matrix(g.N).stacked(g.G);
    return relative ? E.stacked(g.Gd) : E;
}

inline std::vector<int> defining_signs(const GluingData& g, bool relative) {
    std::vector<int> s(g.N, -1);
    s.resize(2 * g.N + (relative ? 2 * g.k : 0), 1);
    return s;
}

struct SpaceDimensions {
    std::size_t tas = 0, tas0 = 0;
};

// (N + k, N - k), checked against the ranks of the defining systems.
inline SpaceDimensions space_dimensions(const GluingData& g) {
    SpaceDimensions d{static_cast<std::size_t>(g.N + g.k), static_cast<std::size_t>(g.N - g.k)};
    std::size_t n = 3 * g.N;
    std::size_t abs = n - smith_normal_form(defining_matrix(g, false)).rank;
    std::size_t rel = n - smith_normal_form(defining_matrix(g, true)).rank;
    if (abs != d.tas || rel != d.tas0) throw InternalError("tangent space dimensions disagree with N+k, N-k");
    return d;
}

inline std::complex<double> ipow(std::complex<double> z, Int e) {
    if (e < 0) {
        z = 1.0 / z;
        e = -e;
    }
    std::complex<double> r = 1;
    while (e > 0) {
        if ((e & 1) != 0) r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

// prod_q w(q)^{coef(q)}
inline std::complex<double> holonomy(const CircleAngleStructure& w, const IntVector& coef) {
    if (w.size() != coef.size()) throw std::invalid_argument("holonomy: length mismatch");
    std::complex<double> h = 1;
    for (std::size_t q = 0; q < w.size(); ++q)
        if (coef[q] != 0) h *= ipow(w[q], coef[q]);
    return h;
}

inline bool parity(const IdealTriangulation& T, const Z2Vector& x, const CurvePath& theta) {
    return curve_coefficients_mod2(T, theta).dot(x);
}

// (p x)(V) = sum_E inc(E, V) x(E)
inline IntVector p_map(const IdealTriangulation& T, const IntVector& x) {
    if (x.size() != static_cast<std::size_t>(T.num_edges())) throw std::invalid_argument("p_map: one entry per edge");
    IntVector r(T.num_cusps());
    for (int c = 0; c < T.num_cusps(); ++c)
        for (int e = 0; e < T.num_edges(); ++e) r[c] += T.incidence(e, c) * x[e];
    return r;
}

// Lift of a component: G alpha = pi c and, when the peripheral holonomy is
// trivial, G_d alpha = pi d. `d` is empty otherwise.
struct ComponentSignature {
    IntVector c;
    IntVector d;
    bool has_d() const { return !d.empty(); }
    bool operator==(const ComponentSignature&) const = default;
};

inline bool is_even(const IntVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Int& x) { return x % 2 == 0; });
}

class AngleSystem {
public:
    explicit AngleSystem(IdealTriangulation T, const std::optional<IntMatrix>& peripheral = std::nullopt)
        : T_(std::move(T)), g_(gluing_matrices(T_, peripheral)), lt_(lt_matrices(g_)) {
        for (bool rel : {false, true}) {
            E_[rel] = defining_matrix(g_, rel);
            snf_[rel] = smith_normal_form(E_[rel]);
        }
        const std::size_t n = T_.num_quads();
        std::vector<Z2Vector> rows;
        for (const auto& p : cycle_basis(T_)) rows.push_back(curve_coefficients_mod2(T_, p));
        for (int e = 0; e < T_.num_edges(); ++e) rows.push_back(curve_coefficients_mod2(T_, edge_loop(T_, e)));
        for (std::size_t i = 0; i < g_.Gd.rows(); ++i) rows.push_back(Z2Vector::from_ints(g_.Gd.row(i)));
        parity_ = Z2Matrix::from_rows(rows, n);
        ltT_[false] = Z2Matrix::from_int(lt_.L.stacked(lt_.Ld).transpose());
        ltT_[true] = Z2Matrix::from_int(lt_.L.transpose());
    }

    const IdealTriangulation& triangulation() const { return T_; }
    const GluingData& gluing() const { return g_; }
    const LTMatrices& lt() const { return lt_; }
    int num_quads() const { return T_.num_quads(); }

    // Rows: basis loops, edge loops, peripheral curves (mod 2 curve coefficients).
    const Z2Matrix& parity_functionals() const { return parity_; }
    bool has_even_parity(const Z2Vector& x) const { return (parity_ * x).is_zero(); }

    const IntMatrix& defining(bool relative) const { return E_[relative]; }
    const SNFDecomposition& defining_snf(bool relative) const { return snf_[relative]; }

    TorusComponents component_count(bool relative) const {
        auto tc = torus_solution_components(E_[relative], defining_signs(g_, relative), snf_[relative]);
        if (!tc) throw InternalError("angle structure space is empty");
        return *tc;
    }

    // Throws MathError unless w lies in SA (or SA_0 when `relative`).
    void check_structure(const CircleAngleStructure& w, bool relative, const Tolerances& tol = {}) const {
        if (w.size() != static_cast<std::size_t>(num_quads()))
            throw MathError("angle structure must have one entry per quad");
        for (const auto& x : w)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) || std::abs(std::abs(x) - 1.0) > tol.unit)
                throw MathError("angle structure entry is not of unit modulus");
        for (std::size_t i = 0; i < E_[relative].rows(); ++i) {
            std::complex<double> want = i < static_cast<std::size_t>(g_.N) ? -1.0 : 1.0;
            if (std::abs(holonomy(w, E_[relative].row(i)) - want) > tol.eq) {
                if (i < static_cast<std::size_t>(g_.N)) throw MathError("tetrahedron product is not -1");
                if (i < static_cast<std::size_t>(2 * g_.N)) throw MathError("edge product is not 1");
                throw MathError("peripheral holonomy is not 1");
            }
        }
    }

    // Principal arguments, each tetrahedron sum normalised to pi at slot 0.
    std::vector<double> normalized_arguments(const CircleAngleStructure& w, const Tolerances& tol = {}) const {
        const double pi = std::numbers::pi;
        std::vector<double> a(w.size());
        for (std::size_t q = 0; q < w.size(); ++q) {
            a[q] = std::arg(w[q]);
            if (a[q] <= -pi) a[q] += 2 * pi;
        }
        for (int t = 0; t < g_.N; ++t) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a[T_.quad(t, k)];
            double n = std::round((s - pi) / (2 * pi));
            if (std::abs(s - pi - 2 * pi * n) > tol.round) throw MathError("tetrahedron product is not -1");
            a[T_.quad(t, 0)] -= 2 * pi * n;
        }
        return a;
    }

    ComponentSignature component_signature(const CircleAngleStructure& w, const Tolerances& tol = {}) const {
        check_structure(w, false, tol);
        auto a = normalized_arguments(w, tol);
        auto lifted = [&](const IntMatrix& M, std::size_t i) {
            double s = 0;
            for (std::size_t q = 0; q < M.cols(); ++q)
                if (M(i, q) != 0) s += static_cast<double>(M(i, q)) * a[q];
            return s / std::numbers::pi;
        };
        ComponentSignature sig;
        for (std::size_t i = 0; i < g_.G.rows(); ++i) {
            double x = lifted(g_.G, i);
            double r = std::round(x);
            if (std::abs(x - r) > tol.round) throw MathError("edge product is not 1");
            sig.c.push_back(Int(static_cast<long long>(r)));
        }
        if (!is_even(sig.c)) throw InternalError("odd edge signature");
        IntVector d;
        for (std::size_t i = 0; i < g_.Gd.rows(); ++i) {
            double x = lifted(g_.Gd, i);
            double r = 2 * std::round(x / 2);
            if (std::abs(x - r) > tol.round) return sig;
            d.push_back(Int(static_cast<long long>(r)));
        }
        sig.d = std::move(d);
        return sig;
    }

    // Integer eta with tetrahedron sums 1 (0 if homogeneous), G eta = c,
    // G_d eta = d (when d is given) and even parity along every curve.
    IntVector integer_pseudo_angle(const ComponentSignature& sig, bool homogeneous = false) const {
        const int N = g_.N;
        if (sig.c.size() != static_cast<std::size_t>(N)) throw std::invalid_argument("c needs one entry per edge");
        if (sig.has_d() && sig.d.size() != static_cast<std::size_t>(2 * g_.k))
            throw std::invalid_argument("d needs one entry per peripheral curve");
        if (!is_even(sig.c) || !is_even(sig.d)) throw MathError("signature entries must be even");
        IntVector shifted = sig.c;
        if (!homogeneous)
            for (auto& x : shifted) x -= 2;
        for (const auto& v : p_map(T_, shifted))
            if (v != 0) throw MathError(homogeneous ? "c is not in the kernel of p" : "p(c - 2) is not zero");

        const bool rel = sig.has_d();
        IntVector rhs(N, homogeneous ? 0 : 1);
        rhs.insert(rhs.end(), sig.c.begin(), sig.c.end());
        rhs.insert(rhs.end(), sig.d.begin(), sig.d.end());
        auto sol = integer_solve(E_[rel], rhs, snf_[rel]);
        if (!sol) throw MathError("no integer solution for the given signature");
        IntVector eta = sol->particular;

        Z2Matrix M(parity_.rows(), sol->kernel.size());
        for (std::size_t j = 0; j < sol->kernel.size(); ++j) {
            Z2Vector kj = parity_ * Z2Vector::from_ints(sol->kernel[j]);
            for (std::size_t i = 0; i < parity_.rows(); ++i)
                if (kj.get(i)) M.set(i, j);
        }
        auto fix = z2_solve(M, parity_ * Z2Vector::from_ints(eta));
        if (!fix) throw InternalError("parity of the pseudo-angle cannot be corrected");
        for (std::size_t j = 0; j < sol->kernel.size(); ++j)
            if (fix->particular.get(j))
                for (std::size_t q = 0; q < eta.size(); ++q) eta[q] += sol->kernel[j][q];

        if (E_[rel] * eta != rhs || !has_even_parity(Z2Vector::from_ints(eta)))
            throw InternalError("pseudo-angle solver produced an invalid vector");
        return eta;
    }

    // alpha_1 - alpha_2 in Im L_2^T (relative) or Im L_2^T + Im [L_d]_2^T.
    bool same_component_mod2(const Z2Vector& a1, const Z2Vector& a2, bool relative) const {
        return z2_in_image(ltT_[relative], a1 ^ a2);
    }

    // Even-parity Z_2 angle structure on the component of w.
    Z2Vector representative(const CircleAngleStructure& w, bool relative, const Tolerances& tol = {}) const {
        auto sig = component_signature(w, tol);
        if (relative && !sig.has_d()) throw MathError("peripheral holonomy is not 1");
        if (!relative) sig.d.clear();
        return Z2Vector::from_ints(integer_pseudo_angle(sig));
    }

    bool same_component(const CircleAngleStructure& w1, const CircleAngleStructure& w2, bool relative,
                        const Tolerances& tol = {}) const {
        return same_component_mod2(representative(w1, relative, tol), representative(w2, relative, tol), relative);
    }

    // One exact lift per component of SA (or SA_0), read off the Smith form
    // of the defining system. Component j has phi = Q y with
    // y_i = ((P h)_i + 2 j_i) / s_i on the pivots, 0 on the free coordinates.
    std::vector<ComponentSignature> component_signatures(bool relative) const {
        const auto& snf = snf_[relative];
        const IntMatrix& E = E_[relative];
        const std::size_t n = E.cols();
        IntVector h(E.rows());
        for (int t = 0; t < g_.N; ++t) h[t] = 1;
        IntVector ph = snf.P * h;
        std::vector<Int> radix(snf.rank);
        for (std::size_t i = 0; i < snf.rank; ++i) radix[i] = snf.S(i, i);
        std::vector<Int> j(snf.rank, 0);
        std::vector<ComponentSignature> out;
        for (;;) {
            std::vector<Rational> y(n, Rational(0));
            for (std::size_t i = 0; i < snf.rank; ++i) y[i] = Rational(ph[i] + 2 * j[i], radix[i]);
            std::vector<Rational> phi(n, Rational(0));
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < snf.rank; ++b)
                    if (snf.Q(a, b) != 0) phi[a] += Rational(snf.Q(a, b)) * y[b];
            for (int t = 0; t < g_.N; ++t) {
                Rational s = 0;
                for (int k = 0; k < 3; ++k) s += phi[T_.quad(t, k)];
                Rational n2 = (s - 1) / 2;
                if (denominator(n2) != 1) throw InternalError("component lift has a non-integral tetrahedron sum");
                phi[T_.quad(t, 0)] -= 2 * n2;
            }
            auto rows = [&](const IntMatrix& M) {
                IntVector r;
                for (std::size_t i = 0; i < M.rows(); ++i) {
                    Rational s = 0;
                    for (std::size_t q = 0; q < n; ++q)
                        if (M(i, q) != 0) s += Rational(M(i, q)) * phi[q];
                    if (denominator(s) != 1) throw InternalError("component lift is not integral");
                    r.push_back(numerator(s));
                }
                return r;
            };
            ComponentSignature sig{rows(g_.G), relative ? rows(g_.Gd) : IntVector{}};
            if (!is_even(sig.c) || !is_even(sig.d)) throw InternalError("odd component signature");
            out.push_back(std::move(sig));

            std::size_t i = 0;
            while (i < j.size() && ++j[i] == radix[i]) j[i++] = 0;
            if (i == j.size()) break;
        }
        return out;
    }

private:
    IdealTriangulation T_;
    GluingData g_;
    LTMatrices lt_;
    IntMatrix E_[2];
    SNFDecomposition snf_[2];
    Z2Matrix parity_;
    Z2Matrix ltT_[2];
};

inline IntVector integer_pseudo_angle(const IdealTriangulation& T, const ComponentSignature& sig,
                                      bool homogeneous = false) {
    return AngleSystem(T).integer_pseudo_angle(sig, homogeneous);
}

}  // namespace circang
