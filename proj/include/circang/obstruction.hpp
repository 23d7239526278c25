#pragma once

// Obstruction maps on circle-valued angle structures and the enumeration of
// the components of SA and SA_0 together with their Z_2 classes.

#include <circang/cw_complex.hpp>

#include <memory>
#include <string>
#include <vector>

namespace circang {

struct ObstructionClass {
    bool relative = true;     // H^2(M, dM; Z_2) if set, else H^2(M; Z_2)
    Z2Vector coordinates;     // against the pinned cohomology basis
    Z2Vector cocycle;         // rect of the representative
    bool is_zero() const { return coordinates.is_zero(); }
};

struct ComponentInfo {
    ComponentSignature signature;
    IntVector pseudo_angle;  // integer lift with tetrahedron sums 1
    Z2Vector representative;
    Z2Vector class_coordinates;
    int dim = 0;
};

struct ComponentReport {
    bool relative = true;
    std::vector<ComponentInfo> components;
};

inline nlohmann::json ints_to_json(const IntVector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(static_cast<long long>(x));
    return a;
}

inline nlohmann::json to_json(const ComponentReport& r) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : r.components) {
        nlohmann::json sig{{"c", ints_to_json(c.signature.c)}};
        if (r.relative) sig["d"] = ints_to_json(c.signature.d);
        comps.push_back({{"dim", c.dim},
                         {"representative", c.representative.to_ints()},
                         {"class", c.class_coordinates.to_ints()},
                         {"signature", sig}});
    }
    return {{"space", r.relative ? "SA0" : "SA"}, {"components", comps}};
}

class ObstructionTheory {
public:
    explicit ObstructionTheory(const IdealTriangulation& T, const std::optional<IntMatrix>& peripheral = std::nullopt)
        : A_(T, peripheral),
          C_(std::make_unique<CWComplex>(T)),
          rel_(*C_, 2, CochainSpace::Relative),
          abs_(*C_, 2, CochainSpace::Absolute),
          bd_(*C_, 2, CochainSpace::Boundary) {
        // Kernel of restriction H^2(M) -> H^2(dM), as coordinates in abs_.
        Z2Matrix R(bd_.dim(), abs_.dim());
        for (std::size_t j = 0; j < abs_.dim(); ++j) {
            Z2Vector img = bd_.reduce(restrict_to_boundary(*C_, 2, abs_.basis()[j]));
            for (std::size_t i = 0; i < bd_.dim(); ++i)
                if (img.get(i)) R.set(i, j);
        }
        ker_iota_ = z2_solve(R, Z2Vector(bd_.dim()))->kernel;
    }

    const AngleSystem& angles() const { return A_; }
    const IdealTriangulation& triangulation() const { return A_.triangulation(); }
    const CWComplex& complex() const { return *C_; }
    const Cohomology& relative_cohomology() const { return rel_; }
    const Cohomology& absolute_cohomology() const { return abs_; }
    const Cohomology& boundary_cohomology() const { return bd_; }
    std::size_t ker_iota_dim() const { return ker_iota_.size(); }

    // Class of rect(alpha) for a Z_2 angle structure alpha with G_2 alpha = 0.
    ObstructionClass rect_class(const Z2Vector& alpha, bool relative) const {
        Z2Vector r = rect(triangulation(), *C_, alpha);
        if (relative) return {true, rel_.reduce(r), r};
        Z2Vector a = include_relative(*C_, r);
        return {false, abs_.reduce(a), a};
    }

    ObstructionClass phi0(const CircleAngleStructure& w, const Tolerances& tol = {}) const {
        A_.check_structure(w, true, tol);
        return rect_class(A_.representative(w, true, tol), true);
    }

    ObstructionClass phi(const CircleAngleStructure& w, const Tolerances& tol = {}) const {
        A_.check_structure(w, false, tol);
        auto cls = rect_class(A_.representative(w, false, tol), false);
        if (!bd_.reduce(restrict_to_boundary(*C_, 2, cls.cocycle)).is_zero())
            throw InternalError("obstruction class does not restrict to zero on the boundary");
        return cls;
    }

    bool same_component(const CircleAngleStructure& w1, const CircleAngleStructure& w2, bool relative,
                        const Tolerances& tol = {}) const {
        return A_.same_component(w1, w2, relative, tol);
    }

    ComponentReport enumerate_components(bool relative) const {
        ComponentReport rep{relative, {}};
        const int dim = static_cast<int>(A_.component_count(relative).dim);
        for (const auto& sig : A_.component_signatures(relative)) {
            ComponentInfo c;
            c.signature = sig;
            c.pseudo_angle = A_.integer_pseudo_angle(sig);
            c.representative = Z2Vector::from_ints(c.pseudo_angle);
            c.class_coordinates = rect_class(c.representative, relative).coordinates;
            c.dim = dim;
            rep.components.push_back(std::move(c));
        }
        const std::size_t h = relative ? rel_.dim() : ker_iota_.size();
        if (h >= 8 * sizeof(std::size_t) || rep.components.size() != (std::size_t{1} << h))
            throw InternalError("component count differs from 2^" + std::to_string(h));
        std::vector<Z2Vector> seen;
        for (const auto& c : rep.components) {
            for (const auto& s : seen)
                if (s == c.class_coordinates) throw InternalError("two components share an obstruction class");
            seen.push_back(c.class_coordinates);
        }
        return rep;
    }

private:
    AngleSystem A_;
    std::unique_ptr<CWComplex> C_;  // Cohomology keeps a pointer into it
    Cohomology rel_, abs_, bd_;
    std::vector<Z2Vector> ker_iota_;
};

}  // namespace circang
