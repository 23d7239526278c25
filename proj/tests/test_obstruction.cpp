#include <circang/obstruction.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"

using namespace circang;

namespace {

CircleAngleStructure signs(const Z2Vector& a) {
    CircleAngleStructure w(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = a.get(i) ? -1.0 : 1.0;
    return w;
}

Z2Vector bits(std::initializer_list<int> v) { return Z2Vector::from_ints(IntVector(v.begin(), v.end())); }

CircleAngleStructure omega1() { return CircleAngleStructure(6, std::polar(1.0, std::numbers::pi / 3)); }
CircleAngleStructure omega2() { return signs(bits({0, 0, 1, 1, 0, 0})); }

// Move w along exp(i x l) for rows l of M.
CircleAngleStructure deform(CircleAngleStructure w, const IntMatrix& M, const std::vector<double>& x) {
    for (std::size_t r = 0; r < M.rows(); ++r)
        for (std::size_t q = 0; q < M.cols(); ++q)
            if (M(r, q) != 0) w[q] *= std::polar(1.0, x[r] * static_cast<double>(M(r, q)));
    return w;
}

}  // namespace

TEST(Phi, M003Classes) {
    ObstructionTheory O(fixtures::load("m003"));
    auto c1 = O.phi0(omega1());
    EXPECT_FALSE(c1.is_zero());
    EXPECT_EQ(c1.coordinates, bits({1}));
    EXPECT_TRUE(O.phi0(omega2()).is_zero());
    EXPECT_TRUE(O.phi(omega1()).is_zero());
    EXPECT_TRUE(O.phi(omega2()).is_zero());
    EXPECT_FALSE(O.same_component(omega1(), omega2(), true));
    EXPECT_TRUE(O.same_component(omega1(), omega2(), false));
    EXPECT_TRUE(O.same_component(omega1(), omega1(), true));
}

TEST(Phi, RejectsNonStructures) {
    ObstructionTheory O(fixtures::load("m003"));
    EXPECT_THROW(O.phi0(CircleAngleStructure(6, 1.0)), MathError);
    EXPECT_THROW(O.phi(CircleAngleStructure(5, 1.0)), MathError);
}

TEST(Phi, SignVectorsReduceDirectly) {
    for (const auto& name : fixtures::census()) {
        ObstructionTheory O(fixtures::load(name));
        for (bool rel : {true, false})
            for (const auto& c : O.enumerate_components(rel).components) {
                auto w = signs(c.representative);
                auto cls = rel ? O.phi0(w) : O.phi(w);
                EXPECT_EQ(cls.coordinates, O.rect_class(c.representative, rel).coordinates) << name;
                EXPECT_EQ(cls.coordinates, c.class_coordinates) << name;
            }
    }
}

TEST(Phi, GeometricClassOnAllFixtures) {
    for (const auto& name : fixtures::census()) {
        ObstructionTheory O(fixtures::load(name));
        auto w = fixtures::geometric_angles(name);
        EXPECT_FALSE(O.phi0(w).is_zero()) << name;
        EXPECT_TRUE(O.phi(w).is_zero()) << name;
    }
}

TEST(Phi, ConstantAlongComponents) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const auto& name : fixtures::census()) {
        ObstructionTheory O(fixtures::load(name));
        const auto& lt = O.angles().lt();
        auto w = fixtures::geometric_angles(name);
        auto base0 = O.phi0(w).coordinates;
        auto base = O.phi(w).coordinates;
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> x(lt.L.rows()), y(lt.Ld.rows());
            for (auto& v : x) v = u(rng);
            for (auto& v : y) v = u(rng);
            auto w1 = deform(w, lt.L, x);
            EXPECT_EQ(O.phi0(w1).coordinates, base0) << name;
            EXPECT_EQ(O.phi(deform(w1, lt.Ld, y)).coordinates, base) << name;
        }
    }
}

TEST(Phi, WellDefinedOnCosets) {
    std::mt19937 rng(5);
    int pairs = 0;
    for (const auto& name : fixtures::census()) {
        ObstructionTheory O(fixtures::load(name));
        Z2Matrix L = Z2Matrix::from_int(O.angles().lt().L);
        auto comps = O.enumerate_components(true).components;
        for (int trial = 0; trial < 17; ++trial) {
            const auto& c = comps[trial % comps.size()];
            Z2Vector a2 = c.representative;
            for (std::size_t r = 0; r < L.rows(); ++r)
                if (rng() & 1) a2 ^= L.row(r);
            EXPECT_EQ(O.rect_class(a2, true).coordinates, c.class_coordinates) << name;
            ++pairs;
        }
    }
    EXPECT_GE(pairs, 100);
}

TEST(Components, M003) {
    ObstructionTheory O(fixtures::load("m003"));
    auto rel = O.enumerate_components(true);
    ASSERT_EQ(rel.components.size(), 2u);
    EXPECT_EQ(rel.components[0].dim, 1);
    EXPECT_NE(rel.components[0].class_coordinates, rel.components[1].class_coordinates);
    auto abs = O.enumerate_components(false);
    ASSERT_EQ(abs.components.size(), 1u);
    EXPECT_EQ(abs.components[0].dim, 3);
    EXPECT_TRUE(abs.components[0].class_coordinates.is_zero());
}

TEST(Components, FigureEight) {
    ObstructionTheory O(fixtures::load("m004"));
    auto rel = O.enumerate_components(true);
    ASSERT_EQ(rel.components.size(), 2u);
    EXPECT_NE(rel.components[0].class_coordinates, rel.components[1].class_coordinates);
}

TEST(Components, CountLawBijectionAndInjectivity) {
    for (const auto& name : fixtures::census()) {
        ObstructionTheory O(fixtures::load(name));
        const auto& ref = fixtures::reference().at(name);
        for (bool rel : {true, false}) {
            auto rep = O.enumerate_components(rel);
            std::size_t h = rel ? ref.at("h2_rel").get<std::size_t>() : ref.at("ker_iota").get<std::size_t>();
            EXPECT_EQ(rep.components.size(), std::size_t{1} << h) << name;
            auto tc = O.angles().component_count(rel);
            EXPECT_EQ(rep.components.size(), static_cast<std::size_t>(tc.count)) << name;
            // Classes are distinct and, relatively, exhaust H^2.
            std::set<std::vector<int>> classes;
            for (const auto& c : rep.components) classes.insert(c.class_coordinates.to_ints());
            EXPECT_EQ(classes.size(), rep.components.size()) << name;
            if (rel) EXPECT_EQ(classes.size(), std::size_t{1} << O.relative_cohomology().dim()) << name;
            for (std::size_t i = 0; i < rep.components.size(); ++i)
                for (std::size_t j = 0; j < rep.components.size(); ++j) {
                    bool same_class = rep.components[i].class_coordinates == rep.components[j].class_coordinates;
                    bool same = O.angles().same_component_mod2(rep.components[i].representative,
                                                               rep.components[j].representative, rel);
                    EXPECT_EQ(same, same_class) << name;
                }
        }
    }
}

TEST(Components, AbsoluteClassesLieInKernelOfRestriction) {
    for (const auto& name : fixtures::census()) {
        ObstructionTheory O(fixtures::load(name));
        for (const auto& c : O.enumerate_components(false).components) {
            auto cls = O.rect_class(c.representative, false);
            EXPECT_TRUE(O.boundary_cohomology().reduce(restrict_to_boundary(O.complex(), 2, cls.cocycle)).is_zero());
        }
        EXPECT_EQ(O.ker_iota_dim(), fixtures::reference().at(name).at("ker_iota").get<std::size_t>()) << name;
    }
}

TEST(Report, JsonSchema) {
    ObstructionTheory O(fixtures::load("m003"));
    auto j = to_json(O.enumerate_components(true));
    EXPECT_EQ(j.at("space"), "SA0");
    ASSERT_EQ(j.at("components").size(), 2u);
    const auto& c = j.at("components")[0];
    EXPECT_EQ(c.at("dim"), 1);
    EXPECT_EQ(c.at("representative").size(), 6u);
    EXPECT_EQ(c.at("class").size(), 1u);
    EXPECT_EQ(c.at("signature").at("c").size(), 2u);
    EXPECT_EQ(c.at("signature").at("d").size(), 2u);
    auto a = to_json(O.enumerate_components(false));
    EXPECT_EQ(a.at("space"), "SA");
    EXPECT_FALSE(a.at("components")[0].at("signature").contains("d"));
    EXPECT_EQ(to_json(O.enumerate_components(true)).dump(), j.dump());
}
