// circang: command-line front end.
//   info <tri.json>
//   components <tri.json> [--relative]
//   obstruct <tri.json> --shapes <shapes.json>
//   flatten <tri.json> --shapes <shapes.json>
//   complex <tri.json>
// Common options: --tol <float>, --out <path>.
// Exit codes: 0 success, 1 mathematical failure, 2 input error.

#include <circang/shapes.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace {

using namespace circang;

struct Options {
    std::string tri, shapes, out;
    double tol = 1e-9;
    bool relative = false;
};

ShapeTolerances shape_tolerances(const Options& o) {
    ShapeTolerances t;
    t.eq = t.mat = o.tol;
    t.round = std::max(t.round, o.tol);
    return t;
}

nlohmann::json cmd_info(const Options& o) {
    auto T = load_triangulation(o.tri);
    ObstructionTheory O(T);
    const auto& g = O.angles().gluing();
    auto dims = space_dimensions(g);
    std::vector<int> val;
    for (int e = 0; e < T.num_edges(); ++e) val.push_back(T.valence(e));
    return {{"name", T.name()},
            {"tetrahedra", T.num_tetrahedra()},
            {"cusps", T.num_cusps()},
            {"edges", T.num_edges()},
            {"valences", val},
            {"tas_dim", dims.tas},
            {"tas0_dim", dims.tas0},
            {"h2_rel", O.relative_cohomology().dim()},
            {"h2_abs", O.absolute_cohomology().dim()},
            {"ker_iota", O.ker_iota_dim()}};
}

nlohmann::json cmd_components(const Options& o) {
    ObstructionTheory O(load_triangulation(o.tri));
    return to_json(O.enumerate_components(o.relative));
}

nlohmann::json cmd_obstruct(const Options& o) {
    ObstructionTheory O(load_triangulation(o.tri));
    return to_json(obstruction_from_shapes(O, load_shapes(o.shapes), shape_tolerances(o)));
}

nlohmann::json cmd_flatten(const Options& o) {
    auto T = load_triangulation(o.tri);
    AngleSystem A(T);
    auto tol = shape_tolerances(o);
    auto s = check_shapes(A, load_shapes(o.shapes), tol);
    auto L = log_branches(A, s, tol);
    auto F = find_flattening(A, L, tol);
    auto a = audit_flattening(A, L, F.f, tol);
    nlohmann::json W = nlohmann::json::array();
    for (const auto& w : F.W) W.push_back({w.real(), w.imag()});
    nlohmann::json j{{"complete", s.complete},
                     {"c", ints_to_json(L.c)},
                     {"f", ints_to_json(F.f)},
                     {"delta", F.delta.to_ints()},
                     {"W", W},
                     {"strong", F.strong},
                     {"conditions", {{"tetrahedra", a.tetrahedra}, {"edges", a.edges}, {"cusps", a.cusps}, {"parity", a.strong}}},
                     {"residual", a.residual}};
    if (s.complete) j["d"] = ints_to_json(L.d);
    return j;
}

nlohmann::json cmd_complex(const Options& o) { return CWComplex(load_triangulation(o.tri)).to_json(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circle-valued angle structures and Z/2 obstruction classes"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("triangulation", o.tri, "Triangulation JSON file")->required();
        sub->add_option("--tol", o.tol, "Equation and matrix tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "Write the JSON report here instead of stdout");
    };
    auto* info = app.add_subcommand("info", "Summary of a triangulation");
    auto* comps = app.add_subcommand("components", "Components of SA (or SA0 with --relative)");
    comps->add_flag("--relative", o.relative, "Peripherally trivial structures");
    auto* obs = app.add_subcommand("obstruct", "Obstruction class of a shape solution");
    auto* flat = app.add_subcommand("flatten", "Strong combinatorial flattening of a shape solution");
    auto* cx = app.add_subcommand("complex", "Dump the doubly truncated complex");
    for (auto* s : {info, comps, obs, flat, cx}) common(s);
    for (auto* s : {obs, flat}) s->add_option("--shapes", o.shapes, "Shapes JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        nlohmann::json r;
        if (*info) r = cmd_info(o);
        else if (*comps) r = cmd_components(o);
        else if (*obs) r = cmd_obstruct(o);
        else if (*flat) r = cmd_flatten(o);
        else r = cmd_complex(o);
        std::string text = r.dump(2) + "\n";
        if (o.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(o.out);
            if (!f) throw TriangulationError("cannot write " + o.out);
            f << text;
        }
    } catch (const TriangulationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const MathError& e) {
        std::cerr << "mathematical failure: " << e.what() << "\n";
        return 1;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
