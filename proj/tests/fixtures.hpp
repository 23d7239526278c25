#pragma once

#include <circang/tri_core.hpp>

#include <complex>
#include <string>
#include <vector>

namespace fixtures {

inline const std::vector<std::string>& census() {
    static const std::vector<std::string> names{"m003", "m004", "m009", "m045", "m129", "L13a76"};
    return names;
}

inline std::string path(const std::string& name) { return std::string(CIRCANG_TEST_DATA) + "/" + name + ".json"; }

inline circang::IdealTriangulation load(const std::string& name) { return circang::load_triangulation(path(name)); }

inline nlohmann::json parse_file(const std::string& name) { return nlohmann::json::parse(circang::read_text_file(path(name))); }

// Same fixture with the stored meridian/longitude rows removed.
inline circang::IdealTriangulation load_without_peripheral(const std::string& name) {
    auto j = parse_file(name);
    j.erase("peripheral");
    return circang::parse_triangulation_json(j);
}

// Values computed offline by tools/export_fixtures.py.
inline const nlohmann::json& reference() {
    static const nlohmann::json r = parse_file("reference");
    return r;
}

inline circang::IntMatrix reference_matrix(const std::string& name, const char* key) {
    return circang::IntMatrix::from_rows(reference().at(name).at(key).get<std::vector<std::vector<long long>>>());
}

inline std::vector<std::complex<double>> geometric_shapes(const std::string& name) {
    std::vector<std::complex<double>> z;
    for (const auto& p : reference().at(name).at("geometric_shapes")) z.emplace_back(p[0].get<double>(), p[1].get<double>());
    return z;
}

// z, z' = 1/(1-z), z'' = (z-1)/z in quad-major order.
inline std::vector<std::complex<double>> quad_shapes(const std::vector<std::complex<double>>& z) {
    const std::size_t N = z.size();
    std::vector<std::complex<double>> w(3 * N);
    for (std::size_t t = 0; t < N; ++t) {
        w[t] = z[t];
        w[N + t] = 1.0 / (1.0 - z[t]);
        w[2 * N + t] = (z[t] - 1.0) / z[t];
    }
    return w;
}

// omega = z / |z| for the geometric solution.
inline std::vector<std::complex<double>> geometric_angles(const std::string& name) {
    auto w = quad_shapes(geometric_shapes(name));
    for (auto& x : w) x /= std::abs(x);
    return w;
}

// Z-span equality of two row sets.
inline bool same_lattice(const circang::IntMatrix& a, const circang::IntMatrix& b) {
    auto contains = [](const circang::IntMatrix& gens, const circang::IntMatrix& rows) {
        circang::IntMatrix T = gens.transpose();
        auto snf = circang::smith_normal_form(T);
        for (std::size_t i = 0; i < rows.rows(); ++i)
            if (!circang::integer_solve(T, rows.row(i), snf)) return false;
        return true;
    };
    return contains(a, b) && contains(b, a);
}

// Row changes that leave every angle holonomy unchanged: edge rows, and
// tetrahedron-row combinations with an even coefficient sum (each tetrahedron
// row adds pi to the log-holonomy of any angle structure).
inline circang::IntMatrix holonomy_neutral_rows(const circang::IdealTriangulation& T) {
    const int N = T.num_tetrahedra();
    circang::IntMatrix R(N, 3 * N);
    for (int t = 0; t < N; ++t)
        for (int s = 0; s < 3; ++s) {
            R(t, T.quad(0, s)) -= t == 0 ? -2 : 1;
            if (t) R(t, T.quad(t, s)) += 1;
        }
    return circang::edge_gluing_matrix(T).stacked(R);
}

}  // namespace fixtures
