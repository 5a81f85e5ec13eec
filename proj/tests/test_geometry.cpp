#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <set>

#include "oracle_util.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/io.hpp"
#include "polyspec/rng.hpp"

using namespace polyspec;
using Catch::Approx;

TEST_CASE("regular tetrahedron complex") {
    auto K = make_simplex_v(3, 1.0);
    auto fc = facet_complex_of_vpolytope(K);
    REQUIRE(fc.facet_count() == 4);
    REQUIRE(fc.ridge_count() == 6);
    REQUIRE(fc.simplicial);
    for (const auto& nb : fc.neighbors) REQUIRE(nb.size() == 3);  // all pairs adjacent
    // unit-edge data: facet area sqrt(3)/4, ridge length 1, normal angle acos(-1/3)
    for (const auto& f : fc.facets) REQUIRE(f.volume == Approx(std::sqrt(3.0) / 4.0));
    for (const auto& r : fc.ridges) {
        REQUIRE(r.volume == Approx(1.0));
        REQUIRE(r.theta == Approx(std::acos(-1.0 / 3.0)));
    }
}

TEST_CASE("octahedron complex by hand enumeration") {
    auto K = make_cross_v(3);
    auto fc = facet_complex_of_vpolytope(K);
    REQUIRE(fc.facet_count() == 8);
    REQUIRE(fc.ridge_count() == 12);
    for (const auto& nb : fc.neighbors) REQUIRE(nb.size() == 3);
    for (const auto& r : fc.ridges) {
        REQUIRE(r.volume == Approx(std::sqrt(2.0)));
        REQUIRE(r.theta == Approx(std::acos(1.0 / 3.0)));
    }
    for (const auto& f : fc.facets) {
        REQUIRE(f.volume == Approx(std::sqrt(3.0) / 2.0));
        REQUIRE(f.offset == Approx(1.0 / std::sqrt(3.0)));
    }
}

TEST_CASE("cube requires the merged path and yields hand values") {
    auto K = make_cube_v(3);
    REQUIRE_THROWS_AS(facet_complex_of_vpolytope(K), DegeneracyError);

    EnumOptions opt;
    opt.allow_merged = true;
    auto fc = facet_complex_of_vpolytope(K, opt);
    REQUIRE(fc.facet_count() == 6);
    REQUIRE(fc.ridge_count() == 12);
    REQUIRE_FALSE(fc.simplicial);
    for (const auto& f : fc.facets) {
        REQUIRE(f.volume == Approx(4.0));
        REQUIRE(f.offset == Approx(1.0));
    }
    for (const auto& r : fc.ridges) {
        REQUIRE(r.volume == Approx(2.0));
        REQUIRE(r.theta == Approx(M_PI / 2));
    }
    for (const auto& nb : fc.neighbors) REQUIRE(nb.size() == 4);
    REQUIRE(codim2_perimeter(fc) == Approx(24.0));
    REQUIRE(surface_area(fc) == Approx(24.0));
    REQUIRE(volume(fc) == Approx(8.0));
}

TEST_CASE("4-cube merged complex") {
    auto K = make_cube_v(4);
    EnumOptions opt;
    opt.allow_merged = true;
    auto fc = facet_complex_of_vpolytope(K, opt);
    REQUIRE(fc.facet_count() == 8);
    REQUIRE(fc.ridge_count() == 24);
    for (const auto& f : fc.facets) REQUIRE(f.volume == Approx(8.0));
    for (const auto& r : fc.ridges) REQUIRE(r.volume == Approx(4.0));
    REQUIRE(volume(fc) == Approx(16.0));
}

TEST_CASE("euler relation and ridge sharing on simplicial 3-polytopes") {
    for (uint64_t seed : {11, 12, 13, 14, 15}) {
        auto K = make_random_sphere_v(10, 3, seed);
        auto fc = facet_complex_of_vpolytope(K);
        std::set<int> used;
        for (const auto& f : fc.facets) used.insert(f.vertices.begin(), f.vertices.end());
        REQUIRE(fc.facet_count() - fc.ridge_count() + int(used.size()) == 2);
        for (int f = 0; f < fc.facet_count(); ++f)
            for (int g : fc.neighbors[f]) {
                const auto& nb = fc.neighbors[g];
                REQUIRE(std::find(nb.begin(), nb.end(), f) != nb.end());
            }
    }
}

TEST_CASE("homogeneity: volumes scale as t^k, angles invariant") {
    auto K = make_random_sphere_v(8, 3, 77);
    auto fc1 = facet_complex_of_vpolytope(K);
    const double t = 2.5;
    VPolytope Kt = K;
    for (auto& p : Kt.points) p = scaled(p, t);
    auto fc2 = facet_complex_of_vpolytope(Kt);
    REQUIRE(fc2.facet_count() == fc1.facet_count());
    REQUIRE(surface_area(fc2) == Approx(t * t * surface_area(fc1)));
    REQUIRE(codim2_perimeter(fc2) == Approx(t * codim2_perimeter(fc1)));
    REQUIRE(volume(fc2) == Approx(t * t * t * volume(fc1)));
    for (int i = 0; i < fc1.ridge_count(); ++i)
        REQUIRE(fc2.ridges[i].theta == Approx(fc1.ridges[i].theta));
}

TEST_CASE("vertices of H-polytopes") {
    SECTION("cube") {
        auto vs = vertices_of_hpolytope(make_cube_h(3));
        REQUIRE(vs.verts.points.size() == 8);
        for (const auto& v : vs.verts.points)
            for (double c : v) REQUIRE(std::fabs(std::fabs(c) - 1.0) < 1e-9);
        REQUIRE(is_simple(vs, 3));
    }
    SECTION("standard simplex in R^2") {
        HPolytope P;
        P.dim = 2;
        P.A = Mat(3, 2);
        P.A(0, 0) = -1.0;
        P.A(1, 1) = -1.0;
        P.A(2, 0) = 1.0;
        P.A(2, 1) = 1.0;
        P.b = {0.0, 0.0, 1.0};
        auto vs = vertices_of_hpolytope(P);
        REQUIRE(vs.verts.points.size() == 3);
    }
    SECTION("unbounded input is rejected") {
        HPolytope P;
        P.dim = 2;
        P.A = Mat(2, 2);
        P.A(0, 0) = 1.0;
        P.A(1, 1) = 1.0;
        P.b = {1.0, 1.0};
        REQUIRE_THROWS_AS(vertices_of_hpolytope(P), InvalidInput);
    }
}

TEST_CASE("polar duality roundtrips") {
    SECTION("cube <-> cross-polytope") {
        auto cube = make_cube_v(3);
        auto H = polar(cube);
        auto back = polar(H);
        REQUIRE(back.points.size() == cube.points.size());
        for (size_t i = 0; i < cube.points.size(); ++i)
            REQUIRE(norm_inf(sub(back.points[i], cube.points[i])) < 1e-9);
    }
    SECTION("octahedron -> cube") {
        auto oct = make_cross_v(3);
        auto H = polar(oct);
        auto vs = vertices_of_hpolytope(H);
        REQUIRE(vs.verts.points.size() == 8);
        for (const auto& v : vs.verts.points)
            for (double c : v) REQUIRE(std::fabs(std::fabs(c) - 1.0) < 1e-9);
    }
    SECTION("random polytope roundtrip via double polar") {
        auto K = make_random_sphere_v(9, 3, 5);
        auto H = polar(K);
        auto K2 = polar(H);
        for (size_t i = 0; i < K.points.size(); ++i)
            REQUIRE(norm_inf(sub(K2.points[i], K.points[i])) < 1e-9);
    }
    SECTION("simplex with centroid at origin") {
        auto S = make_simplex_v(3, 1.0);
        auto H = polar(S);
        auto back = polar(H);
        for (size_t i = 0; i < S.points.size(); ++i)
            REQUIRE(norm_inf(sub(back.points[i], S.points[i])) < 1e-9);
    }
    SECTION("origin not interior is rejected") {
        VPolytope K;
        K.dim = 2;
        K.points = {{1, 0}, {2, 0}, {1, 1}, {2, 1}};
        REQUIRE_THROWS_AS(polar(K), InvalidInput);
    }
}

TEST_CASE("dihedral angle hand values and error paths") {
    Vec ex = {1, 0, 0}, ey = {0, 1, 0};
    REQUIRE(dihedral_angle(ex, ey) == Approx(M_PI / 2));
    Vec mex = {-1, 0, 0};
    REQUIRE_THROWS_AS(dihedral_angle(ex, ex), DegeneracyError);
    REQUIRE_THROWS_AS(dihedral_angle(ex, mex), DegeneracyError);
    REQUIRE_THROWS_AS(dihedral_angle({2, 0, 0}, ey), InvalidInput);
}

TEST_CASE("inradius via Chebyshev LP") {
    SECTION("cube") {
        auto inr = inradius(make_cube_h(3));
        REQUIRE(inr.r == Approx(1.0));
        REQUIRE(norm_inf(inr.center) < 1e-8);
    }
    SECTION("unit square [0,1]^2") {
        HPolytope P;
        P.dim = 2;
        P.A = Mat(4, 2);
        P.A(0, 0) = 1.0;
        P.A(1, 0) = -1.0;
        P.A(2, 1) = 1.0;
        P.A(3, 1) = -1.0;
        P.b = {1.0, 0.0, 1.0, 0.0};
        auto inr = inradius(P);
        REQUIRE(inr.r == Approx(0.5));
        REQUIRE(inr.center[0] == Approx(0.5));
        REQUIRE(inr.center[1] == Approx(0.5));
    }
    SECTION("regular simplex satisfies the s/(t+1) lower bound") {
        auto S = make_simplex_v(3, 1.0);
        auto fc = facet_complex_of_vpolytope(S);
        double s = 0;
        for (const auto& f : fc.facets)
            for (int v = 0; v < 4; ++v)
                if (std::find(f.vertices.begin(), f.vertices.end(), v) == f.vertices.end())
                    s = std::fabs(dot(f.normal, S.points[v]) - f.offset);
        HPolytope P;
        P.dim = 3;
        P.A = Mat(fc.facet_count(), 3);
        P.b.resize(fc.facet_count());
        for (int i = 0; i < fc.facet_count(); ++i) {
            for (int j = 0; j < 3; ++j) P.A(i, j) = fc.facets[i].normal[j];
            P.b[i] = fc.facets[i].offset;
        }
        auto inr = inradius(P);
        REQUIRE(inr.r >= s / 4.0 - 1e-12);  // t = 3
    }
}

TEST_CASE("containment checks") {
    auto K = make_random_sphere_v(10, 3, 3);
    SECTION("K inside 1.01 K") {
        VPolytope big = K;
        for (auto& p : big.points) p = scaled(p, 1.01);
        auto res = containment_check(K, big);
        REQUIRE(res.contained);
    }
    SECTION("cube corner escapes the inscribed-ball H-approximation") {
        auto cube = make_cube_v(3);
        HPolytope ball;
        ball.dim = 3;
        ball.A = Mat(8, 3);
        ball.b.assign(8, 1.0);
        int row = 0;
        for (const auto& c : cube.points) {
            Vec u = scaled(c, 1.0 / norm2(c));
            for (int j = 0; j < 3; ++j) ball.A(row, j) = u[j];
            ++row;
        }
        auto res = containment_check(cube, ball);
        REQUIRE_FALSE(res.contained);
        REQUIRE(res.margin == Approx(std::sqrt(3.0) - 1.0).margin(1e-9));
    }
    SECTION("perturbation containment (1+2a/r)^{-1} K0 inside K") {
        SplitRng rng(2024);
        auto K0 = make_cross_v(3);
        auto fc0 = facet_complex_of_vpolytope(K0);
        const double r = origin_ball_radius(fc0);
        REQUIRE(r == Approx(1.0 / std::sqrt(3.0)));
        for (int trial = 0; trial < 20; ++trial) {
            auto stream = rng.stream(trial);
            const double alpha = 0.05 + 0.1 * stream.next_unit();
            VPolytope K1 = K0;
            for (auto& p : K1.points) {
                Vec g = stream.unit_vector(3);
                const double len = alpha * stream.next_unit();
                for (int j = 0; j < 3; ++j) p[j] += g[j] * len;
            }
            VPolytope shrunk = K0;
            const double f = 1.0 / (1.0 + 2.0 * alpha / r);
            for (auto& p : shrunk.points) p = scaled(p, f);
            auto res = containment_check(shrunk, K1);
            REQUIRE(res.contained);
        }
    }
}

TEST_CASE("integer data") {
    SECTION("cube") {
        std::vector<std::vector<long long>> A;
        std::vector<long long> b;
        integral_hpolytope(make_cube_h(3), A, b);
        auto id = integer_data(A, b);
        // witness minor of value 2: rows (1,0,0|1), (-1,0,0|1), (0,1,0|1),
        // columns {x, y, b}; minors of A alone stay in {0,+-1}
        REQUIRE(id.delta == 2);
        REQUIRE(id.norm_a == 1);
        REQUIRE(id.norm_b == 1);
        REQUIRE(id.delta_dm1 == 1);
    }
    SECTION("diagonal 2x2 with mixed minors") {
        auto id = integer_data({{2, 0}, {0, 3}}, {1, 1});
        REQUIRE(id.delta == 6);
        REQUIRE(id.norm_a == 3);
        REQUIRE(id.delta_dm1 == 3);
    }
    SECTION("scaling b by k scales delta by at most k") {
        SplitRng rng(8);
        for (int trial = 0; trial < 20; ++trial) {
            auto stream = rng.stream(trial);
            std::vector<std::vector<long long>> A(4, std::vector<long long>(2));
            std::vector<long long> b(4), bk(4);
            const long long k = 1 + stream.next_below(4);
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 2; ++j) A[i][j] = stream.next_below(7) - 3;
                b[i] = stream.next_below(5) + 1;
                bk[i] = k * b[i];
            }
            auto d1 = integer_data(A, b);
            auto d2 = integer_data(A, bk);
            REQUIRE(d2.delta <= k * d1.delta);
        }
    }
    SECTION("non-integral input rejected") {
        HPolytope P = make_cube_h(2);
        P.b[0] = 0.5;
        std::vector<std::vector<long long>> A;
        std::vector<long long> b;
        REQUIRE_THROWS_AS(integral_hpolytope(P, A, b), InvalidInput);
    }
}

TEST_CASE("H-polytope facet complex matches the V-path on the octahedron") {
    auto oct = make_cross_v(3);
    auto fcV = facet_complex_of_vpolytope(oct);
    HPolytope P;
    P.dim = 3;
    P.A = Mat(8, 3);
    P.b.assign(8, 1.0);
    for (int mask = 0; mask < 8; ++mask)
        for (int j = 0; j < 3; ++j) P.A(mask, j) = (mask >> j) & 1 ? 1.0 : -1.0;
    auto res = facet_complex_of_hpolytope(P);
    REQUIRE(res.fc.facet_count() == 8);
    REQUIRE(res.fc.ridge_count() == 12);
    REQUIRE(res.redundant.empty());
    REQUIRE(surface_area(res.fc) == Approx(surface_area(fcV)));
    REQUIRE(codim2_perimeter(res.fc) == Approx(codim2_perimeter(fcV)));
}

TEST_CASE("surface area matches the Steiner expansion by Monte Carlo") {
    // cube [-1/2,1/2]^3: vol(K + eps B) = 1 + 6 eps + 3 pi eps^2 + (4 pi/3) eps^3
    auto K = make_cube_v(3);
    for (auto& p : K.points) p = scaled(p, 0.5);
    EnumOptions opt;
    opt.allow_merged = true;
    auto fc = facet_complex_of_vpolytope(K, opt);
    const double eps = 0.1;
    double chi_sum = 0;
    for (const auto& r : fc.ridges) chi_sum += r.volume * r.theta;
    const double steiner = volume(fc) + surface_area(fc) * eps + (chi_sum / 2.0) * eps * eps +
                           (4.0 * M_PI / 3.0) * eps * eps * eps;

    SplitRng rng(99);
    const int n = 400000;
    const double half = 0.5 + eps;
    const double box = std::pow(2 * half, 3);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        Vec x(3);
        for (int j = 0; j < 3; ++j) x[j] = (2.0 * rng.next_unit() - 1.0) * half;
        double d2 = 0;
        for (int j = 0; j < 3; ++j) {
            const double excess = std::max(std::fabs(x[j]) - 0.5, 0.0);
            d2 += excess * excess;
        }
        if (d2 <= eps * eps) ++hits;
    }
    const double p = double(hits) / n;
    const double est = box * p;
    const double se = box * std::sqrt(p * (1 - p) / n);
    REQUIRE(std::fabs(est - steiner) <= 3 * se);
}

TEST_CASE("recentering moves the Chebyshev center to the origin") {
    HPolytope P = make_cube_h(3);
    for (int i = 0; i < P.A.rows; ++i) {
        double s = 0;
        for (int j = 0; j < 3; ++j) s += P.A(i, j) * 0.3;
        P.b[i] += s;  // shifted cube
    }
    auto rec = recenter_chebyshev(P);
    auto inr = inradius(rec.P);
    REQUIRE(norm_inf(inr.center) < 1e-8);
    REQUIRE(inr.r == Approx(1.0));
}

TEST_CASE("projection to hull (min-norm point)") {
    auto cube = make_cube_v(3);
    SECTION("interior point has distance zero") {
        REQUIRE(distance_to_hull(cube.points, {0.2, -0.3, 0.9}) <= 1e-6);
    }
    SECTION("face projection") {
        auto pr = project_to_hull(cube.points, {2.0, 0.0, 0.0});
        REQUIRE(pr.dist == Approx(1.0).margin(1e-9));
        REQUIRE(pr.point[0] == Approx(1.0).margin(1e-9));
    }
    SECTION("corner projection") {
        auto pr = project_to_hull(cube.points, {2.0, 2.0, 2.0});
        REQUIRE(pr.dist == Approx(std::sqrt(3.0)).margin(1e-9));
    }
    SECTION("edge projection") {
        auto pr = project_to_hull(cube.points, {2.0, 2.0, 0.0});
        REQUIRE(pr.dist == Approx(std::sqrt(2.0)).margin(1e-9));
        REQUIRE(pr.point[2] == Approx(0.0).margin(1e-9));
    }
    SECTION("consistent with facet membership test") {
        SplitRng rng(31);
        auto K = make_random_sphere_v(12, 3, 17);
        auto fc = facet_complex_of_vpolytope(K);
        for (int t = 0; t < 50; ++t) {
            Vec x = rng.gaussian_vector(3);
            const double dist = distance_to_hull(K.points, x);
            double worst = -1e300;
            for (const auto& f : fc.facets)
                worst = std::max(worst, dot(f.normal, x) - f.offset);
            if (worst <= 0)
                REQUIRE(dist <= 1e-6);
            else
                REQUIRE(dist >= worst - 1e-6);  // supporting hyperplane lower bound
        }
    }
}

TEST_CASE("polytope file io") {
    auto K = make_cross_v(3);
    write_polytope("/tmp/polyspec_test_oct.json", K);
    auto loaded = read_polytope("/tmp/polyspec_test_oct.json");
    REQUIRE(std::holds_alternative<VPolytope>(loaded));
    REQUIRE(std::get<VPolytope>(loaded).points.size() == 6);

    HPolytope P = make_cube_h(3);
    write_polytope("/tmp/polyspec_test_cube.json", P);
    auto loaded2 = read_polytope("/tmp/polyspec_test_cube.json");
    REQUIRE(std::holds_alternative<HPolytope>(loaded2));

    SECTION("parse errors name the missing or unknown field") {
        std::ofstream f("/tmp/polyspec_bad.json");
        f << "{\"kind\": \"V\", \"dim\": 2}";
        f.close();
        REQUIRE_THROWS_WITH(read_polytope("/tmp/polyspec_bad.json"),
                            Catch::Matchers::ContainsSubstring("points"));
        std::ofstream g("/tmp/polyspec_bad2.json");
        g << "{\"kind\": \"V\", \"dim\": 2, \"points\": [[0,0],[1,0],[0,1]], \"junk\": 1}";
        g.close();
        REQUIRE_THROWS_WITH(read_polytope("/tmp/polyspec_bad2.json"),
                            Catch::Matchers::ContainsSubstring("junk"));
    }
}
