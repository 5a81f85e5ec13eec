// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exits nonzero if any criterion fails.
// Usage: acceptance [path-to-cli]  (the CLI path enables the determinism
// criterion; it is reported as a failure when absent).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corpus_util.hpp"
#include "polyspec/bounds.hpp"
#include "polyspec/chain.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/io.hpp"
#include "polyspec/linalg.hpp"
#include "polyspec/smoothed.hpp"
#include "polyspec/spectral.hpp"

using namespace polyspec;

namespace {

std::string g_cli_path;

struct Outcome {
    bool pass = false;
    std::string detail;
};

FacetComplex merged_complex(const VPolytope& K) {
    EnumOptions opt;
    opt.allow_merged = true;
    return facet_complex_of_vpolytope(K, opt);
}

FacetComplex auto_complex(const VPolytope& K) {
    try {
        return facet_complex_of_vpolytope(K);
    } catch (const DegeneracyError&) {
        return merged_complex(K);
    }
}

// the shared acceptance corpus: canonical solids plus 100 seeded random
// simplicial polytopes with m <= 20, d <= 5
std::vector<FacetComplex> canonical_corpus() {
    std::vector<FacetComplex> out;
    out.push_back(merged_complex(make_cube_v(3)));
    out.push_back(auto_complex(make_cross_v(3)));
    out.push_back(auto_complex(make_simplex_v(3, 1.0)));
    out.push_back(auto_complex(make_cross_v(4)));
    out.push_back(auto_complex(make_simplex_v(4, 1.0)));
    return out;
}

std::vector<FacetComplex>& simplicial_corpus_complexes() {
    static std::vector<FacetComplex> cached;
    if (cached.empty()) {
        for (const auto& spec : corpus::simplicial_corpus(100, 4000))
            cached.push_back(auto_complex(make_random_sphere_v(spec.m, spec.d, spec.seed)));
    }
    return cached;
}

// ---------------------------------------------------------------------------

Outcome criterion1_gap_certification() {
    Outcome out;
    int passes = 0, total = 0;
    for (const auto& fc : canonical_corpus()) {
        ++total;
        if (certify_gap(fc).pass) ++passes;
    }
    for (const auto& fc : simplicial_corpus_complexes()) {
        ++total;
        if (certify_gap(fc).pass) ++passes;
    }
    auto cube_cert = certify_gap(merged_complex(make_cube_v(3)));
    const Vec expected = {-0.5, -0.5, 0, 0, 0, 1};
    bool cube_ok = cube_cert.scaled_spectrum.size() == 6;
    for (int i = 0; i < 6 && cube_ok; ++i)
        cube_ok = std::fabs(cube_cert.scaled_spectrum[i] - expected[i]) <= 1e-8;
    out.pass = passes == total && cube_ok;
    out.detail = std::to_string(passes) + "/" + std::to_string(total) +
                 " certificates pass; cube spectrum {1,0,0,0,-1/2,-1/2} " +
                 (cube_ok ? "exact to 1e-8" : "MISMATCH");
    return out;
}

Outcome criterion2_scaled_hessian() {
    Outcome out;
    int passes = 0, total = 0;
    auto check = [&](const HPolytope& P, int d) {
        ++total;
        auto r = scaled_hessian_top_eigenvalue(P);
        if (r.checked && r.simple && std::fabs(r.top_eigenvalue - double(d - 1)) <= 1e-6)
            ++passes;
    };
    check(make_cube_h(3), 3);
    check(make_cube_h(2), 2);
    for (int i = 0; i < 50; ++i) {
        const int d = i % 4 == 3 ? 4 : 3;
        const int m = d + 4 + i % 5;
        auto K = make_random_sphere_v(m, d, 5000 + i);
        check(polar(K), d);
    }
    out.pass = passes == total;
    out.detail = std::to_string(passes) + "/" + std::to_string(total) +
                 " instances hit d-1 within 1e-6 (cube 2, square 1, 50 random simple)";
    return out;
}

Outcome criterion3_chain_structure() {
    Outcome out;
    int passes = 0, total = 0;
    auto check = [&](const FacetComplex& fc) {
        ++total;
        auto c = build_chain(fc);
        Vec piQ = vec_mat(c.pi_bar, c.Q);
        const bool stationary = norm_inf(piQ) <= 1e-9 * c.Q.max_abs();
        const bool gap_ok = chain_spectral_gap(fc).pass;
        if (stationary && gap_ok) ++passes;
    };
    for (const auto& fc : canonical_corpus()) check(fc);
    for (const auto& fc : simplicial_corpus_complexes()) check(fc);

    auto gap = chain_spectral_gap(merged_complex(make_cube_v(3)));
    const Vec expected = {0, 1, 1, 1, 1.5, 1.5};
    bool cube_ok = true;
    for (int i = 0; i < 6; ++i)
        cube_ok = cube_ok && std::fabs(gap.eigenvalues[i] - expected[i]) <= 1e-8;
    out.pass = passes == total && cube_ok;
    out.detail = std::to_string(passes) + "/" + std::to_string(total) +
                 " instances: stationarity and gap >= 1 - 1e-8; cube {1,1,1,1.5,1.5} " +
                 (cube_ok ? "exact to 1e-8" : "MISMATCH");
    return out;
}

Outcome criterion4_bound_soundness() {
    Outcome out;
    int violations = 0, total = 0;
    auto check = [&](const HPolytope& P) {
        ++total;
        auto rep = diameter_report(P);
        const bool ok = rep.chebyshev_certified >= rep.exact_diameter &&
                        rep.chebyshev_apriori >= rep.exact_diameter &&
                        rep.min_angle_bound >= rep.exact_diameter &&
                        (!rep.integral || rep.headline_bound >= rep.exact_diameter);
        if (!ok) ++violations;
    };
    // cube: exact vertex diameter 3, facet diameters cube 2 / octahedron 3
    bool cube_ok = vertex_diameter(make_cube_h(3)) == 3 &&
                   graph_diameter(merged_complex(make_cube_v(3))) == 2 &&
                   graph_diameter(auto_complex(make_cross_v(3))) == 3;
    check(make_cube_h(3));
    for (int i = 0; i < 100; ++i) {
        const int d = 2 + i % 3;  // d <= 4
        check(corpus::random_integral_hpolytope(d, 5, 7000 + i));
    }
    out.pass = violations == 0 && cube_ok;
    out.detail = std::to_string(total) + " instances, " + std::to_string(violations) +
                 " soundness violations; cube diameters (3, 2, 3) " +
                 (cube_ok ? "confirmed" : "MISMATCH");
    return out;
}

Outcome criterion5_envelopes() {
    Outcome out;
    int holds = 0, total = 0;
    for (int i = 0; i < 100; ++i) {
        const int d = 2 + i % 3;
        auto P = corpus::random_integral_hpolytope(d, 5, 7000 + i);
        auto rep = diameter_report(P);
        ++total;
        if (rep.envelope && rep.envelope->holds) ++holds;
    }
    auto cube_rep = diameter_report(make_cube_h(3));
    const auto& env = *cube_rep.envelope;
    const bool hand = std::fabs(env.actual_min_ridge - std::sqrt(2.0)) <= 1e-12 &&
                      std::fabs(env.min_ridge_lower - 1.0 / 6.0) <= 1e-15 &&
                      std::fabs(env.actual_max_csc - 3.0 / std::sqrt(8.0)) <= 1e-12 &&
                      env.actual_max_csc <= 6.0 && env.holds;
    out.pass = holds == total && hand;
    out.detail = std::to_string(holds) + "/" + std::to_string(total) +
                 " envelopes hold; cube-polar hand values (sqrt2 >= 1/6, 3/sqrt8 <= 6) " +
                 (hand ? "reproduced" : "MISMATCH");
    return out;
}

Outcome criterion6_steiner() {
    Outcome out;
    auto K = make_cube_v(3);
    for (auto& p : K.points) p = scaled(p, 0.5);  // unit cube
    auto fc = merged_complex(K);
    auto rep = steiner_validate(fc, {0.1}, 10000000, 600);
    // 1 + 6(0.1) + 3pi(0.01) + (4pi/3)(0.001), eps^2 coefficient pinned at 3pi
    const double expected = 1.0 + 0.6 + 3.0 * M_PI * 0.01 + (4.0 * M_PI / 3.0) * 0.001;
    const bool coeff_ok = std::fabs(rep.chi2_pair_half - 3.0 * M_PI) <= 1e-9;
    const bool exact_ok = std::fabs(rep.rows[0].exact - expected) <= 1e-6;
    const bool mc_ok = rep.rows[0].agree;
    out.pass = coeff_ok && exact_ok && mc_ok;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "vol(K+0.1B) = %.7f (formula value %.7f), eps^2 coeff = 3pi %s, "
                  "MC %.7f +- %.1e within 3se: %s",
                  rep.rows[0].exact, expected, coeff_ok ? "ok" : "MISMATCH", rep.rows[0].mc,
                  rep.rows[0].mc_se, mc_ok ? "yes" : "NO");
    out.detail = buf;
    return out;
}

Outcome criterion7_log_concavity() {
    Outcome out;
    int passes = 0, total = 0;
    auto check = [&](const FacetComplex& fc) {
        if (fc.dim != 3) return;
        ++total;
        auto W = quermassintegrals_3d(fc);
        if (af_logconcavity_check({W[0], W[1], W[2], W[3]}).pass) ++passes;
    };
    for (const auto& fc : canonical_corpus()) check(fc);
    for (const auto& fc : simplicial_corpus_complexes()) check(fc);
    out.pass = passes == total && total >= 50;
    out.detail = std::to_string(passes) + "/" + std::to_string(total) +
                 " d=3 instances satisfy W_j^2 >= W_{j-1} W_{j+1} (1e-6 relative)";
    return out;
}

Outcome criterion8_semigroup() {
    Outcome out;
    auto fc = merged_complex(make_cube_v(3));
    auto c = build_chain(fc);
    const int trials = 100000;
    bool hist_ok = true;
    for (double T : {0.1, 1.0, 10.0}) {
        Vec p0(6, 0.0);
        p0[0] = 1.0;
        Vec exact = uniformized_exp(c.Q, p0, T);
        std::vector<int> counts(6, 0);
        SplitRng rng(800 + int(T * 10));
        for (int t = 0; t < trials; ++t) {
            auto s = rng.stream(t);
            ++counts[simulate(c, 0, T, s).facets.back()];
        }
        for (int i = 0; i < 6; ++i) {
            const double freq = double(counts[i]) / trials;
            const double se = std::sqrt(std::max(exact[i] * (1 - exact[i]), 1e-12) / trials);
            if (std::fabs(freq - exact[i]) > 4.0 * se) hist_ok = false;
        }
    }
    // jump count from stationarity: T * J_avg with J_avg = 1 on the cube
    const double T = 5.0;
    SplitRng rng(801);
    double sum = 0, sum2 = 0;
    for (int t = 0; t < trials; ++t) {
        auto s = rng.stream(t);
        const double j = simulate(c, s.next_below(6), T, s).jump_count();
        sum += j;
        sum2 += j * j;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
    const bool jumps_ok = std::fabs(mean - T * c.j_avg) <= 4.0 * se;
    out.pass = hist_ok && jumps_ok;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "histograms within 4se at T in {0.1,1,10}: %s; E[jumps]/T = %.4f vs J_avg "
                  "= %.4f within 4se: %s",
                  hist_ok ? "yes" : "NO", mean / T, c.j_avg, jumps_ok ? "yes" : "NO");
    out.detail = buf;
    return out;
}

Outcome criterion9_mixing() {
    Outcome out;
    int passes = 0, total = 0;
    auto check = [&](const FacetComplex& fc) {
        auto c = build_chain(fc);
        if (c.N > 200) return;
        ++total;
        int worst = 0;
        for (int i = 1; i < c.N; ++i)
            if (c.pi_bar[i] < c.pi_bar[worst]) worst = i;
        Vec p(c.N, 0.0);
        p[worst] = 1.0;
        if (mixing_check(c, p, 1e-3).pass) ++passes;
    };
    for (const auto& fc : canonical_corpus()) check(fc);
    for (const auto& fc : simplicial_corpus_complexes()) check(fc);
    out.pass = passes == total;
    out.detail = std::to_string(passes) + "/" + std::to_string(total) +
                 " point-mass starts reach TV <= 1e-3 at t = 2 log(M/tau)";
    return out;
}

Outcome criterion10_giant_component() {
    Outcome out;
    int violations = 0;
    const int trials = 2000;
    double worst_mass = 1.0;
    for (int i = 0; i < 10; ++i) {
        auto base = make_random_sphere_v(30, 3, 9100 + i).points;
        auto inst = sample_instance(base, 0.1, 9200 + i);
        auto fc = auto_complex({3, inst.points});
        auto res = giant_component(fc, 0.25, trials, 9300 + i);
        const bool mass_ok = res.pi_mass >= 0.75 - 3.0 * res.mass_se;
        const bool diam_ok =
            double(res.bfs_diameter) <= res.certified_bound && res.cutoff_sound;
        worst_mass = std::min(worst_mass, res.pi_mass);
        if (!(mass_ok && diam_ok)) ++violations;
    }
    out.pass = violations == 0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "10 instances (m=30,d=3,sigma=0.1,phi=0.25): %d violations, worst pi(G) = "
                  "%.4f vs floor %.4f",
                  violations, worst_mass, 0.75 - 3.0 * std::sqrt(0.25 * 0.75 / trials));
    out.detail = buf;
    return out;
}

Outcome criterion11_quadrature() {
    Outcome out;
    auto fc = merged_complex(make_cube_v(3));
    auto rep = quadrature_perimeter_estimate(fc, make_cube_v(3).points, 0.25, 100000, 1100);
    const bool per_ok = std::fabs(rep.estimate - 24.0) <= 3.0 * rep.se;
    auto cd = intersection_constant_estimate(3, 200000, 1101);
    const double target = std::sqrt(3.0) / 2.0;
    const bool cd_ok = std::fabs(cd.c_d - target) <= 0.02 * target;
    out.pass = per_ok && cd_ok;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "perimeter %.4f +- %.4f vs 24 within 3se: %s; C_3 = %.4f vs %.4f within "
                  "2%%: %s",
                  rep.estimate, rep.se, per_ok ? "yes" : "NO", cd.c_d, target,
                  cd_ok ? "yes" : "NO");
    out.detail = buf;
    return out;
}

Outcome criterion12_shadow_trend() {
    Outcome out;
    auto base = make_random_sphere_v(30, 3, 1200).points;
    std::vector<double> means, ses;
    int max_count = 0;
    const int planes = 4000;
    for (double sigma : {0.05, 0.1, 0.2, 0.5}) {
        auto inst = sample_instance(base, sigma, 1201);
        auto fc = auto_complex({3, inst.points});
        const double eta = 6.0 * sigma * std::sqrt(3.0 * std::log(30.0));
        auto rep = shadow_vertex_experiment(fc, base, eta, planes, 1202);
        means.push_back(rep.mean);
        ses.push_back(rep.se);
        max_count = std::max(max_count, rep.max_count);
    }
    bool finite_ok = true;
    for (double m : means) finite_ok = finite_ok && std::isfinite(m) && m > 0;
    const bool cap_ok = max_count <= 30;
    bool trend_ok = true;
    for (size_t i = 0; i + 1 < means.size(); ++i) {
        const double noise = 2.0 * std::sqrt(ses[i] * ses[i] + ses[i + 1] * ses[i + 1]);
        if (means[i + 1] > means[i] + noise) trend_ok = false;
    }
    out.pass = finite_ok && cap_ok && trend_ok;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "means {%.2f, %.2f, %.2f, %.2f}, max count %d <= 30: %s, non-increasing "
                  "within 2se: %s",
                  means[0], means[1], means[2], means[3], max_count, cap_ok ? "yes" : "NO",
                  trend_ok ? "yes" : "NO");
    out.detail = buf;
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome criterion13_determinism() {
    Outcome out;
    if (g_cli_path.empty()) {
        out.pass = false;
        out.detail = "CLI path not provided";
        return out;
    }
    struct Case {
        std::string name;
        std::string args;
    };
    const std::vector<Case> cases = {
        {"analyze", "analyze --generator cross --d 3"},
        {"bound", "bound --generator cube-h --d 3"},
        {"chain", "chain --generator cube --d 3 --phi 0.5 --trials 300 --seed 21 --out OUT"},
        {"smoothed",
         "smoothed --m 10 --d 3 --sigma 0.1 --trials 150 --planes 100 --instances 2 --seed 22 "
         "--out OUT"},
        {"quadrature",
         "quadrature --generator cube --d 3 --planes 5000 --cd-samples 20000 --seed 23"},
        {"steiner", "steiner --generator simplex --d 3 --points 100000 --seed 24"},
    };
    int identical = 0;
    std::string failed;
    for (const auto& c : cases) {
        std::string o1, o2, f1, f2;
        for (int rep = 0; rep < 2; ++rep) {
            std::string args = c.args;
            const std::string outfile =
                "/tmp/acc13_" + c.name + "_" + std::to_string(rep) + ".csv";
            auto pos = args.find("OUT");
            if (pos != std::string::npos) args.replace(pos, 3, outfile);
            const std::string stdout_file =
                "/tmp/acc13_" + c.name + "_" + std::to_string(rep) + ".stdout";
            const std::string cmd =
                g_cli_path + " " + args + " > " + stdout_file + " 2> /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                failed = c.name + " (nonzero exit)";
                break;
            }
            (rep == 0 ? o1 : o2) = slurp(stdout_file);
            if (pos != std::string::npos) (rep == 0 ? f1 : f2) = slurp(outfile);
        }
        if (!failed.empty()) break;
        if (o1 == o2 && f1 == f2 && !(o1.empty() && f1.empty()))
            ++identical;
        else
            failed = c.name + " (outputs differ)";
    }
    out.pass = identical == int(cases.size());
    out.detail = std::to_string(identical) + "/" + std::to_string(cases.size()) +
                 " subcommands byte-identical across reruns" +
                 (failed.empty() ? "" : "; first failure: " + failed);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    struct Entry {
        int id;
        std::string name;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> entries = {
        {1, "one-positive-eigenvalue certification", criterion1_gap_certification},
        {2, "slack-scaled Hessian top eigenvalue d-1", criterion2_scaled_hessian},
        {3, "chain stationarity and spectral gap", criterion3_chain_structure},
        {4, "diameter-bound soundness", criterion4_bound_soundness},
        {5, "worst-case envelopes", criterion5_envelopes},
        {6, "Steiner pinning on the unit cube", criterion6_steiner},
        {7, "quermassintegral log-concavity", criterion7_log_concavity},
        {8, "semigroup consistency (simulation vs uniformization)", criterion8_semigroup},
        {9, "warm-start mixing", criterion9_mixing},
        {10, "giant-component soundness", criterion10_giant_component},
        {11, "quadrature consistency", criterion11_quadrature},
        {12, "shadow-vertex trend", criterion12_shadow_trend},
        {13, "CLI determinism", criterion13_determinism},
    };

    int failures = 0;
    for (const auto& e : entries) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d. %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", e.id,
                    e.name.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
