// Command-line harness: analyze, bound, chain, smoothed, quadrature, steiner.
// Primary results go to stdout (or --out) and are byte-deterministic for a
// fixed config and seed; the run manifest (config echo, version, wall time,
// assertion tallies) goes to stderr.
//
// Exit codes: 0 success, 1 usage error, 2 soundness-assertion failure,
// 3 numerical failure.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyspec/bounds.hpp"
#include "polyspec/chain.hpp"
#include "polyspec/config.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/io.hpp"
#include "polyspec/linalg.hpp"
#include "polyspec/smoothed.hpp"
#include "polyspec/spectral.hpp"

using nlohmann::json;
using namespace polyspec;

namespace {

struct Manifest {
    json config;
    std::vector<std::pair<std::string, bool>> assertions;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void check(const std::string& name, bool pass) { assertions.push_back({name, pass}); }

    bool all_pass() const {
        for (const auto& [n, p] : assertions)
            if (!p) return false;
        return true;
    }

    void print() const {
        json m;
        m["version"] = kVersion;
        m["config"] = config;
        m["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json as = json::array();
        for (const auto& [n, p] : assertions) as.push_back({{"name", n}, {"pass", p}});
        m["assertions"] = as;
        std::cerr << m.dump(2) << "\n";
    }
};

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InvalidInput(out_path + ": cannot open for writing");
    f << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// polytope source: --polytope FILE or --generator NAME with --d/--m/--gen-seed
struct PolySource {
    std::string file;
    std::string generator;
    int d = 3;
    int m = 12;
    double edge = 1.0;
    uint64_t gen_seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--polytope", file, "polytope file (JSON-shaped)");
        cmd->add_option("--generator", generator,
                        "named generator: cube | cube-h | cross | simplex | sphere");
        cmd->add_option("--d", d, "generator dimension");
        cmd->add_option("--m", m, "generator point count (sphere)");
        cmd->add_option("--edge", edge, "simplex edge length");
        cmd->add_option("--gen-seed", gen_seed, "generator seed (sphere)");
    }

    PolytopeFile load() const {
        if (!file.empty()) return read_polytope(file);
        if (generator == "cube") return make_cube_v(d);
        if (generator == "cube-h") return make_cube_h(d);
        if (generator == "cross") return make_cross_v(d);
        if (generator == "simplex") return make_simplex_v(d, edge);
        if (generator == "sphere") return make_random_sphere_v(m, d, gen_seed);
        throw InvalidInput("no polytope source: pass --polytope or --generator "
                           "(cube, cube-h, cross, simplex, sphere)");
    }

    json echo() const {
        json j;
        j["file"] = file;
        j["generator"] = generator;
        j["d"] = d;
        j["m"] = m;
        j["gen_seed"] = gen_seed;
        return j;
    }
};

FacetComplex complex_of_source(const PolytopeFile& p) {
    if (std::holds_alternative<VPolytope>(p)) {
        const auto& K = std::get<VPolytope>(p);
        try {
            return facet_complex_of_vpolytope(K);
        } catch (const DegeneracyError&) {
            EnumOptions opt;
            opt.allow_merged = true;
            return facet_complex_of_vpolytope(K, opt);
        }
    }
    return facet_complex_of_hpolytope(std::get<HPolytope>(p)).fc;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const PolySource& src, const std::string& out, Manifest& man) {
    auto poly = src.load();
    auto fc = complex_of_source(poly);
    auto bundle = build_spectral_bundle(fc);
    auto cert = certify_gap(fc);
    auto chain = build_chain(fc);
    auto gap = chain_spectral_gap(fc);
    const double stat_resid = stationarity_residual(chain);
    const double stat_tol = tolerances().stationarity * chain.Q.max_abs() * chain.pi_total;

    man.check("gap_certificate", cert.pass);
    man.check("chain_gap_at_least_one", gap.pass);
    man.check("left_stationarity", stat_resid <= stat_tol);

    json rep;
    rep["facets"] = bundle.N;
    rep["scaled_eigenvalues"] = cert.scaled_spectrum;
    rep["certificate"] = {{"top_eigenvalue", cert.top_eigenvalue},
                          {"second_eigenvalue", cert.second_eigenvalue},
                          {"top_vector_residual", cert.top_vector_residual},
                          {"positive_scaled", cert.positive_scaled},
                          {"positive_hessian", cert.positive_H},
                          {"pass", cert.pass}};
    rep["chain"] = {{"j_avg", chain.j_avg},
                    {"pi_total", chain.pi_total},
                    {"chi2_total", chain.chi2_total},
                    {"delta_total", chain.delta_total},
                    {"spectral_gap", gap.gap},
                    {"gap_pass", gap.pass},
                    {"stationarity_residual", stat_resid},
                    {"pi_bar_min", *std::min_element(chain.pi_bar.begin(), chain.pi_bar.end())},
                    {"pi_per_surface_area", chain.pi_total / surface_area(fc)}};
    emit(rep.dump(2) + "\n", out);
    return man.all_pass() ? 0 : 2;
}

// ---------------------------------------------------------------------------

json report_to_json(const DiameterReport& rep) {
    json j;
    j["exact_diameter"] = rep.exact_diameter;
    j["chebyshev_apriori"] = rep.chebyshev_apriori;
    j["chebyshev_certified"] = rep.chebyshev_certified;
    j["min_angle_bound"] = rep.min_angle_bound;
    j["headline_bound"] = rep.headline_bound;
    j["gap_used"] = rep.gap_used;
    j["v_min_used"] = rep.v_min_used;
    j["theta_min"] = rep.theta_min;
    j["facets"] = rep.N;
    j["integral"] = rep.integral;
    j["recentered"] = rep.recentered;
    if (rep.envelope) {
        const auto& e = *rep.envelope;
        j["envelope"] = {{"min_ridge_lower", e.min_ridge_lower},
                         {"max_ridge_upper", e.max_ridge_upper},
                         {"csc_upper", e.csc_upper},
                         {"actual_min_ridge", e.actual_min_ridge},
                         {"actual_max_ridge", e.actual_max_ridge},
                         {"actual_max_csc", e.actual_max_csc},
                         {"holds", e.holds},
                         {"delta", e.data.delta},
                         {"norm_a", e.data.norm_a},
                         {"norm_b", e.data.norm_b},
                         {"delta_dm1", e.data.delta_dm1}};
    }
    return j;
}

void bound_assertions(const DiameterReport& rep, Manifest& man) {
    man.check("certified_at_least_exact", rep.chebyshev_certified >= rep.exact_diameter);
    man.check("apriori_at_least_exact", rep.chebyshev_apriori >= rep.exact_diameter);
    man.check("min_angle_at_least_exact", rep.min_angle_bound >= rep.exact_diameter);
    if (rep.integral)
        man.check("headline_at_least_exact", rep.headline_bound >= rep.exact_diameter);
    man.check("certified_within_apriori",
              rep.chebyshev_certified <= int(std::ceil(rep.chebyshev_apriori)));
    if (rep.envelope) man.check("worst_case_envelope", rep.envelope->holds);
}

int cmd_bound(const PolySource& src, const std::string& out, bool recenter, double constant,
              int corpus, int corpus_d, int corpus_entries, uint64_t seed, Manifest& man) {
    DiameterOptions opt;
    opt.recenter = recenter;
    opt.headline_C = constant;

    if (corpus > 0) {
        // corpus sweep: one CSV row per seeded instance
        std::ostringstream csv;
        csv << "seed,m,d,exact,certified,apriori,min_angle,headline,envelope_ok,theta_min,gap,"
               "facets\n";
        for (int i = 0; i < corpus; ++i) {
            SplitRng meta(seed + i);
            const int d = corpus_d > 0 ? corpus_d : 2 + meta.next_below(3);
            const int extra = meta.next_below(2 * d + 1);
            const int m = 2 * d + extra;
            HPolytope P;
            P.dim = d;
            P.A = Mat(m, d);
            P.b.assign(m, 0.0);
            for (int r = 0; r < d; ++r) {
                P.A(2 * r, r) = 1.0;
                P.b[2 * r] = double(1 + meta.next_below(corpus_entries));
                P.A(2 * r + 1, r) = -1.0;
                P.b[2 * r + 1] = double(1 + meta.next_below(corpus_entries));
            }
            for (int r = 2 * d; r < m; ++r) {
                bool nonzero = false;
                while (!nonzero)
                    for (int c = 0; c < d; ++c) {
                        const int e = meta.next_below(2 * corpus_entries + 1) - corpus_entries;
                        P.A(r, c) = double(e);
                        nonzero = nonzero || e != 0;
                    }
                P.b[r] = double(1 + meta.next_below(corpus_entries));
            }
            auto rep = diameter_report(P, opt);
            bound_assertions(rep, man);
            csv << (seed + i) << "," << m << "," << d << "," << rep.exact_diameter << ","
                << rep.chebyshev_certified << "," << fmt(rep.chebyshev_apriori) << ","
                << fmt(rep.min_angle_bound) << "," << fmt(rep.headline_bound) << ","
                << (rep.envelope && rep.envelope->holds ? 1 : 0) << "," << fmt(rep.theta_min)
                << "," << fmt(rep.gap_used) << "," << rep.N << "\n";
        }
        emit(csv.str(), out);
        return man.all_pass() ? 0 : 2;
    }

    auto poly = src.load();
    if (!std::holds_alternative<HPolytope>(poly))
        throw InvalidInput("bound: requires an H-polytope input");
    auto rep = diameter_report(std::get<HPolytope>(poly), opt);
    bound_assertions(rep, man);
    emit(report_to_json(rep).dump(2) + "\n", out);
    return man.all_pass() ? 0 : 2;
}

// ---------------------------------------------------------------------------

int cmd_chain(const PolySource& src, const std::string& out, double phi, int trials,
              uint64_t seed, double horizon_override, double cutoff_scale, Manifest& man) {
    auto poly = src.load();
    auto fc = complex_of_source(poly);
    GiantComponentOptions opt;
    opt.horizon_override = horizon_override;
    opt.cutoff_scale = cutoff_scale;
    auto res = giant_component(fc, phi, trials, seed, opt);

    man.check("cutoff_sound", res.cutoff_sound);
    man.check("diameter_within_certified", double(res.bfs_diameter) <= res.certified_bound);
    man.check("pi_mass_at_least_1_minus_phi",
              res.pi_mass >= 1.0 - phi - 3.0 * res.mass_se);

    json rep;
    rep["source_facet"] = res.source;
    rep["member_count"] = int(res.members.size());
    rep["members"] = res.members;
    rep["pi_mass"] = res.pi_mass;
    rep["chi2_mass"] = res.chi2_mass;
    rep["bfs_diameter"] = res.bfs_diameter;
    rep["cutoff"] = res.cutoff;
    rep["certified_bound"] = res.certified_bound;
    rep["horizon"] = res.horizon;
    rep["mean_jumps"] = res.mean_jumps;
    rep["mass_se"] = res.mass_se;
    std::cout << rep.dump(2) << "\n";

    if (!out.empty()) {
        std::ostringstream csv;
        csv << "trial,jumps,endpoint\n";
        for (size_t t = 0; t < res.trial_jumps.size(); ++t)
            csv << t << "," << res.trial_jumps[t] << "," << res.trial_endpoints[t] << "\n";
        emit(csv.str(), out);
    }
    return man.all_pass() ? 0 : 2;
}

// ---------------------------------------------------------------------------

int cmd_smoothed(const std::string& base_file, const std::string& base_generator, int m, int d,
                 uint64_t gen_seed, double sigma, double split_exponent, double phi, int planes,
                 int trials, int instances, uint64_t seed, const std::string& out,
                 Manifest& man) {
    if (trials <= 0) throw InvalidInput("smoothed: trials must be positive");
    std::vector<Vec> base;
    if (!base_file.empty()) {
        auto poly = read_polytope(base_file);
        if (!std::holds_alternative<VPolytope>(poly))
            throw InvalidInput("smoothed: base file must be a V-polytope");
        base = std::get<VPolytope>(poly).points;
    } else if (base_generator == "sphere") {
        base = make_random_sphere_v(m, d, gen_seed).points;
    } else if (base_generator == "cross") {
        base = make_cross_v(d).points;
    } else {
        throw InvalidInput("smoothed: pass --base FILE or --base-generator sphere|cross");
    }

    EndToEndOptions opt;
    opt.split_exponent = split_exponent;
    opt.planes = planes;
    opt.phi = phi;
    opt.trials = trials;

    std::ostringstream csv;
    csv << "seed,m,d,sigma,alpha,rBest,eventB,eventC,jAvg,piMassG,chi2MassG,diamG,"
           "certifiedCutoff,shadowMean\n";
    for (int i = 0; i < instances; ++i) {
        const uint64_t s = seed + uint64_t(i);
        auto rep = end_to_end_report(base, sigma, s, opt);
        man.check("sound_" + std::to_string(s), rep.sound);
        csv << s << "," << rep.m << "," << rep.d << "," << fmt(rep.sigma) << ","
            << fmt(rep.alpha) << "," << fmt(rep.r_best) << "," << (rep.event_b ? 1 : 0) << ","
            << (rep.event_c ? 1 : 0) << "," << fmt(rep.j_avg) << "," << fmt(rep.pi_mass) << ","
            << fmt(rep.chi2_mass) << "," << rep.diam_g << "," << fmt(rep.certified_cutoff)
            << "," << fmt(rep.shadow_mean) << "\n";
    }
    emit(csv.str(), out);
    return man.all_pass() ? 0 : 2;
}

// ---------------------------------------------------------------------------

int cmd_quadrature(const PolySource& src, const std::string& out, int planes, double eta,
                   uint64_t seed, int cd_samples, Manifest& man) {
    auto poly = src.load();
    if (!std::holds_alternative<VPolytope>(poly))
        throw InvalidInput("quadrature: requires a V-polytope input");
    const auto& K = std::get<VPolytope>(poly);
    auto fc = complex_of_source(poly);
    auto rep = quadrature_perimeter_estimate(fc, K.points, eta, planes, seed);
    man.check("perimeter_within_3se", std::fabs(rep.estimate - rep.exact) <= 3.0 * rep.se);
    man.check("all_ridges_hit", rep.ridges_without_hits == 0);

    auto cd = intersection_constant_estimate(fc.dim, cd_samples, seed + 1);

    json j;
    j["exact_perimeter"] = rep.exact;
    j["estimate"] = rep.estimate;
    j["se"] = rep.se;
    j["ratio"] = rep.ratio;
    j["planes_used"] = rep.used;
    j["planes_rejected"] = rep.rejected;
    j["effective_sample_size"] = rep.ess;
    j["ridges_without_hits"] = rep.ridges_without_hits;
    j["intersection_constant"] = {{"d", fc.dim}, {"c_d", cd.c_d}, {"se", cd.se}};
    emit(j.dump(2) + "\n", out);
    return man.all_pass() ? 0 : 2;
}

// ---------------------------------------------------------------------------

int cmd_steiner(const PolySource& src, const std::string& out, std::vector<double> eps_list,
                long points, uint64_t seed, Manifest& man) {
    auto poly = src.load();
    auto fc = complex_of_source(poly);
    if (eps_list.empty()) eps_list = {0.0, 0.05, 0.1, 0.2};
    auto rep = steiner_validate(fc, eps_list, points, seed);

    json rows = json::array();
    bool all_agree = true;
    for (const auto& row : rep.rows) {
        rows.push_back({{"eps", row.eps},
                        {"exact", row.exact},
                        {"mc", row.mc},
                        {"mc_se", row.mc_se},
                        {"agree", row.agree}});
        if (fc.dim == 3 && !row.agree) all_agree = false;
    }
    json j;
    j["volume"] = rep.volume;
    j["surface"] = rep.surface;
    j["chi2_pair_half"] = rep.chi2_pair_half;
    j["rows"] = rows;
    if (fc.dim == 3) {
        auto W = quermassintegrals_3d(fc);
        auto af = af_logconcavity_check({W[0], W[1], W[2], W[3]});
        j["quermassintegrals"] = {W[0], W[1], W[2], W[3]};
        j["log_concavity"] = {{"pass", af.pass}, {"margins", af.margins}};
        man.check("log_concavity", af.pass);
        man.check("steiner_rows_within_3se", all_agree);
    }
    emit(j.dump(2) + "\n", out);
    return man.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polytope spectral-analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // --out/--seed/--tol-* may follow the subcommand

    std::string out;
    uint64_t seed = 1;
    double tol_abs = -1, tol_rel = -1;
    app.add_option("--out", out, "write the primary output to this file");
    app.add_option("--seed", seed, "seed for stochastic subcommands");
    app.add_option("--tol-abs", tol_abs, "override the absolute tolerance");
    app.add_option("--tol-rel", tol_rel, "override the relative tolerance");

    PolySource src;

    auto* analyze = app.add_subcommand("analyze", "spectral and chain report for one polytope");
    src.attach(analyze);

    auto* bound = app.add_subcommand("bound", "diameter bounds against the exact diameter");
    src.attach(bound);
    bool recenter = false;
    double constant = 1.0;
    int corpus = 0, corpus_d = 0, corpus_entries = 5;
    bound->add_flag("--recenter", recenter, "recenter at the Chebyshev center if needed");
    bound->add_option("--constant", constant, "headline-bound constant C");
    bound->add_option("--corpus", corpus, "sweep this many random integral instances");
    bound->add_option("--corpus-d", corpus_d, "fixed dimension for the corpus (0 = mixed)");
    bound->add_option("--corpus-entries", corpus_entries, "max entry magnitude for the corpus");

    auto* chain = app.add_subcommand("chain", "giant-component extraction via the facet chain");
    src.attach(chain);
    double phi = 0.25, horizon_override = -1.0, cutoff_scale = 2.0;
    int trials = 2000;
    chain->add_option("--phi", phi, "mass threshold in (0,1)");
    chain->add_option("--trials", trials, "trajectory count");
    chain->add_option("--horizon-override", horizon_override, "override T = 2 log(2/pi_min)");
    chain->add_option("--cutoff-scale", cutoff_scale, "Markov cutoff factor (default 2)");

    auto* smoothed = app.add_subcommand("smoothed", "end-to-end smoothed unit-LP experiment");
    std::string base_file, base_generator = "sphere";
    int sm = 30, sd = 3, instances = 1;
    uint64_t gen_seed = 1;
    double sigma = 0.1, split_exponent = 8.0, sphi = 0.25;
    int planes = 2000, strials = 2000;
    smoothed->add_option("--base", base_file, "base V-polytope file");
    smoothed->add_option("--base-generator", base_generator, "sphere | cross");
    smoothed->add_option("--m", sm, "base point count");
    smoothed->add_option("--d", sd, "dimension");
    smoothed->add_option("--gen-seed", gen_seed, "base generator seed");
    smoothed->add_option("--sigma", sigma, "noise level");
    smoothed->add_option("--split-exponent", split_exponent, "two-stage exponent (default 8)");
    smoothed->add_option("--phi", sphi, "mass threshold");
    smoothed->add_option("--planes", planes, "shadow-experiment planes");
    smoothed->add_option("--trials", strials, "chain trajectories");
    smoothed->add_option("--instances", instances, "number of seeded instances (CSV rows)");

    auto* quadrature = app.add_subcommand("quadrature", "plane-quadrature perimeter estimate");
    src.attach(quadrature);
    int qplanes = 100000, cd_samples = 200000;
    double eta = 0.25;
    quadrature->add_option("--planes", qplanes, "plane samples");
    quadrature->add_option("--eta", eta, "boundary smoothing radius");
    quadrature->add_option("--cd-samples", cd_samples, "intersection-constant samples");

    auto* steiner = app.add_subcommand("steiner", "Steiner expansion and log-concavity checks");
    src.attach(steiner);
    std::vector<double> eps_list;
    long spoints = 1000000;
    steiner->add_option("--eps", eps_list, "epsilon ladder");
    steiner->add_option("--points", spoints, "Monte Carlo points per epsilon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (tol_abs > 0) tolerances().abs_tol = tol_abs;
    if (tol_rel > 0) tolerances().rel_tol = tol_rel;

    Manifest man;
    man.config["out"] = out;
    man.config["seed"] = seed;

    int rc = 0;
    try {
        if (analyze->parsed()) {
            man.config["subcommand"] = "analyze";
            man.config["source"] = src.echo();
            rc = cmd_analyze(src, out, man);
        } else if (bound->parsed()) {
            man.config["subcommand"] = "bound";
            man.config["source"] = src.echo();
            man.config["corpus"] = corpus;
            rc = cmd_bound(src, out, recenter, constant, corpus, corpus_d, corpus_entries, seed,
                           man);
        } else if (chain->parsed()) {
            man.config["subcommand"] = "chain";
            man.config["source"] = src.echo();
            man.config["phi"] = phi;
            man.config["trials"] = trials;
            rc = cmd_chain(src, out, phi, trials, seed, horizon_override, cutoff_scale, man);
        } else if (smoothed->parsed()) {
            man.config["subcommand"] = "smoothed";
            man.config["m"] = sm;
            man.config["d"] = sd;
            man.config["sigma"] = sigma;
            man.config["phi"] = sphi;
            man.config["instances"] = instances;
            rc = cmd_smoothed(base_file, base_generator, sm, sd, gen_seed, sigma, split_exponent,
                              sphi, planes, strials, instances, seed, out, man);
        } else if (quadrature->parsed()) {
            man.config["subcommand"] = "quadrature";
            man.config["source"] = src.echo();
            man.config["planes"] = qplanes;
            rc = cmd_quadrature(src, out, qplanes, eta, seed, cd_samples, man);
        } else if (steiner->parsed()) {
            man.config["subcommand"] = "steiner";
            man.config["source"] = src.echo();
            man.config["points"] = spoints;
            rc = cmd_steiner(src, out, eps_list, spoints, seed, man);
        }
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DegeneracyError& e) {
        std::cerr << "numerical failure (degeneracy): " << e.what() << "\n";
        return 3;
    }
    man.print();
    return rc;
}
