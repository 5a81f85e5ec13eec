#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "polyspec/bounds.hpp"
#include "polyspec/config.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/linalg.hpp"
#include "polyspec/rng.hpp"
#include "polyspec/spectral.hpp"

namespace polyspec {

// Continuous-time chain on the facets:
//   pi(S)   = sum_T |F_ST| tan(theta_ST / 2)
//   chi2(S) = sum_T |F_ST| theta_ST
//   delta(S)= sum_T |F_ST| csc(theta_ST)
//   Q(S,T)  = |F_ST| csc(theta_ST) / pi(S),  Q(S,S) = -delta(S)/pi(S)
struct ChainModel {
    int N = 0;
    Mat Q;
    Vec pi, pi_bar, chi2, delta;
    double pi_total = 0, chi2_total = 0, delta_total = 0;
    double j_avg = 0;  // delta_total / pi_total

    // simulation structure: per facet, (neighbor, weight |F_ST| csc theta)
    std::vector<std::vector<std::pair<int, double>>> jumps;
    Vec rate;  // delta(S) / pi(S)
    std::vector<std::vector<int>> neighbors;
};

inline ChainModel build_chain(const FacetComplex& fc) {
    ChainModel c;
    c.N = fc.facet_count();
    c.pi = build_degree(fc);
    c.chi2.assign(c.N, 0.0);
    c.delta.assign(c.N, 0.0);
    c.jumps.assign(c.N, {});
    c.neighbors = fc.neighbors;
    for (const RidgeData& r : fc.ridges) {
        const double s = std::sin(r.theta);
        if (s <= 0) throw DegeneracyError("build_chain: angle at 0 or pi");
        const double w = r.volume / s;
        c.chi2[r.f1] += r.volume * r.theta;
        c.chi2[r.f2] += r.volume * r.theta;
        c.delta[r.f1] += w;
        c.delta[r.f2] += w;
        c.jumps[r.f1].push_back({r.f2, w});
        c.jumps[r.f2].push_back({r.f1, w});
    }
    for (auto& row : c.jumps) std::sort(row.begin(), row.end());

    c.Q = Mat(c.N, c.N);
    c.rate.assign(c.N, 0.0);
    for (int i = 0; i < c.N; ++i) {
        for (const auto& [j, w] : c.jumps[i]) c.Q(i, j) = w / c.pi[i];
        c.Q(i, i) = -c.delta[i] / c.pi[i];
        c.rate[i] = c.delta[i] / c.pi[i];
    }
    for (double v : c.pi) c.pi_total += v;
    for (double v : c.chi2) c.chi2_total += v;
    for (double v : c.delta) c.delta_total += v;
    c.j_avg = c.delta_total / c.pi_total;
    c.pi_bar = c.pi;
    for (double& v : c.pi_bar) v /= c.pi_total;
    return c;
}

// ||pi Q||_inf, for the left-stationarity check
inline double stationarity_residual(const ChainModel& c) {
    Vec piQ = vec_mat(c.pi, c.Q);
    return norm_inf(piQ);
}

// Spectrum of D^{-1/2} L D^{-1/2}: exactly one zero, the rest at least 1.
struct ChainGap {
    double gap = 0;  // second-smallest eigenvalue
    Vec eigenvalues;
    bool pass = false;
};

inline ChainGap chain_spectral_gap(const FacetComplex& fc) {
    auto L = build_laplacian(fc);
    auto D = build_degree(fc);
    auto scaledL = scale_by_degree(L, D);
    auto sp = eigh(scaledL);
    ChainGap out;
    out.eigenvalues = sp.eigenvalues;
    out.gap = sp.eigenvalues.size() >= 2 ? sp.eigenvalues[1] : 0.0;
    const double tol = tolerances().gap_eig;
    out.pass = std::fabs(sp.eigenvalues[0]) <= tol && out.gap >= 1.0 - tol;
    return out;
}

// ---------------------------------------------------------------------------
// Trajectories

struct Trajectory {
    std::vector<int> facets;
    std::vector<double> holding;  // one entry per visited facet
    double total_time = 0;

    int jump_count() const { return int(facets.size()) - 1; }
};

// Gillespie sampling: exponential holding at rate delta(S)/pi(S), next
// facet proportional to |F_ST| csc(theta_ST).
inline Trajectory simulate(const ChainModel& c, int start, double T, SplitRng& stream) {
    if (T < 0) throw InvalidInput("simulate: negative horizon");
    if (start < 0 || start >= c.N) throw InvalidInput("simulate: bad start facet");
    Trajectory tr;
    tr.total_time = T;
    int cur = start;
    double t = 0;
    tr.facets.push_back(cur);
    for (;;) {
        const double lam = c.rate[cur];
        double u = stream.next_unit();
        if (u <= 0) u = 0x1.0p-53;
        const double hold = -std::log(u) / lam;
        if (t + hold >= T) {
            tr.holding.push_back(T - t);
            break;
        }
        tr.holding.push_back(hold);
        t += hold;
        // next state by cumulative weight
        double target = stream.next_unit() * c.delta[cur];
        int next = c.jumps[cur].back().first;
        double acc = 0;
        for (const auto& [j, w] : c.jumps[cur]) {
            acc += w;
            if (target < acc) {
                next = j;
                break;
            }
        }
        cur = next;
        tr.facets.push_back(cur);
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Warm-start mixing: t = 2 log(M / tau) brings an M-warm start within TV tau.

struct MixingResult {
    double warmness = 0;  // M
    double t = 0;
    double tv = 0;
    bool pass = false;
};

inline MixingResult mixing_check(const ChainModel& c, const Vec& p, double tau) {
    if (int(p.size()) != c.N) throw InvalidInput("mixing_check: distribution size mismatch");
    double mass = 0;
    for (double v : p) mass += v;
    if (std::fabs(mass - 1.0) > 1e-9) throw InvalidInput("mixing_check: p is not a distribution");
    MixingResult out;
    for (int i = 0; i < c.N; ++i) out.warmness = std::max(out.warmness, p[i] / c.pi_bar[i]);
    out.t = out.warmness > 1.0 ? 2.0 * std::log(out.warmness / tau) : 0.0;
    Vec evolved = out.t > 0 ? uniformized_exp(c.Q, p, out.t) : p;
    double tv = 0;
    for (int i = 0; i < c.N; ++i) tv += std::fabs(evolved[i] - c.pi_bar[i]);
    out.tv = tv / 2.0;
    out.pass = out.tv <= tau;
    return out;
}

// ---------------------------------------------------------------------------
// Giant component extraction (trajectory-certified low-diameter subset)

struct GiantComponentResult {
    int source = 0;              // F0
    std::vector<int> members;    // G, sorted
    double pi_mass = 0;          // pi_bar(G)
    double chi2_mass = 0;        // chi2(G) / chi2(Omega)
    int bfs_diameter = 0;        // exact diameter of G inside the full facet graph
    double cutoff = 0;           // retained-path length cutoff
    double certified_bound = 0;  // 2 * cutoff
    double horizon = 0;
    double mean_jumps = 0;
    double mass_se = 0;  // binomial standard error at phi
    bool cutoff_sound = false;   // dist(F0, v) <= cutoff for all v in G
    std::vector<int> trial_jumps;
    std::vector<int> trial_endpoints;
};

struct GiantComponentOptions {
    double horizon_override = -1.0;  // > 0 replaces T = 2 log(2 / pi_bar_min)
    double cutoff_scale = 2.0;       // Markov threshold factor
    int pilot_trials = 16;           // per-facet source-selection trials
};

inline GiantComponentResult giant_component(const FacetComplex& fc, double phi, int trials,
                                            uint64_t seed, GiantComponentOptions opt = {}) {
    if (!(phi > 0 && phi < 1)) throw InvalidInput("giant_component: phi must be in (0,1)");
    if (trials < 1)
        throw InvalidInput("giant_component: trials must be positive (suggested: >= 1000)");
    ChainModel c = build_chain(fc);
    GiantComponentResult out;

    double pmin = c.pi_bar[0];
    for (double v : c.pi_bar) pmin = std::min(pmin, v);
    out.horizon = opt.horizon_override > 0 ? opt.horizon_override : 2.0 * std::log(2.0 / pmin);

    SplitRng master(seed);
    auto pilot_root = master.stream(0);
    auto main_root = master.stream(1);

    // source selection: lowest-index facet whose estimated E J_F^T is at
    // most the stationary average, with one standard error of slack
    const double stationary_avg = out.horizon * c.j_avg;
    int source = -1;
    double best_mean = std::numeric_limits<double>::infinity();
    int best_idx = 0;
    for (int f = 0; f < c.N; ++f) {
        auto froot = pilot_root.stream(f);
        double sum = 0, sum2 = 0;
        for (int t = 0; t < opt.pilot_trials; ++t) {
            auto s = froot.stream(t);
            const double j = simulate(c, f, out.horizon, s).jump_count();
            sum += j;
            sum2 += j * j;
        }
        const double mean = sum / opt.pilot_trials;
        const double var = std::max(0.0, sum2 / opt.pilot_trials - mean * mean);
        const double se = std::sqrt(var / opt.pilot_trials);
        if (mean < best_mean) {
            best_mean = mean;
            best_idx = f;
        }
        if (source < 0 && mean <= stationary_avg + se) source = f;
    }
    if (source < 0) source = best_idx;
    out.source = source;

    std::vector<int> jumps(trials);
    std::vector<int> endpoints(trials);
    double jump_sum = 0;
    for (int t = 0; t < trials; ++t) {
        auto s = main_root.stream(t);
        Trajectory tr = simulate(c, source, out.horizon, s);
        jumps[t] = tr.jump_count();
        endpoints[t] = tr.facets.back();
        jump_sum += jumps[t];
    }
    out.mean_jumps = jump_sum / trials;
    out.cutoff = opt.cutoff_scale * out.mean_jumps / phi;
    out.certified_bound = 2.0 * out.cutoff;
    out.trial_jumps = jumps;
    out.trial_endpoints = endpoints;

    std::set<int> members;
    for (int t = 0; t < trials; ++t)
        if (double(jumps[t]) <= out.cutoff) members.insert(endpoints[t]);
    if (members.empty())
        throw NumericalError("giant_component: empty retained set; increase trials (suggested " +
                             std::to_string(std::max(1000, 10 * trials)) + ")");
    out.members.assign(members.begin(), members.end());

    for (int v : out.members) out.pi_mass += c.pi_bar[v];
    for (int v : out.members) out.chi2_mass += c.chi2[v];
    out.chi2_mass /= c.chi2_total;
    out.mass_se = std::sqrt(phi * (1.0 - phi) / trials);

    // distances inside the full facet graph
    auto bfs_from = [&](int src) {
        std::vector<int> dist(c.N, -1);
        std::deque<int> q = {src};
        dist[src] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int v : c.neighbors[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
        }
        return dist;
    };
    auto from_source = bfs_from(source);
    out.cutoff_sound = true;
    for (int v : out.members)
        if (double(from_source[v]) > out.cutoff) out.cutoff_sound = false;
    int diam = 0;
    for (int v : out.members) {
        auto dist = bfs_from(v);
        for (int w : out.members) diam = std::max(diam, dist[w]);
    }
    out.bfs_diameter = diam;
    return out;
}

// ---------------------------------------------------------------------------
// Non-degeneracy diagnostics for pi_bar

struct NondegeneracyReport {
    double pi_min_actual = 0;
    double pi_min_bound = 0;    // m^{-2d^2} r^2 / d^3, reference only
    double surface_ratio = 0;   // pi(Omega) / surface area
    Vec chi2_pi_ratio;          // per facet
    bool chi2_half_le_pi = false;
    std::vector<int> regime_violations;  // facets with an angle within 1/r of pi
};

inline NondegeneracyReport nondegeneracy_report(const FacetComplex& fc, double r) {
    ChainModel c = build_chain(fc);
    NondegeneracyReport out;
    out.pi_min_actual = *std::min_element(c.pi_bar.begin(), c.pi_bar.end());
    const double m = double(fc.points.size());
    const double d = double(fc.dim);
    out.pi_min_bound = r > 0 ? std::pow(m, -2.0 * d * d) * r * r / (d * d * d) : 0.0;
    out.surface_ratio = c.pi_total / surface_area(fc);
    out.chi2_pi_ratio.resize(c.N);
    out.chi2_half_le_pi = true;
    for (int i = 0; i < c.N; ++i) {
        out.chi2_pi_ratio[i] = c.chi2[i] / c.pi[i];
        if (c.chi2[i] / 2.0 > c.pi[i] * (1.0 + 1e-12)) out.chi2_half_le_pi = false;
    }
    if (r > 0) {
        std::vector<char> flagged(c.N, 0);
        for (const RidgeData& ridge : fc.ridges)
            if (M_PI - ridge.theta < 1.0 / r) {
                flagged[ridge.f1] = 1;
                flagged[ridge.f2] = 1;
            }
        for (int i = 0; i < c.N; ++i)
            if (flagged[i]) out.regime_violations.push_back(i);
    }
    return out;
}

}  // namespace polyspec
