#pragma once

#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "polyspec/config.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/linalg.hpp"
#include "polyspec/spectral.hpp"

namespace polyspec {

// ---------------------------------------------------------------------------
// Exact graph diameters

namespace detail {

inline int bfs_diameter(const std::vector<std::vector<int>>& adj) {
    const int n = int(adj.size());
    int diameter = 0;
    std::vector<int> dist(n);
    for (int src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<int> queue = {src};
        dist[src] = 0;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : adj[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
        }
        for (int v = 0; v < n; ++v) {
            if (dist[v] < 0) throw DegeneracyError("bfs_diameter: graph is disconnected");
            diameter = std::max(diameter, dist[v]);
        }
    }
    return diameter;
}

}  // namespace detail

// facet diameter: eccentricity maximum over BFS from every facet
inline int graph_diameter(const FacetComplex& fc) { return detail::bfs_diameter(fc.neighbors); }

// vertex diameter of an H-polytope: vertices adjacent when their shared
// tight constraints span a (d-1)-dimensional edge figure
inline int vertex_diameter(const HPolytope& P) {
    auto vs = vertices_of_hpolytope(P);
    const int n = int(vs.verts.points.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::vector<int> shared;
            std::set_intersection(vs.tight[i].begin(), vs.tight[i].end(), vs.tight[j].begin(),
                                  vs.tight[j].end(), std::back_inserter(shared));
            if (int(shared.size()) < P.dim - 1) continue;
            Mat rows(int(shared.size()), P.dim);
            for (int r = 0; r < int(shared.size()); ++r)
                for (int c = 0; c < P.dim; ++c) rows(r, c) = P.A(shared[r], c);
            if (matrix_rank(rows) == P.dim - 1) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    return detail::bfs_diameter(adj);
}

// ---------------------------------------------------------------------------
// Spectral machinery

// smallest eigenvalue is at least -sup_i sum_j |M_ij|
inline double gershgorin_lower(const SymMatrix& M) {
    double worst = 0;
    for (int i = 0; i < M.size(); ++i) {
        double s = 0;
        for (int j = 0; j < M.size(); ++j) s += std::fabs(M(i, j));
        worst = std::max(worst, s);
    }
    return -worst;
}

// 2 log(2N / v_min^2) / sqrt(g)
inline double chebyshev_bound(int N, double g, double v_min) {
    if (!(g > 0)) throw InvalidInput("chebyshev_bound: requires g > 0");
    if (!(v_min > 0)) throw InvalidInput("chebyshev_bound: requires v_min > 0");
    return 2.0 * std::log(2.0 * double(N) / (v_min * v_min)) / std::sqrt(g);
}

// Smallest k certifying diameter <= k via Chebyshev witnesses. A witness at
// degree k is either (a) the spectral bound v_min^2 T_k(1+g) > N, which
// forces T_k(A) to be entrywise nonzero, or (b) T_k(A) itself evaluated and
// entrywise nonzero. The spectrum precondition (one eigenvalue 1+g, rest in
// [-1,1]) is verified before iterating.
struct CertifiedSteps {
    int k = 0;
    double g = 0;
    double v_min = 0;
    bool by_direct_evaluation = false;  // witness came from T_k(A) itself
};

inline CertifiedSteps certified_steps(const SymMatrix& A, const Spectrum& sp) {
    const int n = A.size();
    if (n < 2) throw InvalidInput("certified_steps: need at least two nodes");
    const double top = sp.eigenvalues[n - 1];
    const double g = top - 1.0;
    if (!(g > 0)) throw InvalidInput("certified_steps: top eigenvalue must exceed 1");
    const double slack = 1e-7;
    if (sp.eigenvalues[n - 2] > 1.0 + slack || sp.eigenvalues[0] < -1.0 - slack)
        throw InvalidInput("certified_steps: remaining spectrum not inside [-1, 1]");

    Vec v = sp.eigenvectors.col(n - 1);
    double v_min = std::fabs(v[0]);
    for (double x : v) v_min = std::min(v_min, std::fabs(x));
    if (!(v_min > 0)) throw NumericalError("certified_steps: top eigenvector has a zero entry");

    const double apriori = chebyshev_bound(n, g, v_min);
    const int cap = int(std::ceil(apriori)) + 1;

    // dense Chebyshev iteration on A
    auto matmul = [&](const std::vector<double>& X) {
        std::vector<double> Y(size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k2 = 0; k2 < n; ++k2) {
                const double a = A(i, k2);
                if (a == 0) continue;
                for (int j = 0; j < n; ++j) Y[size_t(i) * n + j] += a * X[size_t(k2) * n + j];
            }
        return Y;
    };
    std::vector<double> Tprev(size_t(n) * n, 0.0), Tcur(size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) Tprev[size_t(i) * n + i] = 1.0;  // T_0 = I
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Tcur[size_t(i) * n + j] = A(i, j);  // T_1 = A

    double tk_prev = 1.0, tk_cur = top;  // T_k(1+g)
    CertifiedSteps out;
    out.g = g;
    out.v_min = v_min;
    for (int k = 1; k <= cap; ++k) {
        if (v_min * v_min * tk_cur - double(n) > 0) {
            out.k = k;
            out.by_direct_evaluation = false;
            return out;
        }
        double scale = 0, smallest = std::numeric_limits<double>::infinity();
        for (double x : Tcur) scale = std::max(scale, std::fabs(x));
        for (double x : Tcur) smallest = std::min(smallest, std::fabs(x));
        if (smallest > 1e-9 * std::max(1.0, scale)) {
            out.k = k;
            out.by_direct_evaluation = true;
            return out;
        }
        // T_{k+1} = 2 A T_k - T_{k-1}
        std::vector<double> Tnext = matmul(Tcur);
        for (size_t i = 0; i < Tnext.size(); ++i) Tnext[i] = 2.0 * Tnext[i] - Tprev[i];
        Tprev.swap(Tcur);
        Tcur.swap(Tnext);
        const double tk_next = 2.0 * top * tk_cur - tk_prev;
        tk_prev = tk_cur;
        tk_cur = tk_next;
        if (tk_cur > 1e300) {
            out.k = k + 1;
            out.by_direct_evaluation = false;
            return out;  // witness value overflows: certainly positive
        }
    }
    throw NumericalError("certified_steps: no witness found below the a priori cap");
}

// ---------------------------------------------------------------------------
// The explicit bound chain for one facet complex: theta_0, gap, Chebyshev
// matrix A = (S + csc^2(theta_0/2) I) / csc^2(theta_0/2).

struct ChebyshevReport {
    int N = 0;
    double theta_min = 0;  // min over ridges of min(theta, pi - theta)
    double gap = 0;        // sin^2(theta_0 / 2)
    double v_min_exact = 0;
    double v_min_worst_case = 0;  // sqrt(min D / max D) / sqrt(N)
    double apriori = 0;           // with the exact v_min
    double worst_case_bound = 0;  // with the worst-case v_min
    int certified = 0;
    bool certified_by_direct = false;
    int exact_facet_diameter = 0;
};

inline ChebyshevReport chebyshev_report(const FacetComplex& fc) {
    ChebyshevReport rep;
    rep.N = fc.facet_count();
    rep.exact_facet_diameter = graph_diameter(fc);

    double theta0 = M_PI / 2;
    for (const RidgeData& r : fc.ridges)
        theta0 = std::min({theta0, r.theta, M_PI - r.theta});
    if (!(theta0 > 0)) throw DegeneracyError("chebyshev_report: degenerate angle");
    rep.theta_min = theta0;
    const double s = std::sin(theta0 / 2.0);
    rep.gap = s * s;
    const double csc2 = 1.0 / rep.gap;

    SpectralBundle b = build_spectral_bundle(fc);
    SymMatrix A(rep.N);
    for (int i = 0; i < rep.N; ++i)
        for (int j = i; j < rep.N; ++j)
            A.set(i, j, (b.scaled(i, j) + (i == j ? csc2 : 0.0)) / csc2);
    auto sp = eigh(A);

    double dmin = b.D[0], dmax = b.D[0];
    for (double v : b.D) {
        dmin = std::min(dmin, v);
        dmax = std::max(dmax, v);
    }
    rep.v_min_worst_case = std::sqrt(dmin / dmax) / std::sqrt(double(rep.N));

    auto steps = certified_steps(A, sp);
    rep.v_min_exact = steps.v_min;
    rep.certified = steps.k;
    rep.certified_by_direct = steps.by_direct_evaluation;
    rep.apriori = chebyshev_bound(rep.N, steps.g, steps.v_min);
    rep.worst_case_bound = chebyshev_bound(rep.N, steps.g, rep.v_min_worst_case);
    return rep;
}

// ---------------------------------------------------------------------------
// Worst-case envelopes from integer data (polar-side actuals)

struct WorstCaseEnvelope {
    double min_ridge_lower = 0;  // 1 / (d! ||b||^{2d})
    double max_ridge_upper = 0;  // (sqrt(d) ||A||)^d
    double csc_upper = 0;        // 2 d Delta ||A||
    double actual_min_ridge = 0;
    double actual_max_ridge = 0;
    double actual_max_csc = 0;
    bool holds = false;
    IntegerData data;
};

inline WorstCaseEnvelope worst_case_envelope(const HPolytope& P, const FacetComplex& polar_fc) {
    std::vector<std::vector<long long>> Ai;
    std::vector<long long> bi;
    integral_hpolytope(P, Ai, bi);
    WorstCaseEnvelope env;
    env.data = integer_data(Ai, bi);
    const int d = P.dim;
    double dfact = 1;
    for (int i = 2; i <= d; ++i) dfact *= i;
    env.min_ridge_lower = 1.0 / (dfact * std::pow(double(env.data.norm_b), 2.0 * d));
    env.max_ridge_upper = std::pow(std::sqrt(double(d)) * double(env.data.norm_a), double(d));
    env.csc_upper = 2.0 * d * double(env.data.delta) * double(env.data.norm_a);

    env.actual_min_ridge = std::numeric_limits<double>::infinity();
    for (const RidgeData& r : polar_fc.ridges) {
        env.actual_min_ridge = std::min(env.actual_min_ridge, r.volume);
        env.actual_max_ridge = std::max(env.actual_max_ridge, r.volume);
        env.actual_max_csc = std::max(env.actual_max_csc, 1.0 / std::sin(r.theta));
    }
    env.holds = env.actual_min_ridge >= env.min_ridge_lower - 1e-12 &&
                env.actual_max_ridge <= env.max_ridge_upper + 1e-12 &&
                env.actual_max_csc <= env.csc_upper + 1e-12;
    return env;
}

// ---------------------------------------------------------------------------
// Headline integer bound: C d^2 Delta ||A|| log(m ||A|| ||b|| Delta).
// The constant C is user-settable and the value is not certified; the
// certified chain is the chebyshev_report path.

inline double integer_headline_bound(const HPolytope& P, double C = 1.0) {
    std::vector<std::vector<long long>> Ai;
    std::vector<long long> bi;
    integral_hpolytope(P, Ai, bi);
    auto id = integer_data(Ai, bi);
    const double d = P.dim;
    const double arg =
        double(P.A.rows) * double(id.norm_a) * double(id.norm_b) * double(id.delta);
    return C * d * d * double(id.delta) * double(id.norm_a) * std::log(arg);
}

// ---------------------------------------------------------------------------
// Full report for one integral H-polytope

struct DiameterReport {
    int exact_diameter = 0;        // facet diameter of the polar (= vertex diameter of P)
    double chebyshev_apriori = 0;  // exact v_min path
    int chebyshev_certified = 0;
    double min_angle_bound = 0;     // worst-case v_min path (explicit proof chain)
    double headline_bound = 0;      // C d^2 Delta ||A|| log(...), not certified
    double gap_used = 0;
    double v_min_used = 0;
    double theta_min = 0;
    int N = 0;
    bool integral = false;
    bool recentered = false;
    std::optional<WorstCaseEnvelope> envelope;
};

struct DiameterOptions {
    bool recenter = false;    // move the Chebyshev center to the origin if needed
    double headline_C = 1.0;  // constant for the headline bound
};

inline DiameterReport diameter_report(const HPolytope& P_in, DiameterOptions opt = {}) {
    HPolytope P = P_in;
    DiameterReport rep;
    bool interior = true;
    for (double v : P.b)
        if (v <= 1e-12) interior = false;
    if (!interior) {
        if (!opt.recenter)
            throw InvalidInput("diameter_report: origin is not interior; "
                               "rerun with recentering enabled");
        P = recenter_chebyshev(P).P;
        rep.recentered = true;
    }

    VPolytope K = polar(P);
    EnumOptions eopt;
    eopt.allow_merged = true;
    FacetComplex fc = facet_complex_of_vpolytope(K, eopt);

    auto cheb = chebyshev_report(fc);
    rep.exact_diameter = cheb.exact_facet_diameter;
    rep.chebyshev_apriori = cheb.apriori;
    rep.chebyshev_certified = cheb.certified;
    rep.min_angle_bound = cheb.worst_case_bound;
    rep.gap_used = cheb.gap;
    rep.v_min_used = cheb.v_min_exact;
    rep.theta_min = cheb.theta_min;
    rep.N = cheb.N;

    // integral paths only when the input data (before recentering) is integral
    try {
        std::vector<std::vector<long long>> Ai;
        std::vector<long long> bi;
        integral_hpolytope(P_in, Ai, bi);
        rep.integral = true;
    } catch (const InvalidInput&) {
        rep.integral = false;
    }
    if (rep.integral) {
        rep.headline_bound = integer_headline_bound(P_in, opt.headline_C);
        // the envelope compares integral data against the polar of the
        // original system, so it is skipped after recentering
        if (!rep.recentered) rep.envelope = worst_case_envelope(P_in, fc);
    }
    return rep;
}

}  // namespace polyspec
