#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polyspec/config.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/linalg.hpp"
#include "polyspec/rng.hpp"

namespace polyspec {

// Formal Hessian of a facet complex:
//   H_ij = |F_ij| csc(theta_ij)          for adjacent i != j
//   H_ii = -sum_k |F_ik| cot(theta_ik)
inline SymMatrix build_hessian(const FacetComplex& fc) {
    const int n = fc.facet_count();
    SymMatrix H(n);
    for (const RidgeData& r : fc.ridges) {
        const double s = std::sin(r.theta);
        if (s <= 0) throw DegeneracyError("build_hessian: angle at 0 or pi");
        H.set(r.f1, r.f2, r.volume / s);
        H.add_to(r.f1, r.f1, -r.volume * std::cos(r.theta) / s);
        H.add_to(r.f2, r.f2, -r.volume * std::cos(r.theta) / s);
    }
    return H;
}

// D_ii = sum_k |F_ik| tan(theta_ik / 2); strictly positive on connected complexes
inline Vec build_degree(const FacetComplex& fc) {
    Vec D(fc.facet_count(), 0.0);
    for (const RidgeData& r : fc.ridges) {
        const double t = std::tan(r.theta / 2.0);
        if (!(t > 0)) throw DegeneracyError("build_degree: angle at 0 or pi");
        D[r.f1] += r.volume * t;
        D[r.f2] += r.volume * t;
    }
    for (double v : D)
        if (v < tolerances().degree_floor)
            throw DegeneracyError("build_degree: diagonal entry below the degeneracy floor");
    return D;
}

// graph Laplacian with weights |F_ij| csc(theta_ij); rows sum to zero exactly
inline SymMatrix build_laplacian(const FacetComplex& fc) {
    const int n = fc.facet_count();
    SymMatrix L(n);
    for (const RidgeData& r : fc.ridges) {
        const double w = r.volume / std::sin(r.theta);
        L.set(r.f1, r.f2, -w);
    }
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) s += L(i, j);
        L.set(i, i, -s);
    }
    return L;
}

struct SpectralBundle {
    int N = 0;
    SymMatrix H;
    Vec D;
    SymMatrix L;
    SymMatrix scaled;  // D^{-1/2} H D^{-1/2}
    Spectrum spectrumH;
    Spectrum spectrumScaled;
};

inline SymMatrix scale_by_degree(const SymMatrix& H, const Vec& D) {
    const int n = H.size();
    SymMatrix S(n);
    Vec inv_sqrt(n);
    for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(D[i]);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) S.set(i, j, inv_sqrt[i] * H(i, j) * inv_sqrt[j]);
    return S;
}

inline SpectralBundle build_spectral_bundle(const FacetComplex& fc) {
    SpectralBundle b;
    b.N = fc.facet_count();
    b.H = build_hessian(fc);
    b.D = build_degree(fc);
    b.L = build_laplacian(fc);

    // H = -L + diag(D) is the identity (1-cos)/sin = tan(theta/2) entrywise
    double scale = std::max({b.H.max_abs(), b.L.max_abs(), norm_inf(b.D), 1e-300});
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j) {
            const double lhs = b.H(i, j);
            const double rhs = -b.L(i, j) + (i == j ? b.D[i] : 0.0);
            if (std::fabs(lhs - rhs) > tolerances().identity * scale)
                throw NumericalError("spectral bundle: H = -L + D identity violated");
        }

    b.scaled = scale_by_degree(b.H, b.D);
    b.spectrumH = eigh(b.H);
    b.spectrumScaled = eigh(b.scaled);
    return b;
}

struct GapCertificate {
    double top_eigenvalue = 0;
    double second_eigenvalue = 0;
    double top_vector_residual = 0;
    int positive_scaled = 0;  // eigenvalues of the scaled matrix above eps_pos
    int positive_H = 0;       // eigenvalues of H above 1e-8 ||H||
    bool pass = false;
    Vec scaled_spectrum;  // full list for diagnosis; never silently passes
};

// One-positive-eigenvalue certification: the scaled matrix has exactly one
// eigenvalue at 1 (eigenvector D^{1/2} 1) and the rest at most 0.
inline GapCertificate certify_gap(const FacetComplex& fc) {
    SpectralBundle b = build_spectral_bundle(fc);
    GapCertificate cert;
    const int n = b.N;
    cert.scaled_spectrum = b.spectrumScaled.eigenvalues;
    cert.top_eigenvalue = cert.scaled_spectrum[n - 1];
    cert.second_eigenvalue = n >= 2 ? cert.scaled_spectrum[n - 2] : 0.0;

    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = std::sqrt(b.D[i]);
    const double un = norm2(u);
    for (double& v : u) v /= un;
    Vec su = b.scaled.apply(u);
    cert.top_vector_residual = norm_inf(sub(su, u));

    const double eps_pos = tolerances().gap_eig * std::max(1.0, b.scaled.max_abs());
    for (double ev : cert.scaled_spectrum)
        if (ev > eps_pos) ++cert.positive_scaled;
    const double eps_h = tolerances().gap_eig * std::max(1.0, b.H.max_abs());
    for (double ev : b.spectrumH.eigenvalues)
        if (ev > eps_h) ++cert.positive_H;

    cert.pass = cert.positive_scaled == 1 && cert.positive_H == 1 &&
                std::fabs(cert.top_eigenvalue - 1.0) <= tolerances().gap_eig &&
                cert.second_eigenvalue <= tolerances().gap_eig &&
                cert.top_vector_residual <= tolerances().top_vec;
    return cert;
}

// ---------------------------------------------------------------------------
// Slack-scaled Hessian of an H-polytope: R = diag(b_i / |F_i|),
// top eigenvalue of R^{1/2} H R^{1/2}. Equals d-1 on simple polytopes.

struct ScaledHessianResult {
    bool simple = false;
    bool checked = false;  // false when skipped on a non-simple input
    double top_eigenvalue = 0;
    int facet_count = 0;
};

inline ScaledHessianResult scaled_hessian_top_eigenvalue(const HPolytope& P,
                                                         bool require_simple = true) {
    for (double v : P.b)
        if (v <= 0) throw InvalidInput("scaled hessian: requires b > 0");
    auto hc = facet_complex_of_hpolytope(P);
    if (!hc.redundant.empty())
        throw InvalidInput("scaled hessian: constraint " + std::to_string(hc.redundant[0]) +
                           " supports no facet (system is not minimal)");

    ScaledHessianResult out;
    out.simple = is_simple(hc.vertices, P.dim);
    out.facet_count = hc.fc.facet_count();
    if (!out.simple && require_simple) {
        out.checked = false;  // the d-1 claim is stated for simple polytopes
        return out;
    }

    SymMatrix H = build_hessian(hc.fc);
    const int n = hc.fc.facet_count();
    Vec R(n);
    for (int i = 0; i < n; ++i) {
        const int row = hc.facet_constraint[i];
        const double an = norm2(P.A.row(row));
        // facet data is stored with unit normals; rescale the slack to match
        R[i] = (P.b[row] / an) / hc.fc.facets[i].volume;
    }
    SymMatrix tilde(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) tilde.set(i, j, std::sqrt(R[i]) * H(i, j) * std::sqrt(R[j]));
    auto sp = eigh(tilde);
    out.top_eigenvalue = sp.eigenvalues[n - 1];
    out.checked = true;
    return out;
}

// ---------------------------------------------------------------------------
// Continuity probe for the slack-scaled Hessian under c -> c + delta u.

struct PerturbationProbe {
    double delta = 0;
    int trials = 0;
    double simple_fraction = 0;
    double max_drift = 0;     // max entrywise |H~(c) - H~(c + delta u)|
    int failed_rebuilds = 0;  // perturbed complexes that could not be built
};

namespace detail {

inline SymMatrix tilde_hessian_of(const HPolytope& P) {
    auto hc = facet_complex_of_hpolytope(P);
    if (!hc.redundant.empty())
        throw InvalidInput("perturbation probe: constraint " + std::to_string(hc.redundant[0]) +
                           " supports no facet (system is not minimal)");
    SymMatrix H = build_hessian(hc.fc);
    const int n = hc.fc.facet_count();
    // entries must line up with constraint rows for drift comparison
    if (n != P.A.rows)
        throw InvalidInput("perturbation probe: facet count does not match constraint count");
    Vec R(P.A.rows);
    SymMatrix aligned(P.A.rows);
    std::vector<int> facet_of_row(P.A.rows, -1);
    for (int i = 0; i < n; ++i) facet_of_row[hc.facet_constraint[i]] = i;
    for (int r = 0; r < P.A.rows; ++r) {
        const double an = norm2(P.A.row(r));
        R[r] = (P.b[r] / an) / hc.fc.facets[facet_of_row[r]].volume;
    }
    for (int r = 0; r < P.A.rows; ++r)
        for (int s = r; s < P.A.rows; ++s)
            aligned.set(r, s, std::sqrt(R[r]) * H(facet_of_row[r], facet_of_row[s]) *
                                  std::sqrt(R[s]));
    return aligned;
}

}  // namespace detail

inline PerturbationProbe perturbation_continuity_probe(const HPolytope& P, double delta,
                                                       int trials, uint64_t seed) {
    PerturbationProbe out;
    out.delta = delta;
    out.trials = trials;
    SymMatrix base = detail::tilde_hessian_of(P);

    SplitRng rng(seed);
    int simple_count = 0;
    for (int t = 0; t < trials; ++t) {
        auto stream = rng.stream(t);
        HPolytope Q = P;
        for (int i = 0; i < Q.A.rows; ++i) Q.b[i] += delta * stream.next_unit();
        auto vs = vertices_of_hpolytope(Q);
        if (is_simple(vs, Q.dim)) ++simple_count;
        if (delta == 0) continue;
        try {
            SymMatrix pert = detail::tilde_hessian_of(Q);
            for (int i = 0; i < base.size(); ++i)
                for (int j = 0; j < base.size(); ++j)
                    out.max_drift = std::max(out.max_drift, std::fabs(base(i, j) - pert(i, j)));
        } catch (const Error&) {
            ++out.failed_rebuilds;
        }
    }
    out.simple_fraction = trials > 0 ? double(simple_count) / trials : 0.0;
    return out;
}

}  // namespace polyspec
