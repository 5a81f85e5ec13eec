#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyspec/chain.hpp"
#include "polyspec/config.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/linalg.hpp"
#include "polyspec/rng.hpp"
#include "polyspec/spectral.hpp"

namespace polyspec {

// ---------------------------------------------------------------------------
// Smoothed unit-LP instances: v_j = a_j + g_j, g_j ~ N(0, sigma^2 I)

struct SmoothedInstance {
    int dim = 0;
    std::vector<Vec> base;    // ||a_j|| <= 1, enforced at construction
    double sigma = 0;
    std::vector<Vec> noise;   // realized g_j
    std::vector<Vec> points;  // v_j = a_j + g_j
    uint64_t seed = 0;
};

inline SmoothedInstance sample_instance(const std::vector<Vec>& base, double sigma,
                                        uint64_t seed) {
    SmoothedInstance inst;
    if (base.empty()) throw InvalidInput("sample_instance: empty base");
    inst.dim = int(base[0].size());
    for (const Vec& a : base)
        if (norm2(a) > 1.0 + 1e-9)
            throw InvalidInput("sample_instance: base point with norm above one");
    inst.base = base;
    inst.sigma = sigma;
    inst.seed = seed;
    SplitRng rng(seed);
    for (size_t j = 0; j < base.size(); ++j) {
        auto stream = rng.stream(j);
        Vec g = stream.gaussian_vector(inst.dim);
        for (double& x : g) x *= sigma;
        Vec v = add(base[j], g);
        // record the realized perturbation so v_j - a_j == g_j exactly
        inst.noise.push_back(sub(v, base[j]));
        inst.points.push_back(std::move(v));
    }
    return inst;
}

// sigma1 = m^e sigma2 with sigma1^2 + sigma2^2 = sigma^2
struct NoiseSplit {
    double sigma1 = 0, sigma2 = 0;
};

inline NoiseSplit two_stage_split(double sigma, int m, double exponent = 8.0) {
    if (!(sigma > 0)) throw InvalidInput("two_stage_split: sigma must be positive");
    NoiseSplit out;
    const double f = std::pow(double(m), exponent);
    out.sigma2 = sigma / std::sqrt(1.0 + f * f);
    out.sigma1 = f * out.sigma2;
    return out;
}

// ---------------------------------------------------------------------------
// Assumption and event report

struct AssumptionReport {
    double r_best = 0;         // max r with rB (origin-centered) inside every K0^{(j)}
    double inradius_best = 0;  // min over j of the Chebyshev inradius of K0^{(j)}
    double alpha = 0;          // 6 sigma sqrt(d log m)
    bool satisfies_r = false;
    bool satisfies_s = false;  // alpha < r_best / d^2
    bool event_b = false;      // min_j dist(v_j, aff(F_S)) >= m^{-5d}
    bool event_c = false;      // max ||g_j|| <= alpha
    double log_eps = 0;        // -5 d log m
    double min_log_dist = 0;   // over facets of K and outside indices
    double max_noise = 0;
};

namespace detail {

struct HullRadii {
    double origin_ball = 0;  // largest origin-centered inscribed ball
    double inradius = 0;     // Chebyshev inradius
};

inline HullRadii radii_of_hull(const std::vector<Vec>& pts, int dim) {
    HullRadii out;
    try {
        EnumOptions opt;
        opt.allow_merged = true;
        VPolytope K{dim, pts};
        auto fc = facet_complex_of_vpolytope(K, opt);
        out.origin_ball = origin_ball_radius(fc);
        out.inradius = inradius(hrep_of(fc)).r;
    } catch (const Error&) {
        out.origin_ball = 0;  // lower-dimensional or degenerate hull
        out.inradius = 0;
    }
    return out;
}

}  // namespace detail

inline AssumptionReport check_assumptions(const SmoothedInstance& inst) {
    AssumptionReport rep;
    const int m = int(inst.base.size());
    const int d = inst.dim;
    rep.alpha = 6.0 * inst.sigma * std::sqrt(double(d) * std::log(double(m)));
    rep.log_eps = -5.0 * double(d) * std::log(double(m));

    rep.r_best = std::numeric_limits<double>::infinity();
    rep.inradius_best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        std::vector<Vec> sub;
        for (int i = 0; i < m; ++i)
            if (i != j) sub.push_back(inst.base[i]);
        auto radii = detail::radii_of_hull(sub, d);
        rep.r_best = std::min(rep.r_best, radii.origin_ball);
        rep.inradius_best = std::min(rep.inradius_best, radii.inradius);
    }
    if (!std::isfinite(rep.r_best)) rep.r_best = 0;
    if (!std::isfinite(rep.inradius_best)) rep.inradius_best = 0;
    rep.satisfies_r = rep.r_best > 0;
    rep.satisfies_s = rep.alpha < rep.r_best / double(d * d);

    for (const Vec& g : inst.noise) rep.max_noise = std::max(rep.max_noise, norm2(g));
    rep.event_c = rep.max_noise <= rep.alpha + 1e-15;

    // event B over the facets of the realized hull
    rep.min_log_dist = std::numeric_limits<double>::infinity();
    try {
        EnumOptions opt;
        opt.allow_merged = true;
        VPolytope K{d, inst.points};
        auto fc = facet_complex_of_vpolytope(K, opt);
        for (const auto& f : fc.facets) {
            for (int j = 0; j < m; ++j) {
                if (std::find(f.vertices.begin(), f.vertices.end(), j) != f.vertices.end())
                    continue;
                const double dist = std::fabs(dot(f.normal, inst.points[j]) - f.offset);
                rep.min_log_dist = std::min(rep.min_log_dist, std::log(std::max(dist, 1e-300)));
            }
        }
        rep.event_b = rep.min_log_dist >= rep.log_eps;
    } catch (const Error&) {
        rep.event_b = false;  // degenerate hull: the distance event fails
        rep.min_log_dist = -std::numeric_limits<double>::infinity();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Roundedness of smoothed hulls under stage-one noise

struct RoundednessReport {
    int trials = 0;
    std::vector<std::pair<double, double>> quantiles;  // (level, r_in / sigma1)
    double frac_below_m5 = 0;     // r_in / sigma1 < m^{-5}
    double frac_below_lemma = 0;  // r_in < sigma1 m^{-4} / (d+1)
    int degenerate = 0;           // hulls that failed to build
};

inline RoundednessReport roundedness_trial(const std::vector<Vec>& base, double sigma1,
                                           int trials, uint64_t seed) {
    if (int(base.size()) < int(base[0].size()) + 1)
        throw InvalidInput("roundedness_trial: need at least d+1 base points");
    RoundednessReport rep;
    rep.trials = trials;
    const int m = int(base.size());
    const int d = int(base[0].size());
    std::vector<double> ratios;
    SplitRng rng(seed);
    for (int t = 0; t < trials; ++t) {
        auto stream = rng.stream(t);
        std::vector<Vec> pts;
        for (const Vec& a : base) {
            Vec g = stream.gaussian_vector(d);
            pts.push_back(add(a, scaled(g, sigma1)));
        }
        try {
            EnumOptions opt;
            opt.allow_merged = true;
            auto fc = facet_complex_of_vpolytope({d, pts}, opt);
            ratios.push_back(inradius(hrep_of(fc)).r / sigma1);
        } catch (const Error&) {
            ++rep.degenerate;
            ratios.push_back(0.0);
        }
    }
    std::sort(ratios.begin(), ratios.end());
    for (double level : {0.01, 0.05, 0.10, 0.25, 0.50}) {
        const int idx = std::min(int(level * trials), trials - 1);
        rep.quantiles.push_back({level, ratios[idx]});
    }
    const double thresh_m5 = std::pow(double(m), -5.0);
    const double thresh_lemma = std::pow(double(m), -4.0) / double(d + 1);
    for (double r : ratios) {
        if (r < thresh_m5) rep.frac_below_m5 += 1;
        if (r < thresh_lemma) rep.frac_below_lemma += 1;
    }
    rep.frac_below_m5 /= trials;
    rep.frac_below_lemma /= trials;
    return rep;
}

// ---------------------------------------------------------------------------
// Plane sampler on the smoothed boundary of L0 + 2 eta B: ray casting from
// the centroid with the radial-projection importance weight
// ||a - z0||^{d-1} / sin(phi), so weighted averages estimate surface-measure
// integrals. The 2-frame V is the orthonormalized span of two Gaussians.

struct PlaneSample {
    Vec point;       // a on the boundary of L0 + 2 eta B
    Vec u1, u2;      // orthonormal 2-frame
    double weight = 0;
    double sin_phi = 0;
    Vec normal;      // outward normal at a
};

class PlaneSampler {
  public:
    PlaneSampler(std::vector<Vec> hull_points, double eta)
        : pts_(std::move(hull_points)), eta_(eta) {
        if (pts_.empty()) throw InvalidInput("PlaneSampler: empty hull");
        if (!(eta_ > 0)) throw InvalidInput("PlaneSampler: eta must be positive");
        dim_ = int(pts_[0].size());
        center_.assign(dim_, 0.0);
        for (const Vec& p : pts_)
            for (int i = 0; i < dim_; ++i) center_[i] += p[i];
        for (double& c : center_) c /= double(pts_.size());
        radius_ = 0;
        for (const Vec& p : pts_) radius_ = std::max(radius_, norm2(sub(p, center_)));
    }

    int dim() const { return dim_; }
    const Vec& center() const { return center_; }

    std::optional<PlaneSample> sample(SplitRng& stream) const {
        const Vec omega = stream.unit_vector(dim_);
        // exit time of the ray center + t*omega from L0 + 2 eta B:
        // f(t) = dist(x(t), L0) - 2 eta, f(0) = -2 eta < 0, f convex increasing
        double lo = 0, hi = radius_ + 2.0 * eta_ + 1.0;
        double t = hi;
        double dist = 0;
        Vec proj;
        const double tol = 1e-12 * std::max(1.0, 2.0 * eta_);
        for (int it = 0; it < 200; ++it) {
            Vec x = add(center_, scaled(omega, t));
            auto pr = project_to_hull(pts_, x);
            dist = pr.dist;
            proj = pr.point;
            const double f = dist - 2.0 * eta_;
            if (std::fabs(f) <= tol) break;
            if (f > 0)
                hi = t;
            else
                lo = t;
            double tn = t;
            if (dist > 0) {
                // Newton using f'(t) = <omega, (x - proj)/dist>
                Vec n = scaled(sub(x, proj), 1.0 / dist);
                const double deriv = dot(omega, n);
                if (deriv > 1e-10) tn = t - f / deriv;
            }
            t = (tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
            if (it == 199) return std::nullopt;  // ray cast failed to converge
        }
        if (dist <= 0) return std::nullopt;

        PlaneSample s;
        s.point = add(center_, scaled(omega, t));
        s.normal = scaled(sub(s.point, proj), 1.0 / dist);
        s.sin_phi = std::fabs(dot(s.normal, omega));
        if (s.sin_phi < 1e-9) return std::nullopt;
        s.weight = std::pow(t, dim_ - 1) / s.sin_phi;

        // orthonormal 2-frame from two Gaussians
        for (int attempt = 0; attempt < 50; ++attempt) {
            Vec g1 = stream.gaussian_vector(dim_);
            Vec g2 = stream.gaussian_vector(dim_);
            const double n1 = norm2(g1);
            if (n1 < 1e-12) continue;
            for (double& v : g1) v /= n1;
            const double c = dot(g2, g1);
            for (int i = 0; i < dim_; ++i) g2[i] -= c * g1[i];
            const double n2 = norm2(g2);
            if (n2 < 1e-9) continue;
            for (double& v : g2) v /= n2;
            s.u1 = g1;
            s.u2 = g2;
            return s;
        }
        return std::nullopt;
    }

  private:
    std::vector<Vec> pts_;
    double eta_ = 0;
    int dim_ = 0;
    Vec center_;
    double radius_ = 0;
};

// ---------------------------------------------------------------------------
// Two-dimensional section of an H-polytope

struct SectionResult {
    int vertex_count = 0;
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::pair<int, int>> tight_pairs;  // constraint rows per vertex
};

inline SectionResult plane_section(const HPolytope& P, const Vec& origin, const Vec& u1,
                                   const Vec& u2) {
    const int m = P.A.rows;
    // substitute x = origin + y1 u1 + y2 u2
    std::vector<std::array<double, 2>> A2(m);
    Vec b2(m);
    double scale = 1.0;
    for (int i = 0; i < m; ++i) {
        Vec row = P.A.row(i);
        A2[i] = {dot(row, u1), dot(row, u2)};
        b2[i] = P.b[i] - dot(row, origin);
        scale = std::max({scale, std::fabs(A2[i][0]), std::fabs(A2[i][1]), std::fabs(b2[i])});
    }
    SectionResult out;
    const double det_tol = 1e-12 * scale * scale;
    const double feas_tol = 1e-9 * scale;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double det = A2[i][0] * A2[j][1] - A2[i][1] * A2[j][0];
            if (std::fabs(det) <= det_tol) continue;  // near-parallel pair
            const double y1 = (b2[i] * A2[j][1] - A2[i][1] * b2[j]) / det;
            const double y2 = (A2[i][0] * b2[j] - b2[i] * A2[j][0]) / det;
            bool feasible = true;
            for (int k = 0; k < m && feasible; ++k)
                if (A2[k][0] * y1 + A2[k][1] * y2 > b2[k] + feas_tol) feasible = false;
            if (!feasible) continue;
            bool dup = false;
            for (const auto& v : out.vertices)
                if (std::fabs(v[0] - y1) <= 1e-9 * scale && std::fabs(v[1] - y2) <= 1e-9 * scale) {
                    dup = true;  // first generating pair wins
                    break;
                }
            if (dup) continue;
            out.vertices.push_back({y1, y2});
            out.tight_pairs.push_back({i, j});
        }
    }
    out.vertex_count = int(out.vertices.size());
    return out;
}

// ---------------------------------------------------------------------------
// Shadow-vertex experiment: mean section vertex count over sampled planes

struct ShadowReport {
    double mean = 0;
    double se = 0;
    int max_count = 0;
    int used = 0;
    int rejected = 0;
};

inline ShadowReport shadow_vertex_experiment(const FacetComplex& fc,
                                             const std::vector<Vec>& sampler_hull, double eta,
                                             int planes, uint64_t seed) {
    PlaneSampler sampler(sampler_hull, eta);
    HPolytope H = hrep_of(fc);
    ShadowReport rep;
    SplitRng rng(seed);
    double sum = 0, sum2 = 0;
    for (int t = 0; t < planes; ++t) {
        auto stream = rng.stream(t);
        auto s = sampler.sample(stream);
        if (!s) {
            ++rep.rejected;
            continue;
        }
        auto sec = plane_section(H, s->point, s->u1, s->u2);
        sum += sec.vertex_count;
        sum2 += double(sec.vertex_count) * sec.vertex_count;
        rep.max_count = std::max(rep.max_count, sec.vertex_count);
        ++rep.used;
    }
    if (rep.used > 0) {
        rep.mean = sum / rep.used;
        const double var = std::max(0.0, sum2 / rep.used - rep.mean * rep.mean);
        rep.se = std::sqrt(var / rep.used);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Plane-quadrature estimate of the codimension-2 perimeter.
// Per-ridge identity:  P[W hits R] = E_a[ (1/A_{d-2}) int_R c(y)/||y-a||^{d-2} dy ]
// with c(y) the sine of the angle between the ray a->y and the ridge plane.
// The per-ridge volume estimate is sum(w * hit) / sum(w * kappa) with kappa
// the per-unit-volume density integral evaluated by node quadrature.

struct QuadratureReport {
    double estimate = 0;
    double se = 0;  // batch standard error
    double exact = 0;
    double ratio = 0;
    int used = 0;
    int rejected = 0;
    double ess = 0;              // effective sample size of the weights
    int ridges_without_hits = 0; // flagged when coverage is too thin
};

// half the surface area of S^{d-2}
inline double half_sphere_area(int d) {
    // |S^{k}| = 2 pi^{(k+1)/2} / Gamma((k+1)/2), k = d-2
    const double k = double(d - 2);
    return std::pow(M_PI, (k + 1.0) / 2.0) / std::tgamma((k + 1.0) / 2.0);
}

namespace detail {

struct RidgeQuadrature {
    std::vector<Vec> nodes;
    std::vector<double> node_weights;  // sum to 1
    std::vector<Vec> basis;            // orthonormal basis of the ridge directions
    double volume = 0;
};

inline RidgeQuadrature ridge_quadrature(const FacetComplex& fc, const RidgeData& ridge,
                                        const std::vector<int>& shared_vertices) {
    RidgeQuadrature q;
    q.volume = ridge.volume;
    std::vector<Vec> pts;
    for (int id : shared_vertices) pts.push_back(fc.points[id]);
    std::vector<Vec> diffs;
    for (size_t i = 1; i < pts.size(); ++i) diffs.push_back(sub(pts[i], pts[0]));
    q.basis = orthonormal_basis(diffs);

    if (fc.dim == 3) {
        // ridge is a segment: 8-point Gauss-Legendre on [p, q]
        static const double gl_x[8] = {-0.9602898564975363, -0.7966664774136267,
                                       -0.5255324099163290, -0.1834346424956498,
                                       0.1834346424956498,  0.5255324099163290,
                                       0.7966664774136267,  0.9602898564975363};
        static const double gl_w[8] = {0.1012285362903763, 0.2223810344533745,
                                       0.3137066458778873, 0.3626837833783620,
                                       0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};
        // endpoints of the segment along its direction
        Vec dir = q.basis.empty() ? Vec(3, 0.0) : q.basis[0];
        double lo = 0, hi = 0;
        for (const Vec& p : pts) {
            const double t = dot(sub(p, pts[0]), dir);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        for (int i = 0; i < 8; ++i) {
            const double t = lo + (hi - lo) * 0.5 * (gl_x[i] + 1.0);
            q.nodes.push_back(add(pts[0], scaled(dir, t)));
            q.node_weights.push_back(gl_w[i] / 2.0);
        }
    } else {
        // centroid plus vertices, equal weights (diagnostic accuracy for d > 3)
        Vec centroid(fc.dim, 0.0);
        for (const Vec& p : pts)
            for (int i = 0; i < fc.dim; ++i) centroid[i] += p[i] / double(pts.size());
        q.nodes.push_back(centroid);
        for (const Vec& p : pts) q.nodes.push_back(p);
        q.node_weights.assign(q.nodes.size(), 1.0 / double(q.nodes.size()));
    }
    return q;
}

// sine of the angle between the ray a->y and the ridge direction space
inline double ray_plane_factor(const std::vector<Vec>& basis, const Vec& u) {
    double proj2 = 0;
    for (const Vec& e : basis) {
        const double c = dot(e, u);
        proj2 += c * c;
    }
    return std::sqrt(std::max(0.0, 1.0 - proj2));
}

}  // namespace detail

inline QuadratureReport quadrature_perimeter_estimate(const FacetComplex& fc,
                                                      const std::vector<Vec>& sampler_hull,
                                                      double eta, int planes, uint64_t seed,
                                                      int batches = 20) {
    QuadratureReport rep;
    rep.exact = codim2_perimeter(fc);
    PlaneSampler sampler(sampler_hull, eta);
    HPolytope H = hrep_of(fc);
    const double area_const = half_sphere_area(fc.dim);

    // ridge lookup by facet pair, precomputed quadrature nodes
    const int nr = fc.ridge_count();
    std::map<std::pair<int, int>, int> ridge_of;
    std::vector<detail::RidgeQuadrature> quad(nr);
    for (int r = 0; r < nr; ++r) {
        const auto& ridge = fc.ridges[r];
        ridge_of[{ridge.f1, ridge.f2}] = r;
        std::vector<int> shared;
        std::set_intersection(fc.facets[ridge.f1].vertices.begin(),
                              fc.facets[ridge.f1].vertices.end(),
                              fc.facets[ridge.f2].vertices.begin(),
                              fc.facets[ridge.f2].vertices.end(), std::back_inserter(shared));
        quad[r] = detail::ridge_quadrature(fc, ridge, shared);
    }

    const int B = std::max(1, batches);
    std::vector<std::vector<double>> hit_sum(B, std::vector<double>(nr, 0.0));
    std::vector<std::vector<double>> kappa_sum(B, std::vector<double>(nr, 0.0));
    double wsum = 0, w2sum = 0;

    SplitRng rng(seed);
    for (int t = 0; t < planes; ++t) {
        auto stream = rng.stream(t);
        auto s = sampler.sample(stream);
        if (!s) {
            ++rep.rejected;
            continue;
        }
        const int b = rep.used % B;
        ++rep.used;
        wsum += s->weight;
        w2sum += s->weight * s->weight;

        auto sec = plane_section(H, s->point, s->u1, s->u2);
        std::vector<char> hit(nr, 0);
        for (const auto& [i, j] : sec.tight_pairs) {
            auto it = ridge_of.find({std::min(i, j), std::max(i, j)});
            if (it != ridge_of.end()) hit[it->second] = 1;
        }
        for (int r = 0; r < nr; ++r) {
            if (hit[r]) hit_sum[b][r] += s->weight;
            // kappa: per-unit-volume hit density at this plane origin
            double k = 0;
            for (size_t n = 0; n < quad[r].nodes.size(); ++n) {
                Vec diff = sub(quad[r].nodes[n], s->point);
                const double rho = norm2(diff);
                if (rho < 1e-12) continue;
                Vec u = scaled(diff, 1.0 / rho);
                const double c = detail::ray_plane_factor(quad[r].basis, u);
                k += quad[r].node_weights[n] * c / std::pow(rho, fc.dim - 2);
            }
            kappa_sum[b][r] += s->weight * k / area_const;
        }
    }
    if (rep.used == 0) throw NumericalError("quadrature: every plane sample was rejected");
    rep.ess = wsum * wsum / std::max(w2sum, 1e-300);

    // total estimate and per-batch jackknife-style spread
    auto total_from = [&](const std::vector<double>& hits, const std::vector<double>& kappas) {
        double total = 0;
        for (int r = 0; r < nr; ++r)
            if (kappas[r] > 0) total += hits[r] / kappas[r];
        return total;
    };
    std::vector<double> hit_all(nr, 0.0), kappa_all(nr, 0.0);
    for (int b = 0; b < B; ++b)
        for (int r = 0; r < nr; ++r) {
            hit_all[r] += hit_sum[b][r];
            kappa_all[r] += kappa_sum[b][r];
        }
    rep.estimate = total_from(hit_all, kappa_all);
    for (int r = 0; r < nr; ++r)
        if (hit_all[r] == 0) ++rep.ridges_without_hits;

    double bsum = 0, bsum2 = 0;
    int bused = 0;
    for (int b = 0; b < B; ++b) {
        const double v = total_from(hit_sum[b], kappa_sum[b]);
        if (v > 0) {
            bsum += v;
            bsum2 += v * v;
            ++bused;
        }
    }
    if (bused > 1) {
        const double mean = bsum / bused;
        const double var = std::max(0.0, bsum2 / bused - mean * mean);
        rep.se = std::sqrt(var / bused);
    }
    rep.ratio = rep.exact > 0 ? rep.estimate / rep.exact : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// E[cos theta] for a uniform sphere direction against a fixed axis,
// normalized by sqrt(d); the acute-angle convention keeps cos nonnegative.

struct IntersectionConstant {
    double c_d = 0;
    double se = 0;
};

inline IntersectionConstant intersection_constant_estimate(int d, int samples, uint64_t seed) {
    if (d < 3) throw InvalidInput("intersection_constant_estimate: d must be at least 3");
    SplitRng rng(seed);
    double sum = 0, sum2 = 0;
    for (int i = 0; i < samples; ++i) {
        Vec u = rng.unit_vector(d);
        const double c = std::fabs(u[0]);
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / samples;
    const double var = std::max(0.0, sum2 / samples - mean * mean);
    IntersectionConstant out;
    out.c_d = std::sqrt(double(d)) * mean;
    out.se = std::sqrt(double(d)) * std::sqrt(var / samples);
    return out;
}

// ---------------------------------------------------------------------------
// Steiner / quermassintegral validation

struct SteinerRow {
    double eps = 0;
    double exact = 0;  // facet-complex expansion (d = 3 only)
    double mc = 0;
    double mc_se = 0;
    bool agree = false;  // |mc - exact| <= 3 se
};

struct SteinerReport {
    std::vector<SteinerRow> rows;
    double surface = 0;
    double chi2_pair_half = 0;  // sum_{S<T} |F_ST| theta_ST / 2 (the eps^2 coefficient)
    double volume = 0;
};

// quermassintegrals of a 3-polytope in the binomial normalization:
// vol(K + eps B) = W0 + 3 W1 eps + 3 W2 eps^2 + W3 eps^3
inline std::array<double, 4> quermassintegrals_3d(const FacetComplex& fc) {
    if (fc.dim != 3) throw InvalidInput("quermassintegrals_3d: dimension must be 3");
    double chi = 0;
    for (const auto& r : fc.ridges) chi += r.volume * r.theta;
    return {volume(fc), surface_area(fc) / 3.0, chi / 6.0, 4.0 * M_PI / 3.0};
}

inline SteinerReport steiner_validate(const FacetComplex& fc, const std::vector<double>& eps_list,
                                      long mc_points, uint64_t seed) {
    SteinerReport rep;
    rep.volume = volume(fc);
    rep.surface = surface_area(fc);
    for (const auto& r : fc.ridges) rep.chi2_pair_half += r.volume * r.theta / 2.0;

    SplitRng rng(seed);
    for (double eps : eps_list) {
        SteinerRow row;
        row.eps = eps;
        if (fc.dim == 3)
            row.exact = rep.volume + rep.surface * eps + rep.chi2_pair_half * eps * eps +
                        (4.0 * M_PI / 3.0) * eps * eps * eps;
        if (eps == 0) {
            row.mc = rep.volume;
            row.agree = true;
            rep.rows.push_back(row);
            continue;
        }
        // bounding box of K + eps B
        const int d = fc.dim;
        Vec lo(d, 1e300), hi(d, -1e300);
        for (const Vec& p : fc.points)
            for (int i = 0; i < d; ++i) {
                lo[i] = std::min(lo[i], p[i] - eps);
                hi[i] = std::max(hi[i], p[i] + eps);
            }
        double box = 1;
        for (int i = 0; i < d; ++i) box *= hi[i] - lo[i];
        long hits = 0;
        auto stream = rng.stream(size_t(eps * 1e6) + 17);
        for (long n = 0; n < mc_points; ++n) {
            Vec x(d);
            for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * stream.next_unit();
            // cheap H-side prefilter before the projection distance
            double worst = -1e300;
            for (const auto& f : fc.facets)
                worst = std::max(worst, dot(f.normal, x) - f.offset);
            if (worst <= 0) {
                ++hits;
                continue;
            }
            if (worst > eps) continue;
            if (distance_to_hull(fc.points, x) <= eps) ++hits;
        }
        const double p = double(hits) / double(mc_points);
        row.mc = box * p;
        row.mc_se = box * std::sqrt(std::max(p * (1 - p), 1e-300) / double(mc_points));
        if (fc.dim == 3) row.agree = std::fabs(row.mc - row.exact) <= 3.0 * row.mc_se;
        rep.rows.push_back(row);
    }
    return rep;
}

// degree-d polynomial fit of MC volumes in eps (least squares) with
// per-coefficient standard errors propagated from the MC noise
struct SteinerFit {
    Vec coefficients;
    Vec coefficient_se;
    bool well_conditioned = false;
};

inline SteinerFit steiner_fit(const std::vector<SteinerRow>& rows, int degree) {
    const int n = int(rows.size());
    const int k = degree + 1;
    SteinerFit fit;
    if (n < k) throw InvalidInput("steiner_fit: not enough sample values");
    Mat X(n, k);
    for (int r = 0; r < n; ++r) {
        double v = 1.0;
        for (int j = 0; j < k; ++j) {
            X(r, j) = v;
            v *= rows[r].eps;
        }
    }
    Mat AtA(k, k);
    Vec Atb(k, 0.0);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) AtA(i, j) += X(r, i) * X(r, j);
            Atb[i] += X(r, i) * rows[r].mc;
        }
    fit.well_conditioned = solve_linear(AtA, Atb, fit.coefficients, 1e-12);
    if (!fit.well_conditioned) return fit;

    // covariance (X'X)^{-1} X' diag(se^2) X (X'X)^{-1}
    Mat inv(k, k);
    for (int c = 0; c < k; ++c) {
        Vec e(k, 0.0), col;
        e[c] = 1.0;
        if (!solve_linear(AtA, e, col, 1e-12)) {
            fit.well_conditioned = false;
            return fit;
        }
        for (int r = 0; r < k; ++r) inv(r, c) = col[r];
    }
    fit.coefficient_se.assign(k, 0.0);
    for (int i = 0; i < k; ++i) {
        double var = 0;
        for (int r = 0; r < n; ++r) {
            double xi = 0;
            for (int j = 0; j < k; ++j) xi += inv(i, j) * X(r, j);
            var += xi * xi * rows[r].mc_se * rows[r].mc_se;
        }
        fit.coefficient_se[i] = std::sqrt(var);
    }
    return fit;
}

// W_j^2 >= W_{j-1} W_{j+1} within a relative slack
struct LogConcavityCheck {
    bool pass = false;
    std::vector<double> margins;  // W_j^2 - W_{j-1} W_{j+1}
};

inline LogConcavityCheck af_logconcavity_check(const std::vector<double>& W,
                                               double rel_slack = 1e-6) {
    LogConcavityCheck out;
    out.pass = true;
    for (size_t j = 1; j + 1 < W.size(); ++j) {
        const double lhs = W[j] * W[j];
        const double rhs = W[j - 1] * W[j + 1];
        out.margins.push_back(lhs - rhs);
        if (lhs < rhs * (1.0 - rel_slack)) out.pass = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end pipeline: two-stage split, assumption checks, facet complex,
// giant component, shadow mean. Assumption failures are recorded as flags;
// the run continues.

struct EndToEndReport {
    uint64_t seed = 0;
    int m = 0, d = 0;
    double sigma = 0, sigma1 = 0, sigma2 = 0;
    double alpha = 0;
    double r_best = 0;
    bool event_b = false, event_c = false;
    bool satisfies_r = false, satisfies_s = false;
    bool stage1_in_2ball = true;  // K1 inside 2B (rescaled when violated)
    double j_avg = 0;
    double pi_mass = 0;
    double chi2_mass = 0;
    int diam_g = 0;
    double certified_cutoff = 0;  // 2 * path cutoff
    double shadow_mean = 0;
    bool sound = false;  // diam_g <= certified cutoff and masses in range
    int facets = 0;
    int source = 0;
    double phi_used = 0;
};

struct EndToEndOptions {
    double split_exponent = 8.0;
    int planes = 2000;
    double phi = 0.25;
    int trials = 2000;
    GiantComponentOptions chain;
};

inline EndToEndReport end_to_end_report(const std::vector<Vec>& base, double sigma,
                                        uint64_t seed, EndToEndOptions opt = {}) {
    EndToEndReport rep;
    rep.seed = seed;
    rep.m = int(base.size());
    rep.d = int(base[0].size());
    rep.sigma = sigma;
    rep.phi_used = opt.phi;

    SplitRng master(seed);
    std::vector<Vec> base2;
    double sigma2 = 0;
    if (sigma > 0) {
        auto split = two_stage_split(sigma, rep.m, opt.split_exponent);
        rep.sigma1 = split.sigma1;
        rep.sigma2 = split.sigma2;
        sigma2 = split.sigma2;
        auto stage1 = sample_instance(base, split.sigma1, master.stream(0).next_u64());
        // K2 = K1 / 2; rescale further if stage-one noise escapes 2B
        double worst = 0;
        for (const Vec& v : stage1.points) worst = std::max(worst, norm2(v));
        double shrink = 2.0;
        if (worst > 2.0) {
            rep.stage1_in_2ball = false;
            shrink = worst;
        }
        for (const Vec& v : stage1.points) base2.push_back(scaled(v, 1.0 / shrink));
    } else {
        base2 = base;  // degenerate noise: the pipeline still runs
    }

    SmoothedInstance inst = sample_instance(base2, sigma2, master.stream(1).next_u64());
    auto assume = check_assumptions(inst);
    rep.alpha = assume.alpha;
    rep.r_best = assume.r_best;
    rep.event_b = assume.event_b;
    rep.event_c = assume.event_c;
    rep.satisfies_r = assume.satisfies_r;
    rep.satisfies_s = assume.satisfies_s;

    FacetComplex fc;
    try {
        fc = facet_complex_of_vpolytope({rep.d, inst.points});
    } catch (const Error&) {
        EnumOptions eopt;
        eopt.allow_merged = true;
        fc = facet_complex_of_vpolytope({rep.d, inst.points}, eopt);
    }
    rep.facets = fc.facet_count();

    ChainModel chain = build_chain(fc);
    rep.j_avg = chain.j_avg;
    auto giant = giant_component(fc, opt.phi, opt.trials, master.stream(2).next_u64(), opt.chain);
    rep.pi_mass = giant.pi_mass;
    rep.chi2_mass = giant.chi2_mass;
    rep.diam_g = giant.bfs_diameter;
    rep.certified_cutoff = giant.certified_bound;
    rep.source = giant.source;

    const double eta = std::max(assume.alpha, 1e-3);
    auto shadow = shadow_vertex_experiment(fc, base2, eta, opt.planes,
                                           master.stream(3).next_u64());
    rep.shadow_mean = shadow.mean;

    rep.sound = double(rep.diam_g) <= rep.certified_cutoff && rep.pi_mass >= 0.0 &&
                rep.pi_mass <= 1.0 + 1e-12 && rep.chi2_mass >= 0.0 &&
                rep.chi2_mass <= 1.0 + 1e-12 && giant.cutoff_sound;
    return rep;
}

}  // namespace polyspec
