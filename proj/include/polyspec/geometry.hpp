#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyspec/config.hpp"
#include "polyspec/linalg.hpp"
#include "polyspec/rng.hpp"

namespace polyspec {

// ---------------------------------------------------------------------------
// Polytope representations

struct VPolytope {
    int dim = 0;
    std::vector<Vec> points;  // labeled by index
};

struct HPolytope {
    int dim = 0;
    Mat A;  // m x dim
    Vec b;  // m
};

struct FacetData {
    std::vector<int> vertices;  // sorted point indices
    Vec normal;                 // outward unit normal
    double offset = 0;          // <normal, x> = offset on the facet
    double volume = 0;          // (d-1)-dimensional
};

struct RidgeData {
    int f1 = 0, f2 = 0;  // facet indices, f1 < f2
    double volume = 0;   // (d-2)-dimensional
    double theta = 0;    // normal angle in (0, pi)
};

struct FacetComplex {
    int dim = 0;
    std::vector<Vec> points;
    std::vector<FacetData> facets;
    std::vector<RidgeData> ridges;
    std::vector<std::vector<int>> neighbors;  // facet -> sorted adjacent facets
    bool simplicial = false;

    int facet_count() const { return int(facets.size()); }
    int ridge_count() const { return int(ridges.size()); }
};

struct EnumOptions {
    bool allow_merged = false;  // opt-in path for non-simplicial inputs
    double side_tol = 1e-9;     // relative to point norms
};

// ---------------------------------------------------------------------------
// Small geometric helpers

inline double point_scale(const std::vector<Vec>& pts) {
    double s = 1.0;
    for (const Vec& p : pts) s = std::max(s, norm_inf(p));
    return s;
}

// affine rank of a point set
inline int affine_rank(const std::vector<Vec>& pts) {
    if (pts.size() <= 1) return 0;
    const int d = int(pts[0].size());
    Mat diff(int(pts.size()) - 1, d);
    for (size_t i = 1; i < pts.size(); ++i)
        for (int j = 0; j < d; ++j) diff(int(i) - 1, j) = pts[i][j] - pts[0][j];
    return matrix_rank(diff, 1e-10);
}

// Generalized cross product: vector orthogonal to the rows of B ((d-1) x d),
// via cofactor expansion. Zero vector when the rows are dependent.
inline Vec null_direction(const Mat& B) {
    const int d = B.cols;
    Vec n(d);
    for (int i = 0; i < d; ++i) {
        Mat minor(d - 1, d - 1);
        for (int r = 0; r < d - 1; ++r) {
            int cc = 0;
            for (int c = 0; c < d; ++c) {
                if (c == i) continue;
                minor(r, cc++) = B(r, c);
            }
        }
        n[i] = ((i % 2) == 0 ? 1.0 : -1.0) * det(minor);
    }
    return n;
}

// Orthonormal basis of span{rows} by modified Gram-Schmidt.
inline std::vector<Vec> orthonormal_basis(const std::vector<Vec>& rows, double tol_rel = 1e-10) {
    std::vector<Vec> basis;
    double scale = 0;
    for (const Vec& r : rows) scale = std::max(scale, norm2(r));
    if (scale == 0) return basis;
    for (const Vec& r : rows) {
        Vec v = r;
        for (const Vec& b : basis) {
            const double c = dot(v, b);
            for (size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
        // second pass for stability
        for (const Vec& b : basis) {
            const double c = dot(v, b);
            for (size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
        const double nv = norm2(v);
        if (nv > tol_rel * scale) basis.push_back(scaled(v, 1.0 / nv));
    }
    return basis;
}

// angle between outward unit normals, in (0, pi)
inline double dihedral_angle(const Vec& u, const Vec& v) {
    if (std::fabs(norm2(u) - 1.0) > 1e-6 || std::fabs(norm2(v) - 1.0) > 1e-6)
        throw InvalidInput("dihedral_angle: normals must be unit length");
    double c = std::clamp(dot(u, v), -1.0, 1.0);
    if (c >= 1.0 - 1e-12)
        throw DegeneracyError("dihedral_angle: parallel normals");
    if (c <= -1.0 + 1e-12)
        throw DegeneracyError(
            "dihedral_angle: antipodal normals (parallel facets cannot intersect)");
    return std::acos(c);
}

// ---------------------------------------------------------------------------
// k-dimensional volume of conv(points) inside its affine hull.
// Fans out from the lowest-index vertex; recursion bottoms at segments.

namespace detail {

struct RawFacet {
    std::vector<int> vertices;
    Vec unit_normal;
    double offset = 0;
};

std::vector<RawFacet> enumerate_facet_hyperplanes(const std::vector<Vec>& pts, int dim,
                                                  const EnumOptions& opt);

inline double vrep_volume(const std::vector<Vec>& pts, int k) {
    if (k == 0) return 1.0;
    if (pts.empty()) return 0.0;
    if (k == 1) {
        // segment inside a line
        Vec dir;
        double best = 0;
        for (size_t i = 1; i < pts.size(); ++i) {
            Vec e = sub(pts[i], pts[0]);
            const double n = norm2(e);
            if (n > best) {
                best = n;
                dir = scaled(e, 1.0 / n);
            }
        }
        if (best == 0) return 0.0;
        double lo = 0, hi = 0;
        for (const Vec& p : pts) {
            const double t = dot(sub(p, pts[0]), dir);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        return hi - lo;
    }

    // coordinates inside the affine hull
    std::vector<Vec> diffs;
    for (size_t i = 1; i < pts.size(); ++i) diffs.push_back(sub(pts[i], pts[0]));
    std::vector<Vec> basis = orthonormal_basis(diffs);
    if (int(basis.size()) < k) return 0.0;
    std::vector<Vec> local(pts.size(), Vec(k, 0.0));
    for (size_t i = 0; i < pts.size(); ++i) {
        Vec e = sub(pts[i], pts[0]);
        for (int j = 0; j < k; ++j) local[i][j] = dot(e, basis[j]);
    }

    if (int(pts.size()) == k + 1) {
        return gram_volume(local);
    }

    EnumOptions opt;
    opt.allow_merged = true;
    std::vector<RawFacet> faces = enumerate_facet_hyperplanes(local, k, opt);
    // pyramid decomposition from vertex 0 (the lowest original index)
    double total = 0;
    for (const RawFacet& f : faces) {
        const double h = std::fabs(dot(f.unit_normal, local[0]) - f.offset);
        if (h <= 0) continue;
        std::vector<Vec> fpts;
        for (int id : f.vertices) fpts.push_back(local[id]);
        total += h * vrep_volume(fpts, k - 1) / double(k);
    }
    return total;
}

inline std::vector<RawFacet> enumerate_facet_hyperplanes(const std::vector<Vec>& pts, int dim,
                                                         const EnumOptions& opt) {
    const int m = int(pts.size());
    const int d = dim;
    if (m < d + 1) throw InvalidInput("facet enumeration: need at least dim+1 points");

    // full-dimensional affine span
    if (affine_rank(pts) < d)
        throw DegeneracyError("facet enumeration: input is not full-dimensional");

    const double scale = point_scale(pts);

    std::map<std::vector<int>, RawFacet> found;  // keyed by sorted vertex set

    std::vector<int> comb(d);
    for (int i = 0; i < d; ++i) comb[i] = i;
    auto advance = [&]() {
        int i = d - 1;
        while (i >= 0 && comb[i] == m - d + i) --i;
        if (i < 0) return false;
        ++comb[i];
        for (int j = i + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
        return true;
    };

    do {
        Mat B(d - 1, d);
        for (int r = 1; r < d; ++r)
            for (int c = 0; c < d; ++c) B(r - 1, c) = pts[comb[r]][c] - pts[comb[0]][c];
        Vec n = (d == 1) ? Vec{1.0} : null_direction(B);
        const double nn = norm2(n);
        if (nn <= 1e-12 * std::pow(scale, d - 1)) continue;  // degenerate subset
        n = scaled(n, 1.0 / nn);
        const double off = dot(n, pts[comb[0]]);

        int pos = 0, neg = 0;
        std::vector<int> on;
        bool skip = false;
        for (int j = 0; j < m && !skip; ++j) {
            const double s = dot(n, pts[j]) - off;
            const double tol = opt.side_tol * std::max(1.0, norm2(pts[j]));
            if (s > tol)
                ++pos;
            else if (s < -tol)
                ++neg;
            else
                on.push_back(j);
            if (pos > 0 && neg > 0) skip = true;
        }
        if (skip) continue;

        if (int(on.size()) > d && !opt.allow_merged) {
            std::string ids;
            for (int id : on) ids += std::to_string(id) + " ";
            throw DegeneracyError(
                "facet enumeration: near-degenerate side test, coplanar points { " + ids +
                "}; use the merged path for non-simplicial inputs");
        }

        RawFacet f;
        f.vertices = on;  // already sorted
        if (pos > 0) {
            f.unit_normal = scaled(n, -1.0);
            f.offset = -off;
        } else {
            f.unit_normal = n;
            f.offset = off;
        }
        found.emplace(f.vertices, std::move(f));
    } while (advance());

    std::vector<RawFacet> out;
    out.reserve(found.size());
    for (auto& [key, f] : found) out.push_back(std::move(f));
    return out;
}

// Shared completion: volumes, ridges, angles, adjacency, sanity checks.
inline FacetComplex complete_complex(const std::vector<Vec>& pts, int dim,
                                     std::vector<RawFacet> raw, bool simplicial_input) {
    FacetComplex fc;
    fc.dim = dim;
    fc.points = pts;
    fc.simplicial = simplicial_input;
    const int d = dim;

    for (const RawFacet& rf : raw) {
        FacetData f;
        f.vertices = rf.vertices;
        f.normal = rf.unit_normal;
        f.offset = rf.offset;
        std::vector<Vec> fpts;
        for (int id : f.vertices) fpts.push_back(pts[id]);
        if (simplicial_input && int(fpts.size()) == d)
            f.volume = gram_volume(fpts);
        else
            f.volume = vrep_volume(fpts, d - 1);
        if (!(f.volume > 0))
            throw DegeneracyError("facet complex: facet with nonpositive volume");
        fc.facets.push_back(std::move(f));
    }
    const int nf = fc.facet_count();
    if (nf < 2) throw DegeneracyError("facet complex: fewer than two facets");

    if (simplicial_input) {
        // ridges are (d-1)-subsets shared by exactly two facets
        std::map<std::vector<int>, std::vector<int>> by_subset;
        for (int fi = 0; fi < nf; ++fi) {
            const auto& vs = fc.facets[fi].vertices;
            for (int drop = 0; drop < int(vs.size()); ++drop) {
                std::vector<int> key;
                for (int i = 0; i < int(vs.size()); ++i)
                    if (i != drop) key.push_back(vs[i]);
                by_subset[key].push_back(fi);
            }
        }
        for (const auto& [key, fs] : by_subset) {
            if (fs.size() != 2)
                throw DegeneracyError(
                    "facet complex: a ridge candidate is not shared by exactly two facets");
            RidgeData r;
            r.f1 = std::min(fs[0], fs[1]);
            r.f2 = std::max(fs[0], fs[1]);
            std::vector<Vec> rpts;
            for (int id : key) rpts.push_back(pts[id]);
            r.volume = gram_volume(rpts);
            if (!(r.volume > 0))
                throw DegeneracyError("facet complex: degenerate ridge volume");
            r.theta = dihedral_angle(fc.facets[r.f1].normal, fc.facets[r.f2].normal);
            fc.ridges.push_back(std::move(r));
        }
    } else {
        // merged path: adjacency via the affine rank of shared vertex sets
        for (int i = 0; i < nf; ++i) {
            for (int j = i + 1; j < nf; ++j) {
                std::vector<int> shared;
                std::set_intersection(fc.facets[i].vertices.begin(), fc.facets[i].vertices.end(),
                                      fc.facets[j].vertices.begin(), fc.facets[j].vertices.end(),
                                      std::back_inserter(shared));
                if (int(shared.size()) < d - 1) continue;
                std::vector<Vec> spts;
                for (int id : shared) spts.push_back(pts[id]);
                if (affine_rank(spts) != d - 2) continue;
                RidgeData r;
                r.f1 = i;
                r.f2 = j;
                r.volume = vrep_volume(spts, d - 2);
                if (!(r.volume > 0))
                    throw DegeneracyError("facet complex: degenerate ridge volume");
                r.theta = dihedral_angle(fc.facets[i].normal, fc.facets[j].normal);
                fc.ridges.push_back(std::move(r));
            }
        }
    }

    std::sort(fc.ridges.begin(), fc.ridges.end(), [](const RidgeData& a, const RidgeData& b) {
        return std::pair(a.f1, a.f2) < std::pair(b.f1, b.f2);
    });

    fc.neighbors.assign(nf, {});
    for (const RidgeData& r : fc.ridges) {
        fc.neighbors[r.f1].push_back(r.f2);
        fc.neighbors[r.f2].push_back(r.f1);
    }
    for (auto& nb : fc.neighbors) std::sort(nb.begin(), nb.end());

    // connectivity
    std::vector<char> seen(nf, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int f = stack.back();
        stack.pop_back();
        for (int g : fc.neighbors[f])
            if (!seen[g]) {
                seen[g] = 1;
                ++count;
                stack.push_back(g);
            }
    }
    if (count != nf) throw DegeneracyError("facet complex: facet graph is disconnected");
    return fc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Facet complex of a V-polytope (brute force over d-subsets).

inline FacetComplex facet_complex_of_vpolytope(const VPolytope& K, EnumOptions opt = {}) {
    if (int(K.points.size()) < K.dim + 1)
        throw InvalidInput("vpolytope: need at least dim+1 points");
    auto raw = detail::enumerate_facet_hyperplanes(K.points, K.dim, opt);
    bool simplicial = true;
    for (const auto& f : raw)
        if (int(f.vertices.size()) != K.dim) simplicial = false;
    return detail::complete_complex(K.points, K.dim, std::move(raw), simplicial);
}

// ---------------------------------------------------------------------------
// Vertex enumeration of an H-polytope (brute force over d-subsets of rows).

struct VertexSet {
    VPolytope verts;
    std::vector<std::vector<int>> tight;  // constraints active at each vertex
};

inline bool hpolytope_bounded(const HPolytope& P, Vec* box_radius = nullptr) {
    const int d = P.dim;
    if (box_radius) box_radius->assign(d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (double sgn : {1.0, -1.0}) {
            LinearProgram lp;
            lp.A = P.A;
            lp.b = P.b;
            lp.c.assign(d, 0.0);
            lp.c[i] = sgn;
            auto r = solve_lp(lp);
            if (r.status == LpResult::Status::Unbounded) return false;
            if (r.status == LpResult::Status::Infeasible)
                throw InvalidInput("hpolytope: infeasible system");
            if (box_radius) (*box_radius)[i] = std::max((*box_radius)[i], std::fabs(r.value));
        }
    }
    return true;
}

inline VertexSet vertices_of_hpolytope(const HPolytope& P) {
    const int m = P.A.rows, d = P.dim;
    if (m < d) throw InvalidInput("hpolytope: fewer constraints than dimensions");
    if (!hpolytope_bounded(P)) throw InvalidInput("hpolytope: unbounded");

    double scale = 1.0;
    for (double v : P.A.a) scale = std::max(scale, std::fabs(v));
    for (double v : P.b) scale = std::max(scale, std::fabs(v));

    VertexSet out;
    out.verts.dim = d;

    std::vector<int> comb(d);
    for (int i = 0; i < d; ++i) comb[i] = i;
    auto advance = [&]() {
        int i = d - 1;
        while (i >= 0 && comb[i] == m - d + i) --i;
        if (i < 0) return false;
        ++comb[i];
        for (int j = i + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
        return true;
    };
    do {
        Mat S(d, d);
        Vec rhs(d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) S(i, j) = P.A(comb[i], j);
            rhs[i] = P.b[comb[i]];
        }
        Vec x;
        if (!solve_linear(S, rhs, x, 1e-11)) continue;
        bool feasible = true;
        double xnorm = norm2(x);
        for (int i = 0; i < m && feasible; ++i) {
            double s = 0;
            for (int j = 0; j < d; ++j) s += P.A(i, j) * x[j];
            if (s > P.b[i] + tolerances().abs_tol * std::max(1.0, scale * xnorm)) feasible = false;
        }
        if (!feasible) continue;
        bool dup = false;
        for (const Vec& v : out.verts.points)
            if (norm_inf(sub(v, x)) <= 1e-8 * std::max(1.0, xnorm)) {
                dup = true;
                break;
            }
        if (!dup) out.verts.points.push_back(x);
    } while (advance());

    if (int(out.verts.points.size()) < d + 1)
        throw DegeneracyError("hpolytope: not full-dimensional (too few vertices)");
    if (affine_rank(out.verts.points) < d)
        throw DegeneracyError("hpolytope: vertex set is not full-dimensional");

    for (const Vec& v : out.verts.points) {
        std::vector<int> t;
        for (int i = 0; i < m; ++i) {
            double s = 0;
            for (int j = 0; j < d; ++j) s += P.A(i, j) * v[j];
            const double row_scale = std::max({1.0, std::fabs(P.b[i]), norm2(P.A.row(i)) * norm2(v)});
            if (std::fabs(s - P.b[i]) <= 1e-7 * row_scale) t.push_back(i);
        }
        out.tight.push_back(std::move(t));
    }
    return out;
}

// every vertex lies on exactly d facets
inline bool is_simple(const VertexSet& vs, int dim) {
    for (const auto& t : vs.tight)
        if (int(t.size()) != dim) return false;
    return true;
}

// Facet complex of an H-polytope, built from its own vertices and
// constraint incidence. Constraint i must support a (d-1)-dimensional face
// for every i (minimal system); others are reported.
struct HComplexResult {
    FacetComplex fc;
    std::vector<int> facet_constraint;  // facet index -> constraint row
    std::vector<int> redundant;         // constraints supporting no facet
    VertexSet vertices;
};

inline HComplexResult facet_complex_of_hpolytope(const HPolytope& P) {
    HComplexResult out;
    out.vertices = vertices_of_hpolytope(P);
    const int m = P.A.rows, d = P.dim;
    const auto& pts = out.vertices.verts.points;

    std::vector<detail::RawFacet> raw;
    std::map<std::vector<int>, int> facet_owner;  // duplicate hyperplanes are redundant
    for (int i = 0; i < m; ++i) {
        std::vector<int> vs;
        for (int v = 0; v < int(pts.size()); ++v)
            if (std::find(out.vertices.tight[v].begin(), out.vertices.tight[v].end(), i) !=
                out.vertices.tight[v].end())
                vs.push_back(v);
        bool facet = int(vs.size()) >= d;
        if (facet) {
            std::vector<Vec> sub;
            for (int id : vs) sub.push_back(pts[id]);
            facet = affine_rank(sub) == d - 1;
        }
        if (facet) {
            auto [it, inserted] = facet_owner.emplace(vs, i);
            if (!inserted) facet = false;
        }
        if (!facet) {
            out.redundant.push_back(i);
            continue;
        }
        detail::RawFacet f;
        f.vertices = vs;
        const double an = norm2(P.A.row(i));
        f.unit_normal = scaled(P.A.row(i), 1.0 / an);
        f.offset = P.b[i] / an;
        raw.push_back(std::move(f));
        out.facet_constraint.push_back(i);
    }
    bool simplicial = true;
    for (const auto& f : raw)
        if (int(f.vertices.size()) != d) simplicial = false;
    out.fc = detail::complete_complex(pts, d, std::move(raw), simplicial);
    return out;
}

// ---------------------------------------------------------------------------
// Polarity (origin must be strictly interior)

inline HPolytope polar(const VPolytope& K) {
    HPolytope P;
    P.dim = K.dim;
    P.A = Mat(int(K.points.size()), K.dim);
    P.b.assign(K.points.size(), 1.0);
    for (int i = 0; i < int(K.points.size()); ++i)
        for (int j = 0; j < K.dim; ++j) P.A(i, j) = K.points[i][j];
    if (!hpolytope_bounded(P))
        throw InvalidInput("polar: origin is not interior to the V-polytope "
                           "(consider recentering at the Chebyshev center)");
    return P;
}

inline VPolytope polar(const HPolytope& P) {
    VPolytope K;
    K.dim = P.dim;
    for (int i = 0; i < P.A.rows; ++i) {
        if (P.b[i] <= 1e-12)
            throw InvalidInput("polar: requires b > 0 (origin strictly interior); "
                               "consider recentering at the Chebyshev center");
        K.points.push_back(scaled(P.A.row(i), 1.0 / P.b[i]));
    }
    if (!hpolytope_bounded(P)) throw InvalidInput("polar: H-polytope is unbounded");
    return K;
}

// ---------------------------------------------------------------------------
// Chebyshev center / inradius

struct Inradius {
    double r = 0;
    Vec center;
};

inline Inradius inradius(const HPolytope& P) {
    const int m = P.A.rows, d = P.dim;
    LinearProgram lp;
    lp.A = Mat(m, d + 1);
    lp.b = P.b;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) lp.A(i, j) = P.A(i, j);
        lp.A(i, d) = norm2(P.A.row(i));
    }
    lp.c.assign(d + 1, 0.0);
    lp.c[d] = 1.0;
    auto r = solve_lp(lp);
    if (r.status == LpResult::Status::Unbounded)
        throw InvalidInput("inradius: polytope is unbounded");
    if (!r.optimal() || r.value < -tolerances().abs_tol)
        throw InvalidInput("inradius: empty polytope");
    Inradius out;
    out.r = std::max(r.value, 0.0);
    out.center.assign(r.x.begin(), r.x.begin() + d);
    return out;
}

// largest r with rB (centered at the origin) inside the polytope
inline double origin_ball_radius(const FacetComplex& fc) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& f : fc.facets) r = std::min(r, f.offset);
    return std::max(r, 0.0);
}

struct RecenterResult {
    HPolytope P;
    Vec shift;  // applied translation: x -> x - shift
};

// Toolkit convention (not prescribed anywhere): translate the Chebyshev
// center to the origin.
inline RecenterResult recenter_chebyshev(const HPolytope& P) {
    auto inr = inradius(P);
    RecenterResult out;
    out.P = P;
    out.shift = inr.center;
    for (int i = 0; i < P.A.rows; ++i) {
        double s = 0;
        for (int j = 0; j < P.dim; ++j) s += P.A(i, j) * inr.center[j];
        out.P.b[i] = P.b[i] - s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Containment

struct Containment {
    bool contained = false;
    double margin = 0;  // worst violation; <= 0 when contained
};

inline Containment containment_check(const VPolytope& inner, const HPolytope& outer) {
    Containment out;
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vec& v : inner.points) {
        for (int i = 0; i < outer.A.rows; ++i) {
            double s = 0;
            for (int j = 0; j < outer.dim; ++j) s += outer.A(i, j) * v[j];
            worst = std::max(worst, (s - outer.b[i]) / norm2(outer.A.row(i)));
        }
    }
    out.margin = worst;
    out.contained = worst <= tolerances().abs_tol;
    return out;
}

// membership via LP: min t with |sum(lambda p) - x|_inf <= t, lambda in simplex
inline double hull_membership_margin(const std::vector<Vec>& hull, const Vec& x) {
    const int m = int(hull.size());
    const int d = int(x.size());
    // variables: lambda (m), t (1)
    const int rows = 2 * d + 2 + m;
    LinearProgram lp;
    lp.A = Mat(rows, m + 1);
    lp.b.assign(rows, 0.0);
    for (int r = 0; r < d; ++r) {
        for (int i = 0; i < m; ++i) {
            lp.A(2 * r, i) = hull[i][r];
            lp.A(2 * r + 1, i) = -hull[i][r];
        }
        lp.A(2 * r, m) = -1.0;
        lp.A(2 * r + 1, m) = -1.0;
        lp.b[2 * r] = x[r];
        lp.b[2 * r + 1] = -x[r];
    }
    for (int i = 0; i < m; ++i) {
        lp.A(2 * d, i) = 1.0;
        lp.A(2 * d + 1, i) = -1.0;
    }
    lp.b[2 * d] = 1.0;
    lp.b[2 * d + 1] = -1.0;
    for (int i = 0; i < m; ++i) lp.A(2 * d + 2 + i, i) = -1.0;  // lambda >= 0
    lp.c.assign(m + 1, 0.0);
    lp.c[m] = 1.0;
    lp.sense = LinearProgram::Sense::Min;
    auto r = solve_lp(lp);
    if (!r.optimal()) throw NumericalError("hull_membership_margin: LP did not solve");
    return r.value;
}

inline Containment containment_check(const VPolytope& inner, const VPolytope& outer) {
    Containment out;
    double worst = 0;
    for (const Vec& v : inner.points)
        worst = std::max(worst, hull_membership_margin(outer.points, v));
    out.margin = worst;
    out.contained = worst <= 10 * tolerances().abs_tol;
    return out;
}

// ---------------------------------------------------------------------------
// Integer data: exact minors over [A|b]

struct IntegerData {
    long long delta = 0;      // max |d x d minor of [A|b]|
    long long norm_a = 0;     // ||A||_inf (max magnitude entry)
    long long norm_b = 0;
    long long delta_dm1 = 0;  // max |(d-1) x (d-1) minor of A|
};

namespace detail {

inline __int128 checked_mul(__int128 a, __int128 b) {
    if (a == 0 || b == 0) return 0;
    __int128 r = a * b;
    if (r / b != a)
        throw NumericalError("integer_data: 128-bit overflow in exact minor; "
                             "use a smaller instance");
    return r;
}

// Bareiss fraction-free determinant; exact for integer input.
inline __int128 int_det(std::vector<std::vector<__int128>> M) {
    const int n = int(M.size());
    if (n == 0) return 1;
    __int128 sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (M[k][k] == 0) {
            int swap_row = -1;
            for (int i = k + 1; i < n; ++i)
                if (M[i][k] != 0) {
                    swap_row = i;
                    break;
                }
            if (swap_row < 0) return 0;
            std::swap(M[k], M[swap_row]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                __int128 v = checked_mul(M[i][j], M[k][k]) - checked_mul(M[i][k], M[k][j]);
                M[i][j] = v / prev;  // exact division
            }
            M[i][k] = 0;
        }
        prev = M[k][k];
    }
    return sign * M[n - 1][n - 1];
}

inline long long int128_to_ll(__int128 v) {
    if (v > __int128(INT64_MAX) || v < -__int128(INT64_MAX))
        throw NumericalError("integer_data: minor exceeds 64-bit range");
    return (long long)(v);
}

template <typename F>
void for_each_subset(int n, int k, F&& fn) {
    if (k > n || k < 0) return;
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    for (;;) {
        fn(comb);
        int i = k - 1;
        while (i >= 0 && comb[i] == n - k + i) --i;
        if (i < 0) return;
        ++comb[i];
        for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
}

}  // namespace detail

inline IntegerData integer_data(const std::vector<std::vector<long long>>& A,
                                const std::vector<long long>& b) {
    const int m = int(A.size());
    if (m == 0) throw InvalidInput("integer_data: empty system");
    const int d = int(A[0].size());
    if (int(b.size()) != m) throw InvalidInput("integer_data: size mismatch");

    IntegerData out;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) out.norm_a = std::max(out.norm_a, std::llabs(A[i][j]));
    for (long long v : b) out.norm_b = std::max(out.norm_b, std::llabs(v));

    // d x d minors of [A|b]: d-subsets of rows, d-subsets of the d+1 columns
    detail::for_each_subset(m, d, [&](const std::vector<int>& rows) {
        detail::for_each_subset(d + 1, d, [&](const std::vector<int>& cols) {
            std::vector<std::vector<__int128>> M(d, std::vector<__int128>(d));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const int c = cols[j];
                    M[i][j] = (c < d) ? __int128(A[rows[i]][c]) : __int128(b[rows[i]]);
                }
            __int128 v = detail::int_det(std::move(M));
            if (v < 0) v = -v;
            out.delta = std::max(out.delta, detail::int128_to_ll(v));
        });
    });

    // (d-1) x (d-1) minors of A
    if (d >= 2) {
        detail::for_each_subset(m, d - 1, [&](const std::vector<int>& rows) {
            detail::for_each_subset(d, d - 1, [&](const std::vector<int>& cols) {
                std::vector<std::vector<__int128>> M(d - 1, std::vector<__int128>(d - 1));
                for (int i = 0; i < d - 1; ++i)
                    for (int j = 0; j < d - 1; ++j) M[i][j] = A[rows[i]][cols[j]];
                __int128 v = detail::int_det(std::move(M));
                if (v < 0) v = -v;
                out.delta_dm1 = std::max(out.delta_dm1, detail::int128_to_ll(v));
            });
        });
    } else {
        out.delta_dm1 = 1;
    }
    return out;
}

// round-and-verify conversion for H-polytopes claiming integer data
inline void integral_hpolytope(const HPolytope& P, std::vector<std::vector<long long>>& A,
                               std::vector<long long>& b) {
    A.assign(P.A.rows, std::vector<long long>(P.dim));
    b.assign(P.A.rows, 0);
    for (int i = 0; i < P.A.rows; ++i) {
        for (int j = 0; j < P.dim; ++j) {
            const double v = P.A(i, j);
            const double r = std::round(v);
            if (std::fabs(v - r) > 1e-9)
                throw InvalidInput("integer_data: non-integral entry in A");
            A[i][j] = (long long)(r);
        }
        const double r = std::round(P.b[i]);
        if (std::fabs(P.b[i] - r) > 1e-9)
            throw InvalidInput("integer_data: non-integral entry in b");
        b[i] = (long long)(r);
    }
}

// ---------------------------------------------------------------------------
// Metric sums

// H-representation assembled from a facet complex (unit normals)
inline HPolytope hrep_of(const FacetComplex& fc) {
    HPolytope P;
    P.dim = fc.dim;
    P.A = Mat(fc.facet_count(), fc.dim);
    P.b.resize(fc.facet_count());
    for (int i = 0; i < fc.facet_count(); ++i) {
        for (int c = 0; c < fc.dim; ++c) P.A(i, c) = fc.facets[i].normal[c];
        P.b[i] = fc.facets[i].offset;
    }
    return P;
}

inline double codim2_perimeter(const FacetComplex& fc) {
    double s = 0;
    for (const RidgeData& r : fc.ridges) s += r.volume;
    return s;
}

inline double surface_area(const FacetComplex& fc) {
    double s = 0;
    for (const FacetData& f : fc.facets) s += f.volume;
    return s;
}

// divergence theorem; offsets are signed so any origin works
inline double volume(const FacetComplex& fc) {
    double s = 0;
    for (const FacetData& f : fc.facets) s += f.offset * f.volume;
    return s / fc.dim;
}

// ---------------------------------------------------------------------------
// Canonical generators

inline VPolytope make_cube_v(int d) {
    if (d < 1 || d > 16) throw InvalidInput("make_cube_v: dimension out of range");
    VPolytope K;
    K.dim = d;
    for (int mask = 0; mask < (1 << d); ++mask) {
        Vec p(d);
        for (int j = 0; j < d; ++j) p[j] = (mask >> j) & 1 ? 1.0 : -1.0;
        K.points.push_back(std::move(p));
    }
    return K;
}

inline HPolytope make_cube_h(int d) {
    HPolytope P;
    P.dim = d;
    P.A = Mat(2 * d, d);
    P.b.assign(2 * d, 1.0);
    for (int i = 0; i < d; ++i) {
        P.A(2 * i, i) = 1.0;
        P.A(2 * i + 1, i) = -1.0;
    }
    return P;
}

inline VPolytope make_cross_v(int d) {
    VPolytope K;
    K.dim = d;
    for (int i = 0; i < d; ++i) {
        Vec p(d, 0.0), q(d, 0.0);
        p[i] = 1.0;
        q[i] = -1.0;
        K.points.push_back(p);
        K.points.push_back(q);
    }
    return K;
}

// regular d-simplex centered at the origin, edge length given
inline VPolytope make_simplex_v(int d, double edge = 1.0) {
    std::vector<Vec> lifted;  // e_i - centroid in R^{d+1}
    for (int i = 0; i <= d; ++i) {
        Vec q(d + 1, -1.0 / (d + 1));
        q[i] += 1.0;
        lifted.push_back(std::move(q));
    }
    std::vector<Vec> span;
    for (int i = 0; i < d; ++i) {
        Vec e(d + 1, 0.0);
        e[i] = 1.0;
        e[d] = -1.0;
        span.push_back(std::move(e));
    }
    auto basis = orthonormal_basis(span);
    VPolytope K;
    K.dim = d;
    const double s = edge / std::sqrt(2.0);  // lifted edges have length sqrt(2)
    for (const Vec& q : lifted) {
        Vec p(d);
        for (int j = 0; j < d; ++j) p[j] = s * dot(q, basis[j]);
        K.points.push_back(std::move(p));
    }
    return K;
}

// seeded points on the unit sphere; redraws until the origin is interior
inline VPolytope make_random_sphere_v(int m, int d, uint64_t seed) {
    if (m < d + 1) throw InvalidInput("make_random_sphere_v: need at least d+1 points");
    SplitRng rng(seed);
    for (int attempt = 0; attempt < 200; ++attempt) {
        auto stream = rng.stream(attempt);
        VPolytope K;
        K.dim = d;
        for (int i = 0; i < m; ++i) K.points.push_back(stream.unit_vector(d));
        HPolytope pol;
        pol.dim = d;
        pol.A = Mat(m, d);
        pol.b.assign(m, 1.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < d; ++j) pol.A(i, j) = K.points[i][j];
        if (hpolytope_bounded(pol)) return K;
    }
    throw NumericalError("make_random_sphere_v: origin not interior after 200 attempts");
}

// ---------------------------------------------------------------------------
// Euclidean projection onto conv(points): Wolfe's min-norm-point method.

struct HullProjection {
    double dist = 0;
    Vec point;
};

inline HullProjection project_to_hull(const std::vector<Vec>& pts, const Vec& x) {
    const int m = int(pts.size());
    if (m == 0) throw InvalidInput("project_to_hull: empty hull");
    std::vector<Vec> q(m);
    double scale2 = 0;
    for (int i = 0; i < m; ++i) {
        q[i] = sub(pts[i], x);
        scale2 = std::max(scale2, dot(q[i], q[i]));
    }
    if (scale2 == 0) return {0.0, x};

    int start = 0;
    double best = dot(q[0], q[0]);
    for (int i = 1; i < m; ++i) {
        const double n = dot(q[i], q[i]);
        if (n < best) {
            best = n;
            start = i;
        }
    }
    std::vector<int> corral = {start};
    Vec lambda = {1.0};

    auto combination = [&](const std::vector<int>& ids, const Vec& w) {
        Vec z(x.size(), 0.0);
        for (size_t i = 0; i < ids.size(); ++i)
            for (size_t j = 0; j < z.size(); ++j) z[j] += w[i] * q[ids[i]][j];
        return z;
    };

    const double gap_tol = 1e-13 * scale2;
    for (int major = 0; major < 1000; ++major) {
        Vec z = combination(corral, lambda);
        const double zz = dot(z, z);
        int jbest = -1;
        double vbest = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            const double v = dot(z, q[j]);
            if (v < vbest - 1e-15) {
                vbest = v;
                jbest = j;
            }
        }
        if (vbest >= zz - gap_tol) break;
        if (std::find(corral.begin(), corral.end(), jbest) != corral.end()) break;
        corral.push_back(jbest);
        lambda.push_back(0.0);

        // minor loop: affine minimizer over the corral, stepping back to the
        // simplex boundary while negative weights appear
        for (int minor = 0; minor < 200; ++minor) {
            const int k = int(corral.size());
            Mat S(k + 1, k + 1);
            Vec rhs(k + 1, 0.0);
            for (int i = 0; i < k; ++i) S(0, i + 1) = 1.0;
            for (int i = 0; i < k; ++i) S(i + 1, 0) = 1.0;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) S(i + 1, j + 1) = dot(q[corral[i]], q[corral[j]]);
            rhs[0] = 1.0;
            Vec sol;
            bool ok = solve_linear(S, rhs, sol, 1e-13);
            if (!ok) {
                // dependent corral: drop the smallest-weight member
                int drop = 0;
                for (int i = 1; i < k; ++i)
                    if (lambda[i] < lambda[drop]) drop = i;
                corral.erase(corral.begin() + drop);
                lambda.erase(lambda.begin() + drop);
                continue;
            }
            Vec alpha(sol.begin() + 1, sol.end());
            double amin = *std::min_element(alpha.begin(), alpha.end());
            if (amin > -1e-12) {
                lambda = alpha;
                break;
            }
            double theta = 1.0;
            for (int i = 0; i < k; ++i)
                if (alpha[i] < 1e-14) {
                    const double t = lambda[i] / (lambda[i] - alpha[i]);
                    theta = std::min(theta, t);
                }
            for (int i = 0; i < k; ++i) lambda[i] = (1 - theta) * lambda[i] + theta * alpha[i];
            for (int i = k - 1; i >= 0; --i)
                if (lambda[i] <= 1e-14 && int(corral.size()) > 1) {
                    corral.erase(corral.begin() + i);
                    lambda.erase(lambda.begin() + i);
                }
        }
    }
    Vec z = combination(corral, lambda);
    HullProjection out;
    out.dist = norm2(z);
    out.point = add(x, z);
    return out;
}

inline double distance_to_hull(const std::vector<Vec>& pts, const Vec& x) {
    return project_to_hull(pts, x).dist;
}

}  // namespace polyspec
