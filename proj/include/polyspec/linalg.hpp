#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "polyspec/config.hpp"

namespace polyspec {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double m = 0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec scaled(const Vec& a, double t) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * t;
    return r;
}

// Dense row-major matrix, no ownership tricks.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(size_t(r) * c, fill) {}

    double& operator()(int i, int j) { return a[size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return a[size_t(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Vec row(int i) const {
        Vec r(cols);
        for (int j = 0; j < cols; ++j) r[j] = (*this)(i, j);
        return r;
    }

    Vec col(int j) const {
        Vec c(rows);
        for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
        return c;
    }

    double max_abs() const {
        double m = 0;
        for (double x : a) m = std::max(m, std::fabs(x));
        return m;
    }
};

inline Vec mat_vec(const Mat& m, const Vec& x) {
    Vec y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline Vec vec_mat(const Vec& x, const Mat& m) {
    Vec y(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const double xi = x[i];
        if (xi == 0) continue;
        for (int j = 0; j < m.cols; ++j) y[j] += xi * m(i, j);
    }
    return y;
}

// Symmetric matrix; set() writes both triangles so (i,j) == (j,i) holds exactly.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), a_(size_t(n) * n, 0.0) {}

    int size() const { return n_; }

    double operator()(int i, int j) const { return a_[size_t(i) * n_ + j]; }

    void set(int i, int j, double v) {
        a_[size_t(i) * n_ + j] = v;
        a_[size_t(j) * n_ + i] = v;
    }

    void add_to(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

    double max_abs() const {
        double m = 0;
        for (double x : a_) m = std::max(m, std::fabs(x));
        return m;
    }

    Vec apply(const Vec& x) const {
        Vec y(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double s = 0;
            const double* row = a_.data() + size_t(i) * n_;
            for (int j = 0; j < n_; ++j) s += row[j] * x[j];
            y[i] = s;
        }
        return y;
    }

  private:
    int n_ = 0;
    std::vector<double> a_;
};

// Eigenvalues ascending; eigenvectors.col(i) pairs with eigenvalues[i].
struct Spectrum {
    Vec eigenvalues;
    Mat eigenvectors;
};

struct EighOptions {
    int max_sweeps = 64;
    double off_tol = 1e-14;  // relative to the Frobenius norm
};

// Cyclic Jacobi. Unconditionally stable on symmetric input; instance sizes
// here (at most a few thousand facets) make the O(n^3) sweeps acceptable.
inline Spectrum eigh(const SymMatrix& M, EighOptions opt = {}) {
    const int n = M.size();
    if (n < 1) throw InvalidInput("eigh: empty matrix");

    std::vector<double> A(size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[size_t(i) * n + j] = M(i, j);
    Mat V = Mat::identity(n);

    auto off_norm = [&]() {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += A[size_t(i) * n + j] * A[size_t(i) * n + j];
        return std::sqrt(2.0 * s);
    };

    double fro = 0;
    for (double x : A) fro += x * x;
    fro = std::sqrt(fro);
    const double target = std::max(opt.off_tol * fro, 1e-300);

    bool converged = (off_norm() <= target || n == 1);
    for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A[size_t(p) * n + q];
                if (std::fabs(apq) <= 1e-3 * target / n) continue;
                const double app = A[size_t(p) * n + p];
                const double aqq = A[size_t(q) * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = A[size_t(k) * n + p];
                    const double akq = A[size_t(k) * n + q];
                    A[size_t(k) * n + p] = c * akp - s * akq;
                    A[size_t(k) * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A[size_t(p) * n + k];
                    const double aqk = A[size_t(q) * n + k];
                    A[size_t(p) * n + k] = c * apk - s * aqk;
                    A[size_t(q) * n + k] = s * apk + c * aqk;
                }
                // keep the pair symmetric to rounding
                A[size_t(p) * n + q] = A[size_t(q) * n + p] =
                    0.5 * (A[size_t(p) * n + q] + A[size_t(q) * n + p]);

                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off_norm() <= target;
    }
    if (!converged)
        throw NumericalError("eigh: Jacobi sweeps did not converge, off-diagonal residual " +
                             std::to_string(off_norm() / std::max(fro, 1e-300)));

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return A[size_t(i) * n + i] < A[size_t(j) * n + j]; });

    Spectrum sp;
    sp.eigenvalues.resize(n);
    sp.eigenvectors = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        sp.eigenvalues[j] = A[size_t(idx[j]) * n + idx[j]];
        for (int i = 0; i < n; ++i) sp.eigenvectors(i, j) = V(i, idx[j]);
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Linear programming

struct LinearProgram {
    enum class Sense { Max, Min };
    Mat A;  // m x n
    Vec b;  // m
    Vec c;  // n
    Sense sense = Sense::Max;
};

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    double value = 0;
    Vec x;

    bool optimal() const { return status == Status::Optimal; }
};

namespace detail {

// Dense two-phase tableau simplex. Bland's rule throughout, so termination
// holds under degeneracy; degenerate polytopes are expected inputs.
class SimplexTableau {
  public:
    SimplexTableau(const Mat& A, const Vec& b, const Vec& cmax) : m_(A.rows), nx_(A.cols) {
        // columns: [x+ (nx), x- (nx), slack (m), artificial (as needed)]
        nslack_ = m_;
        ncols_ = 2 * nx_ + nslack_;
        std::vector<int> art_rows;
        for (int i = 0; i < m_; ++i)
            if (b[i] < 0) art_rows.push_back(i);
        nart_ = int(art_rows.size());
        total_ = ncols_ + nart_;

        T_.assign(size_t(m_) * (total_ + 1), 0.0);
        basis_.resize(m_);

        int art_next = ncols_;
        for (int i = 0; i < m_; ++i) {
            const double sgn = b[i] < 0 ? -1.0 : 1.0;
            for (int j = 0; j < nx_; ++j) {
                at(i, j) = sgn * A(i, j);
                at(i, nx_ + j) = -sgn * A(i, j);
            }
            at(i, 2 * nx_ + i) = sgn;  // slack
            rhs(i) = sgn * b[i];
            if (b[i] < 0) {
                at(i, art_next) = 1.0;
                basis_[i] = art_next;
                ++art_next;
            } else {
                basis_[i] = 2 * nx_ + i;
            }
        }
        cmax_ = cmax;
    }

    LpResult run() {
        if (nart_ > 0) {
            // phase 1: maximize -sum(artificials)
            Vec obj(total_, 0.0);
            for (int j = ncols_; j < total_; ++j) obj[j] = -1.0;
            const double p1 = iterate(obj, /*allow_art=*/true).second;
            if (p1 < -1e-7) {
                LpResult r;
                r.status = LpResult::Status::Infeasible;
                return r;
            }
            purge_artificials();
        }
        Vec obj(total_, 0.0);
        for (int j = 0; j < nx_; ++j) {
            obj[j] = cmax_[j];
            obj[nx_ + j] = -cmax_[j];
        }
        auto [bounded, val] = iterate(obj, /*allow_art=*/false);
        LpResult r;
        if (!bounded) {
            r.status = LpResult::Status::Unbounded;
            return r;
        }
        r.status = LpResult::Status::Optimal;
        r.value = val;
        r.x.assign(nx_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const int bj = basis_[i];
            if (bj < nx_)
                r.x[bj] += rhs(i);
            else if (bj < 2 * nx_)
                r.x[bj - nx_] -= rhs(i);
        }
        return r;
    }

  private:
    double& at(int i, int j) { return T_[size_t(i) * (total_ + 1) + j]; }
    double& rhs(int i) { return T_[size_t(i) * (total_ + 1) + total_]; }

    // reduced costs for the current basis (objective row kept implicit)
    Vec reduced(const Vec& obj) const {
        Vec y(m_);  // multipliers: y_i = obj[basis_i]
        for (int i = 0; i < m_; ++i) y[i] = obj[basis_[i]];
        Vec rc(total_);
        for (int j = 0; j < total_; ++j) {
            double s = obj[j];
            for (int i = 0; i < m_; ++i)
                s -= y[i] * T_[size_t(i) * (total_ + 1) + j];
            rc[j] = s;
        }
        return rc;
    }

    // returns {bounded, objective value}
    std::pair<bool, double> iterate(const Vec& obj, bool allow_art) {
        const double tol = 1e-10;
        const int cap = 200000;
        for (int it = 0; it < cap; ++it) {
            Vec rc = reduced(obj);
            int enter = -1;
            for (int j = 0; j < total_; ++j) {
                if (!allow_art && j >= ncols_) break;
                if (rc[j] > tol) {
                    enter = j;  // Bland: first improving index
                    break;
                }
            }
            if (enter < 0) {
                double v = 0;
                for (int i = 0; i < m_; ++i) v += obj[basis_[i]] * T_[size_t(i) * (total_ + 1) + total_];
                return {true, v};
            }
            int leave = -1;
            double best = 0;
            for (int i = 0; i < m_; ++i) {
                const double col = T_[size_t(i) * (total_ + 1) + enter];
                if (col > tol) {
                    const double ratio = T_[size_t(i) * (total_ + 1) + total_] / col;
                    if (leave < 0 || ratio < best - 1e-12 ||
                        (ratio < best + 1e-12 && basis_[i] < basis_[leave])) {
                        leave = i;
                        best = ratio;
                    }
                }
            }
            if (leave < 0) return {false, 0.0};
            pivot(leave, enter);
        }
        throw NumericalError("solve_lp: iteration cap exceeded");
    }

    void pivot(int row, int col) {
        const double piv = at(row, col);
        const double inv = 1.0 / piv;
        for (int j = 0; j <= total_; ++j) T_[size_t(row) * (total_ + 1) + j] *= inv;
        at(row, col) = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = at(i, col);
            if (f == 0.0) continue;
            for (int j = 0; j <= total_; ++j)
                T_[size_t(i) * (total_ + 1) + j] -= f * T_[size_t(row) * (total_ + 1) + j];
            at(i, col) = 0.0;
        }
        basis_[row] = col;
    }

    // pivot basic artificials out (or leave them at zero in redundant rows)
    void purge_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < ncols_) continue;
            int col = -1;
            for (int j = 0; j < ncols_; ++j) {
                if (std::fabs(at(i, j)) > 1e-9) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) pivot(i, col);
        }
    }

    int m_, nx_, nslack_, ncols_, nart_, total_;
    std::vector<double> T_;
    std::vector<int> basis_;
    Vec cmax_;
};

}  // namespace detail

// Ax <= b with free x. Infeasible and unbounded are ordinary outcomes,
// not exceptions.
inline LpResult solve_lp(const LinearProgram& lp) {
    for (double v : lp.A.a)
        if (!std::isfinite(v)) throw InvalidInput("solve_lp: non-finite entry in A");
    for (double v : lp.b)
        if (!std::isfinite(v)) throw InvalidInput("solve_lp: non-finite entry in b");
    for (double v : lp.c)
        if (!std::isfinite(v)) throw InvalidInput("solve_lp: non-finite entry in c");
    if (lp.A.rows != int(lp.b.size()) || lp.A.cols != int(lp.c.size()))
        throw InvalidInput("solve_lp: dimension mismatch");

    Vec cmax = lp.c;
    if (lp.sense == LinearProgram::Sense::Min)
        for (double& v : cmax) v = -v;

    detail::SimplexTableau tab(lp.A, lp.b, cmax);
    LpResult r = tab.run();
    if (r.optimal() && lp.sense == LinearProgram::Sense::Min) r.value = -r.value;
    return r;
}

// ---------------------------------------------------------------------------

// k-dimensional volume of conv(points), points.size() == k+1.
// sqrt(det(M^T M)) / k! with M the matrix of edge vectors from points[0];
// affinely dependent input gives 0.
inline double gram_volume(const std::vector<Vec>& points) {
    const int k = int(points.size()) - 1;
    if (k < 0) throw InvalidInput("gram_volume: no points");
    if (k == 0) return 1.0;
    const int d = int(points[0].size());
    if (k > d) throw InvalidInput("gram_volume: more points than dimension+1");

    // Gram matrix of edge vectors
    std::vector<Vec> e(k);
    for (int i = 0; i < k; ++i) e[i] = sub(points[i + 1], points[0]);
    std::vector<double> G(size_t(k) * k);
    double scale = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            const double v = dot(e[i], e[j]);
            G[size_t(i) * k + j] = G[size_t(j) * k + i] = v;
            if (i == j) scale = std::max(scale, std::fabs(v));
        }
    if (scale == 0) return 0.0;

    // Cholesky; a pivot collapsing below rounding level means dependence
    double det = 1.0;
    for (int i = 0; i < k; ++i) {
        double p = G[size_t(i) * k + i];
        for (int r = 0; r < i; ++r) p -= G[size_t(i) * k + r] * G[size_t(i) * k + r];
        if (p <= 1e-13 * scale) return 0.0;
        const double L = std::sqrt(p);
        det *= p;
        G[size_t(i) * k + i] = L;
        for (int j = i + 1; j < k; ++j) {
            double s = G[size_t(j) * k + i];
            for (int r = 0; r < i; ++r) s -= G[size_t(j) * k + r] * G[size_t(i) * k + r];
            G[size_t(j) * k + i] = s / L;
        }
    }
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return std::sqrt(det) / fact;
}

// Gaussian elimination with partial pivoting. Returns false when the
// pivot collapses (relative to the largest input entry).
inline bool solve_linear(Mat A, Vec y, Vec& x, double tol_rel = 1e-12) {
    const int n = A.rows;
    if (A.cols != n || int(y.size()) != n) throw InvalidInput("solve_linear: shape mismatch");
    const double scale = std::max(A.max_abs(), 1e-300);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(A(i, k)) > std::fabs(A(piv, k))) piv = i;
        if (std::fabs(A(piv, k)) <= tol_rel * scale) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(y[k], y[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            if (f == 0) continue;
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
            y[i] -= f * y[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return true;
}

// determinant by LU with partial pivoting
inline double det(Mat A) {
    const int n = A.rows;
    if (A.cols != n) throw InvalidInput("det: not square");
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(A(i, k)) > std::fabs(A(piv, k))) piv = i;
        if (A(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            d = -d;
        }
        d *= A(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            if (f == 0) continue;
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    return d;
}

// rank of the row set within tolerance (relative to the largest entry)
inline int matrix_rank(Mat A, double tol_rel = 1e-10) {
    const int m = A.rows, n = A.cols;
    const double scale = std::max(A.max_abs(), 1e-300);
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int piv = rank;
        for (int i = rank + 1; i < m; ++i)
            if (std::fabs(A(i, col)) > std::fabs(A(piv, col))) piv = i;
        if (std::fabs(A(piv, col)) <= tol_rel * scale) continue;
        if (piv != rank)
            for (int j = 0; j < n; ++j) std::swap(A(rank, j), A(piv, j));
        for (int i = rank + 1; i < m; ++i) {
            const double f = A(i, col) / A(rank, col);
            if (f == 0) continue;
            for (int j = col; j < n; ++j) A(i, j) -= f * A(rank, j);
        }
        ++rank;
    }
    return rank;
}

// Chebyshev polynomial of the first kind, three-term recurrence.
inline double chebyshev_T(int k, double x) {
    if (k < 0) throw InvalidInput("chebyshev_T: negative degree");
    if (k == 0) return 1.0;
    if (k == 1) return x;
    double tm = 1.0, t = x;
    for (int i = 2; i <= k; ++i) {
        const double next = 2.0 * x * t - tm;
        tm = t;
        t = next;
    }
    return t;
}

// p * exp(tQ) by uniformization. Q rows must sum to zero with nonnegative
// off-diagonals; p must be a probability vector.
inline Vec uniformized_exp(const Mat& Q, const Vec& p, double t) {
    const int n = Q.rows;
    if (Q.cols != n || int(p.size()) != n) throw InvalidInput("uniformized_exp: shape mismatch");
    if (t < 0) throw InvalidInput("uniformized_exp: negative time");
    const double qscale = std::max(Q.max_abs(), 1.0);
    for (int i = 0; i < n; ++i) {
        double row = 0;
        for (int j = 0; j < n; ++j) {
            row += Q(i, j);
            if (i != j && Q(i, j) < -1e-9 * qscale)
                throw InvalidInput("uniformized_exp: negative off-diagonal rate");
        }
        if (std::fabs(row) > 1e-8 * qscale)
            throw InvalidInput("uniformized_exp: generator row does not sum to zero");
    }

    double lambda = 0;
    for (int i = 0; i < n; ++i) lambda = std::max(lambda, std::fabs(Q(i, i)));
    const double mu = lambda * t;
    if (mu == 0) return p;

    // row-stochastic jump kernel
    Mat P(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P(i, j) = (i == j ? 1.0 : 0.0) + Q(i, j) / lambda;

    Vec result(n, 0.0);
    Vec v = p;
    double cum = 0;
    const long kmax = long(mu + 60.0 * std::sqrt(mu + 1.0) + 200.0);
    for (long k = 0;; ++k) {
        const double w =
            std::exp(-mu + double(k) * std::log(mu) - std::lgamma(double(k) + 1.0));
        if (w > 0) {
            for (int i = 0; i < n; ++i) result[i] += w * v[i];
            cum += w;
        }
        if (cum >= 1.0 - 1e-14 && double(k) >= mu) break;
        if (k >= kmax) {
            if (cum < 1.0 - 1e-10)
                throw NumericalError("uniformized_exp: truncation cap reached, mass " +
                                     std::to_string(cum));
            break;
        }
        v = vec_mat(v, P);
    }
    return result;
}

}  // namespace polyspec
