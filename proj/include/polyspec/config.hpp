#pragma once

#include <stdexcept>
#include <string>

namespace polyspec {

inline constexpr const char* kVersion = "0.1.0";

// One record holding every numerical tolerance used across the library.
// Defaults: 1e-9 absolute, 1e-10 relative.
struct Tolerances {
    double abs_tol = 1e-9;      // feasibility, side tests, point matching
    double rel_tol = 1e-10;     // eigensolver residuals, relative comparisons
    double identity = 1e-10;    // entrywise H = -L + diag(D)
    double gap_eig = 1e-8;      // positivity threshold for the one-positive-eigenvalue check
    double top_vec = 1e-7;      // top-eigenvector residual in gap certificates
    double stationarity = 1e-9; // ||pi Q||_inf <= stationarity * ||Q||_inf
    double mass = 1e-12;        // probability-vector mass drift
    double semigroup = 1e-10;   // uniformization truncation
    double degree_floor = 1e-12;    // smallest admissible diagonal entry of D
    double scaled_top_eig = 1e-6;   // |top eigenvalue of slack-scaled Hessian - (d-1)|
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// iteration caps exceeded, residuals out of tolerance
struct NumericalError : Error {
    using Error::Error;
};
// geometric input too close to a decision boundary to classify
struct DegeneracyError : Error {
    using Error::Error;
};
struct InvalidInput : Error {
    using Error::Error;
};

}  // namespace polyspec
