// eigensolver.hpp: extremal eigenpairs and matrix-function quadratic forms
// for real symmetric sparse matrices.

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace spinboson::linalg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Below this dimension problems are solved densely.
inline constexpr Eigen::Index kDenseThreshold = 600;

struct EigenOptions {
    double tolerance{1e-10};  // residual norm ||A y - θ y||
    int max_basis{64};
    int max_restarts{400};
};

struct Eigenpairs {
    std::vector<double> values;   // ascending
    std::vector<Vector> vectors;  // unit norm
    std::vector<double> residuals;
    int iterations{0};
    bool converged{false};
    bool dense{false};
};

// Lowest `count` eigenpairs. Dense for small problems, otherwise a
// thick-restart Krylov method with explicit Rayleigh-Ritz projection.
// `start` seeds the Krylov space (may be empty).
Eigenpairs lowest_eigenpairs(const SparseMatrix& a, int count, const EigenOptions& opts = {},
                             const Vector& start = Vector());

struct QuadraticForm {
    double value{0.0};
    double error_estimate{0.0};
    int krylov_dimension{0};
};

// <b, exp(-t A) b> by Lanczos (Gauss quadrature on the spectral measure of b).
QuadraticForm exp_quadratic_form(const SparseMatrix& a, const Vector& b, double t,
                                 double rel_tol = 1e-12, int max_dimension = 400);

struct SolveResult {
    Vector x;
    double relative_residual{0.0};
    int iterations{0};
    bool converged{false};
};

// (A + shift·I) x = b for symmetric positive definite A + shift·I, by
// conjugate gradients.
SolveResult solve_shifted_spd(const SparseMatrix& a, double shift, const Vector& b,
                              double rel_tol = 1e-10);

}  // namespace spinboson::linalg
