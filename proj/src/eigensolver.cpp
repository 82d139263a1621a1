// eigensolver.cpp

#include "spinboson/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>

#include "spinboson/errors.hpp"

namespace spinboson::linalg {

namespace {

Eigenpairs dense_eigenpairs(const SparseMatrix& a, int count) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver", "dense eigensolver failed");
    Eigenpairs out;
    out.dense = true;
    out.converged = true;
    const int n = static_cast<int>(a.rows());
    for (int i = 0; i < std::min(count, n); ++i) {
        out.values.push_back(solver.eigenvalues()(i));
        Vector y = solver.eigenvectors().col(i);
        out.residuals.push_back((a * y - out.values.back() * y).norm());
        out.vectors.push_back(std::move(y));
    }
    return out;
}

// Deterministic pseudo-random fill, used to avoid starting inside an
// invariant subspace.
Vector random_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
    return v;
}

// Orthogonalize v against the first k columns of basis twice (DGKS style).
double orthogonalize(const Eigen::MatrixXd& basis, Eigen::Index k, Vector& v) {
    for (int pass = 0; pass < 2; ++pass) {
        if (k == 0) break;
        const Vector coeffs = basis.leftCols(k).transpose() * v;
        v.noalias() -= basis.leftCols(k) * coeffs;
    }
    return v.norm();
}

}  // namespace

Eigenpairs lowest_eigenpairs(const SparseMatrix& a, int count, const EigenOptions& opts,
                             const Vector& start) {
    const Eigen::Index n = a.rows();
    if (n == 0 || a.cols() != n) throw ArgumentError("lowest_eigenpairs: matrix must be square and nonempty");
    if (count < 1) throw ArgumentError("lowest_eigenpairs: count must be positive");
    if (n <= kDenseThreshold) return dense_eigenpairs(a, count);

    const Eigen::Index m = std::min<Eigen::Index>(std::max(opts.max_basis, 2 * count + 8), n);
    Eigen::MatrixXd basis(n, m);
    Eigen::MatrixXd image(n, m);
    Eigen::Index k = 0;

    Vector next = random_vector(n, 0x9e3779b97f4a7c15ULL) * 1e-3;
    if (start.size() == n) next += start;
    std::uint64_t reseed = 1;

    Eigenpairs out;
    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        while (k < m) {
            double norm = orthogonalize(basis, k, next);
            if (norm < 1e-12) {
                next = random_vector(n, ++reseed);
                norm = orthogonalize(basis, k, next);
            }
            basis.col(k) = next / norm;
            image.col(k) = a * basis.col(k);
            next = image.col(k);
            ++k;
        }
        Eigen::MatrixXd projected = basis.leftCols(k).transpose() * image.leftCols(k);
        projected = 0.5 * (projected + projected.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(projected);
        const Vector& theta = small.eigenvalues();
        const Eigen::MatrixXd& s = small.eigenvectors();

        out.values.clear();
        out.vectors.clear();
        out.residuals.clear();
        int first_unconverged = -1;
        Vector first_residual;
        for (int i = 0; i < count; ++i) {
            Vector y = basis.leftCols(k) * s.col(i);
            Vector r = image.leftCols(k) * s.col(i) - theta(i) * y;
            const double rn = r.norm();
            if (rn > opts.tolerance && first_unconverged < 0) {
                first_unconverged = i;
                first_residual = r;
            }
            out.values.push_back(theta(i));
            out.residuals.push_back(rn);
            out.vectors.push_back(std::move(y));
        }
        out.iterations = restart + 1;
        if (first_unconverged < 0) {
            out.converged = true;
            for (auto& y : out.vectors) y.normalize();
            return out;
        }

        // Thick restart: keep the lowest Ritz vectors, continue from a residual.
        const Eigen::Index keep = std::min<Eigen::Index>(count + 4, k - 1);
        const Eigen::MatrixXd kept_basis = basis.leftCols(k) * s.leftCols(keep);
        const Eigen::MatrixXd kept_image = image.leftCols(k) * s.leftCols(keep);
        basis.leftCols(keep) = kept_basis;
        image.leftCols(keep) = kept_image;
        k = keep;
        next = first_residual;
    }
    out.converged = false;
    return out;
}

QuadraticForm exp_quadratic_form(const SparseMatrix& a, const Vector& b, double t, double rel_tol,
                                 int max_dimension) {
    const Eigen::Index n = a.rows();
    QuadraticForm out;
    const double beta0 = b.norm();
    if (beta0 == 0.0) return out;

    if (n <= kDenseThreshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{Eigen::MatrixXd(a)};
        const Vector proj = solver.eigenvectors().transpose() * b;
        const double shift = solver.eigenvalues()(0);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) sum += proj(i) * proj(i) * std::exp(-t * (solver.eigenvalues()(i) - shift));
        out.value = std::exp(-t * shift) * sum;
        out.error_estimate = 0.0;
        out.krylov_dimension = static_cast<int>(n);
        return out;
    }

    const Eigen::Index cap = std::min<Eigen::Index>(max_dimension, n);
    Eigen::MatrixXd q(n, cap);
    std::vector<double> alpha;
    std::vector<double> beta;
    q.col(0) = b / beta0;
    double previous = std::numeric_limits<double>::quiet_NaN();
    int stable_steps = 0;
    for (Eigen::Index j = 0; j < cap; ++j) {
        Vector w = a * q.col(j);
        alpha.push_back(q.col(j).dot(w));
        w -= alpha.back() * q.col(j);
        if (j > 0) w -= beta.back() * q.col(j - 1);
        for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
        const double bnext = w.norm();

        const Eigen::Index dim = j + 1;
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < dim) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
        const double shift = small.eigenvalues()(0);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double c = small.eigenvectors()(0, i);
            sum += c * c * std::exp(-t * (small.eigenvalues()(i) - shift));
        }
        const double value = beta0 * beta0 * std::exp(-t * shift) * sum;
        out.value = value;
        out.krylov_dimension = static_cast<int>(dim);
        const bool breakdown = bnext < 1e-13 * std::max(1.0, std::abs(alpha.back()));
        if (breakdown) {
            out.error_estimate = 0.0;
            return out;
        }
        if (!std::isnan(previous)) {
            out.error_estimate = std::abs(value - previous);
            stable_steps = out.error_estimate <= rel_tol * std::abs(value) ? stable_steps + 1 : 0;
            if (stable_steps >= 2) return out;
        }
        previous = value;
        if (j + 1 < cap) {
            beta.push_back(bnext);
            q.col(j + 1) = w / bnext;
        }
    }
    return out;
}

SolveResult solve_shifted_spd(const SparseMatrix& a, double shift, const Vector& b, double rel_tol) {
    SparseMatrix shifted = a;
    for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += shift;
    shifted.makeCompressed();
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(rel_tol);
    cg.setMaxIterations(static_cast<Eigen::Index>(std::max<Eigen::Index>(1000, 10 * a.rows())));
    cg.compute(shifted);
    SolveResult out;
    out.x = cg.solve(b);
    out.iterations = static_cast<int>(cg.iterations());
    out.relative_residual = cg.error();
    out.converged = cg.info() == Eigen::Success;
    return out;
}

}  // namespace spinboson::linalg
