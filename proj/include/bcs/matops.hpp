#pragma once

#include <Eigen/Core>

#include <vector>

namespace bcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix exponential e^{tM} by scaling-and-squaring with a truncated
/// series kernel (the scaled norm is brought below 0.5 before the kernel
/// is applied). Throws std::range_error when ||tM|| exceeds 700.
Matrix expm(const Matrix& m, double t = 1.0);

/// Spectral norm (largest singular value).
double operator_norm(const Matrix& m);

/// Logarithmic norm: largest eigenvalue of the symmetric part (m + m^T)/2.
/// Bounds d/dt ln||x(t)|| along solutions of x' = m x, and never exceeds
/// operator_norm(m).
double lognorm2(const Matrix& m);

/// Commutator m*n - n*m. Throws on dimension mismatch.
Matrix lie_bracket(const Matrix& m, const Matrix& n);

/// Numerical rank of the span of the given vectors, with singular values
/// below tol * sigma_max treated as zero.
int span_rank(const std::vector<Vector>& vectors, double tol = 1e-9);

}  // namespace bcs
