#include "bcs/matops.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bcs {

namespace {

void require_square_finite(const Matrix& m, const char* who) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square, dim >= 1");
  if (!m.allFinite())
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

}  // namespace

Matrix expm(const Matrix& m, double t) {
  require_square_finite(m, "expm");
  if (!std::isfinite(t)) throw std::invalid_argument("expm: non-finite time");

  const Eigen::Index n = m.rows();
  Matrix x = t * m;
  const double nrm = operator_norm(x);
  if (nrm > 700.0)
    throw std::range_error("expm: ||t*M|| = " + std::to_string(nrm) +
                           " exceeds the overflow guard (700)");

  int squarings = 0;
  for (double s = nrm; s > 0.5; s *= 0.5) ++squarings;
  x *= std::ldexp(1.0, -squarings);

  // Horner evaluation of the order-16 series; remainder < 1e-19 at norm 0.5.
  constexpr int kOrder = 16;
  const Matrix id = Matrix::Identity(n, n);
  Matrix acc = id + x / double(kOrder);
  for (int k = kOrder - 1; k >= 1; --k) acc = id + (x * acc) / double(k);
  for (int i = 0; i < squarings; ++i) acc = acc * acc;
  return acc;
}

double operator_norm(const Matrix& m) {
  require_square_finite(m, "operator_norm");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double lognorm2(const Matrix& m) {
  require_square_finite(m, "lognorm2");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Matrix lie_bracket(const Matrix& m, const Matrix& n) {
  require_square_finite(m, "lie_bracket");
  require_square_finite(n, "lie_bracket");
  if (m.rows() != n.rows())
    throw std::invalid_argument("lie_bracket: dimension mismatch");
  return m * n - n * m;
}

int span_rank(const std::vector<Vector>& vectors, double tol) {
  if (vectors.empty()) throw std::invalid_argument("span_rank: empty vector list");
  const Eigen::Index len = vectors.front().size();
  Matrix a(len, Eigen::Index(vectors.size()));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (vectors[size_t(j)].size() != len)
      throw std::invalid_argument("span_rank: vectors of unequal length");
    a.col(j) = vectors[size_t(j)];
  }
  if (!a.allFinite()) throw std::invalid_argument("span_rank: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

}  // namespace bcs
