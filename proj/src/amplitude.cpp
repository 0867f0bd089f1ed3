#include "music/amplitude.hpp"

namespace music {

AmplitudeMethod parse_amplitude_method(const std::string& name) {
  if (name == "quadratic") return AmplitudeMethod::Quadratic;
  if (name == "least-squares" || name == "least_squares") return AmplitudeMethod::LeastSquares;
  throw Error(ErrorKind::BadInput, "amplitude", "unknown amplitude method '" + name + "'");
}

Matrix pseudoinverse(const Matrix& a, bool require_full_rank) {
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = dec.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-12 * sv(0) : 0.0;
  Eigen::VectorXd inv(sv.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0) {
      inv(i) = 1.0 / sv(i);
      ++rank;
    } else {
      inv(i) = 0.0;
    }
  }
  if (require_full_rank && rank < std::min(a.rows(), a.cols()))
    throw Error(ErrorKind::Degenerate, "amplitude", "Fourier matrix is rank deficient");
  return dec.matrixV() * inv.asDiagonal() * dec.matrixU().adjoint();
}

std::vector<cdouble> quadratic_amplitudes(const std::vector<double>& xhat, const ToeplitzMatrix& t) {
  const int m = t.m();
  if (xhat.empty() || static_cast<int>(xhat.size()) > m)
    throw Error(ErrorKind::Domain, "amplitude", "need 1 <= s <= m nodes");
  const Matrix p = pseudoinverse(fourier_matrix(m, xhat));  // s x m
  const Matrix tp = t.apply(p.adjoint());                  // m x s
  std::vector<cdouble> a(xhat.size());
  for (std::size_t j = 0; j < xhat.size(); ++j) a[j] = (p.row(j) * tp.col(j))(0, 0);
  return a;
}

std::vector<cdouble> least_squares_amplitudes(const std::vector<double>& xhat, const SampleVector& y) {
  const int n = 2 * y.m() - 1;
  if (xhat.empty() || static_cast<int>(xhat.size()) > n)
    throw Error(ErrorKind::Domain, "amplitude", "need 1 <= s <= 2m-1 nodes");
  // I(2m-1) = {-m+1, ..., m-1} lines up with the sample indices.
  const Matrix phi = fourier_matrix(n, xhat);
  Vector rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = y.values()[i];
  const Vector u = pseudoinverse(phi) * rhs;
  return std::vector<cdouble>(u.data(), u.data() + u.size());
}

}  // namespace music
