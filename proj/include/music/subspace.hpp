#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "music/signal.hpp"

namespace music {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Symmetric index set I(n) = {-(n-1)/2, ..., (n-1)/2}; half-integers when n is even.
std::vector<double> index_set(int n);

// Phi(n, x): n x s matrix with entries exp(i k x_j), k in I(n).
Matrix fourier_matrix(int n, const std::vector<double>& x);

// Orthonormal basis for the column space of a full-column-rank matrix.
Matrix orthonormalize(const Matrix& a);

// Square m x m Toeplitz matrix with entry(j, k) = v[j - k]. Products go through a
// circulant embedding once m is large enough that the FFT wins.
class ToeplitzMatrix {
 public:
  explicit ToeplitzMatrix(SampleVector v);

  int m() const { return v_.m(); }
  cdouble entry(int j, int k) const { return v_.at(j - k); }
  const SampleVector& generator() const { return v_; }

  Matrix dense() const;
  Matrix apply(const Matrix& x) const;          // T x
  Matrix apply_adjoint(const Matrix& x) const;  // T* x

  ToeplitzMatrix operator+(const ToeplitzMatrix& other) const;

 private:
  Matrix product(const Matrix& x, bool adjoint) const;

  SampleVector v_;
  int fft_size_ = 0;
  std::vector<cdouble> spectrum_;
  std::vector<cdouble> spectrum_adjoint_;
};

ToeplitzMatrix toeplitz(const SampleVector& v);

struct Subspace {
  Matrix basis;  // m x s, orthonormal columns

  Subspace() = default;
  explicit Subspace(Matrix orthonormal_basis);
  static Subspace span_of(const Matrix& a) { return Subspace(orthonormalize(a)); }

  int m() const { return static_cast<int>(basis.rows()); }
  int s() const { return static_cast<int>(basis.cols()); }
};

enum class SvdMethod { Auto, Dense, Iterative };

SvdMethod parse_svd_method(const std::string& name);

struct SingularSpectrum {
  Eigen::VectorXd sigma;  // leading singular values, nonincreasing
  Matrix u;               // matching left singular vectors
  Matrix v;               // matching right singular vectors
  bool complete = false;  // true when every one of the m values is present
  int m = 0;
  double max_residual = 0.0;  // largest ||T v - s u|| + ||T* u - s v|| among returned triplets
  SvdMethod method = SvdMethod::Dense;
  int krylov_steps = 0;

  int count() const { return static_cast<int>(sigma.size()); }
  void write_csv(const std::string& path) const;
};

// Full dense SVD.
SingularSpectrum svd(const ToeplitzMatrix& t);
SingularSpectrum svd_dense(const Matrix& a);

// Leading singular triplets, at least k of them. When gamma > 0 the spectrum also
// extends past the first value below gamma * sigma_1 so detect_sparsity is exact.
SingularSpectrum leading_svd(const ToeplitzMatrix& t, int k, double gamma = 0.0,
                             SvdMethod method = SvdMethod::Auto);

int detect_sparsity(const SingularSpectrum& spectrum, double gamma);

// Top-s left singular space. Refuses when sigma_s and sigma_{s+1} tie within 1e-12 sigma_1.
Subspace toeplitz_estimator(const SingularSpectrum& spectrum, int s);
Subspace toeplitz_estimator(const ToeplitzMatrix& t, int s, SvdMethod method = SvdMethod::Auto);

// ||V V* - W W*||_2, computed on the joint range of V and W.
double sine_theta(const Subspace& v, const Subspace& w);
// ||V_perp* W||_2, the equivalent complement form.
double sine_theta_complement(const Subspace& v, const Subspace& w);

double spectral_norm(const ToeplitzMatrix& t, SvdMethod method = SvdMethod::Auto);

// rho = 2 ||T(eta)||_2 / sigma_s(T(y)).
double toeplitz_subspace_error(const ToeplitzMatrix& clean, const ToeplitzMatrix& noise, int s,
                               SvdMethod method = SvdMethod::Auto);

}  // namespace music
