#include "music/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fft.hpp"
#include "music/rng.hpp"

namespace music {

namespace {

// Below this size a dense loop beats two FFTs per product.
constexpr int kFftThreshold = 48;
// Auto uses the dense SVD up to this m.
constexpr int kDenseSvdMax = 96;
constexpr double kResidualTol = 1e-11;

bool all_zero(const SampleVector& v) {
  return std::all_of(v.values().begin(), v.values().end(), [](cdouble z) { return z == cdouble(0); });
}

}  // namespace

std::vector<double> index_set(int n) {
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) k[i] = i - 0.5 * (n - 1);
  return k;
}

Matrix fourier_matrix(int n, const std::vector<double>& x) {
  const auto k = index_set(n);
  Matrix phi(n, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j)
    for (int i = 0; i < n; ++i) phi(i, j) = std::polar(1.0, k[i] * x[j]);
  return phi;
}

Matrix orthonormalize(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  double rmax = 0, rmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    rmax = std::max(rmax, std::abs(r(i, i)));
    rmin = std::min(rmin, std::abs(r(i, i)));
  }
  if (a.cols() > 0 && !(rmin > 1e-12 * rmax))
    throw Error(ErrorKind::Degenerate, "subspace", "matrix is numerically rank deficient");
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

ToeplitzMatrix::ToeplitzMatrix(SampleVector v) : v_(std::move(v)) {
  const int m = v_.m();
  if (m < kFftThreshold) return;
  fft_size_ = detail::good_fft_size(2 * m - 1);
  const int len = fft_size_;
  spectrum_.assign(len, 0);
  spectrum_adjoint_.assign(len, 0);
  for (int n = 0; n < m; ++n) {
    spectrum_[n] = v_.at(n);
    spectrum_adjoint_[n] = std::conj(v_.at(-n));
  }
  for (int n = 1; n < m; ++n) {
    spectrum_[len - n] = v_.at(-n);
    spectrum_adjoint_[len - n] = std::conj(v_.at(n));
  }
  detail::dft_inplace(spectrum_, -1);
  detail::dft_inplace(spectrum_adjoint_, -1);
}

ToeplitzMatrix toeplitz(const SampleVector& v) { return ToeplitzMatrix(v); }

Matrix ToeplitzMatrix::dense() const {
  const int m = this->m();
  Matrix t(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) t(j, k) = v_.at(j - k);
  return t;
}

Matrix ToeplitzMatrix::product(const Matrix& x, bool adjoint) const {
  const int m = this->m();
  if (x.rows() != m) throw Error(ErrorKind::Domain, "subspace", "Toeplitz product dimension mismatch");
  Matrix y(m, x.cols());
  if (fft_size_ == 0) {
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      for (int j = 0; j < m; ++j) {
        cdouble acc = 0;
        for (int k = 0; k < m; ++k)
          acc += (adjoint ? std::conj(v_.at(k - j)) : v_.at(j - k)) * x(k, c);
        y(j, c) = acc;
      }
    return y;
  }
  const auto& spec = adjoint ? spectrum_adjoint_ : spectrum_;
  const int len = fft_size_;
  std::vector<cdouble> buf(len), out(len);
  const double scale = 1.0 / len;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    std::fill(buf.begin(), buf.end(), cdouble(0));
    for (int k = 0; k < m; ++k) buf[k] = x(k, c);
    detail::dft(buf.data(), out.data(), len, -1);
    for (int n = 0; n < len; ++n) out[n] *= spec[n];
    detail::dft(out.data(), buf.data(), len, +1);
    for (int j = 0; j < m; ++j) y(j, c) = buf[j] * scale;
  }
  return y;
}

Matrix ToeplitzMatrix::apply(const Matrix& x) const { return product(x, false); }
Matrix ToeplitzMatrix::apply_adjoint(const Matrix& x) const { return product(x, true); }

ToeplitzMatrix ToeplitzMatrix::operator+(const ToeplitzMatrix& other) const {
  return ToeplitzMatrix(v_ + other.v_);
}

Subspace::Subspace(Matrix orthonormal_basis) : basis(std::move(orthonormal_basis)) {
  if (basis.cols() > basis.rows())
    throw Error(ErrorKind::Domain, "subspace", "subspace dimension exceeds ambient dimension");
  const double err =
      (basis.adjoint() * basis - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (basis.cols() > 0 && err > 1e-10)
    throw Error(ErrorKind::Domain, "subspace", "basis columns are not orthonormal");
}

SvdMethod parse_svd_method(const std::string& name) {
  if (name == "auto") return SvdMethod::Auto;
  if (name == "dense") return SvdMethod::Dense;
  if (name == "iterative") return SvdMethod::Iterative;
  throw Error(ErrorKind::BadInput, "subspace", "unknown SVD method '" + name + "'");
}

void SingularSpectrum::write_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::BadInput, "subspace", "cannot open " + path);
  std::fprintf(f, "k,sigma\n");
  for (Eigen::Index k = 0; k < sigma.size(); ++k) std::fprintf(f, "%ld,%.17g\n", long(k + 1), sigma(k));
  std::fclose(f);
}

SingularSpectrum svd_dense(const Matrix& a) {
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "svd", "dense SVD did not converge");
  SingularSpectrum sp;
  sp.sigma = dec.singularValues();
  sp.u = dec.matrixU();
  sp.v = dec.matrixV();
  sp.complete = true;
  sp.m = static_cast<int>(a.rows());
  sp.method = SvdMethod::Dense;
  return sp;
}

SingularSpectrum svd(const ToeplitzMatrix& t) { return svd_dense(t.dense()); }

namespace {

// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization.
// Returns std::nullopt-equivalent (complete=false, count 0) if the step budget runs out.
SingularSpectrum lanczos_svd(const ToeplitzMatrix& t, int k, double gamma, bool& converged) {
  const int m = t.m();
  const int budget = std::min(m, std::max(400, 4 * k + 40));
  CounterRng rng(0x9b6d5f3a1c27e845ULL, static_cast<std::uint64_t>(m));
  auto random_vector = [&]() {
    Vector r(m);
    for (int i = 0; i < m; ++i) r(i) = cdouble(rng.normal(), rng.normal());
    return r;
  };
  Matrix U(m, 0), V(m, 0);
  auto grow = [&](int need) {
    if (U.cols() >= need) return;
    const int cap = std::min(budget + 1, std::max(need, 2 * static_cast<int>(U.cols()) + 16));
    U.conservativeResize(Eigen::NoChange, cap);
    V.conservativeResize(Eigen::NoChange, cap);
  };
  auto reorth = [](Vector& w, const Matrix& q, int n) {
    if (n == 0) return;
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(n) * (q.leftCols(n).adjoint() * w);
  };
  auto fresh_direction = [&](const Matrix& q, int n) {
    Vector w = random_vector();
    reorth(w, q, n);
    return Vector(w / w.norm());
  };

  std::vector<double> alpha, beta;
  double normest = 0;
  auto breakdown = [&](double x) { return x <= 1e-13 * normest; };

  grow(1);
  Vector v = random_vector();
  v /= v.norm();
  V.col(0) = v;
  Vector p = t.apply(v);
  double a = p.norm();
  normest = a;
  if (a == 0.0) {
    U.col(0) = fresh_direction(U, 0);
    alpha.push_back(0);
  } else {
    U.col(0) = p / a;
    alpha.push_back(a);
  }

  SingularSpectrum sp;
  sp.m = m;
  sp.method = SvdMethod::Iterative;
  converged = false;
  int last_check = 0;
  for (int j = 1;; ++j) {
    Vector w = t.apply_adjoint(U.col(j - 1)) - alpha[j - 1] * V.col(j - 1);
    reorth(w, V, j);
    double b = w.norm();
    normest = std::max(normest, std::hypot(alpha[j - 1], b));
    const bool full = (j == m);
    if (full || breakdown(b)) {
      b = 0;
      if (!full) w = fresh_direction(V, j);
    } else {
      w /= b;
    }
    beta.push_back(b);

    const bool last = full || j >= budget;
    const int stride = std::max(4, j / 8);
    if (last || j - last_check >= stride || (b == 0 && j >= k)) {
      last_check = j;
      Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(j, j);
      for (int i = 0; i < j; ++i) {
        bmat(i, i) = alpha[i];
        if (i + 1 < j) bmat(i, i + 1) = beta[i];
      }
      Eigen::BDCSVD<Eigen::MatrixXd> small(bmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::VectorXd& sig = small.singularValues();
      int want = std::min(k, j);
      bool enough = j >= k;
      if (gamma > 0) {
        // Threshold mode also needs the first Ritz value below gamma * sigma_1.
        int above = 0;
        while (above < j && sig(above) >= gamma * sig(0)) ++above;
        want = std::max(want, std::min(above + 1, j));
        enough = enough && above < j;
      }
      double worst = 0;
      for (int i = 0; i < want; ++i) worst = std::max(worst, b * std::abs(small.matrixU()(j - 1, i)));
      const double scale = sig(0) > 0 ? sig(0) : 1.0;
      if ((enough && worst <= kResidualTol * scale) || full || sig(0) == 0.0) {
        sp.sigma = sig.head(want);
        sp.u = U.leftCols(j) * small.matrixU().leftCols(want).cast<cdouble>();
        sp.v = V.leftCols(j) * small.matrixV().leftCols(want).cast<cdouble>();
        sp.complete = full;
        sp.max_residual = worst;
        sp.krylov_steps = j;
        converged = true;
        return sp;
      }
      if (last) return sp;
    }

    grow(j + 1);
    V.col(j) = w;
    Vector q = t.apply(V.col(j)) - beta[j - 1] * U.col(j - 1);
    reorth(q, U, j);
    a = q.norm();
    normest = std::max(normest, std::hypot(a, beta[j - 1]));
    if (breakdown(a)) {
      U.col(j) = fresh_direction(U, j);
      alpha.push_back(0);
    } else {
      U.col(j) = q / a;
      alpha.push_back(a);
    }
  }
}

SingularSpectrum truncate(SingularSpectrum sp, int count) {
  count = std::min(count, sp.count());
  sp.sigma = Eigen::VectorXd(sp.sigma.head(count));
  sp.u = Matrix(sp.u.leftCols(count));
  sp.v = Matrix(sp.v.leftCols(count));
  return sp;
}

}  // namespace

SingularSpectrum leading_svd(const ToeplitzMatrix& t, int k, double gamma, SvdMethod method) {
  const int m = t.m();
  if (k < 1 || k > m) throw Error(ErrorKind::Domain, "svd", "requested singular triplet count out of range");
  if (all_zero(t.generator())) {
    SingularSpectrum sp;
    sp.sigma = Eigen::VectorXd::Zero(m);
    sp.u = Matrix::Identity(m, m);
    sp.v = Matrix::Identity(m, m);
    sp.complete = true;
    sp.m = m;
    return sp;
  }
  if (method == SvdMethod::Auto) method = m <= kDenseSvdMax ? SvdMethod::Dense : SvdMethod::Iterative;
  if (method == SvdMethod::Iterative) {
    bool converged = false;
    SingularSpectrum sp = lanczos_svd(t, k, gamma, converged);
    if (converged) return sp;
  }
  SingularSpectrum sp = svd(t);
  if (method == SvdMethod::Dense) return sp;
  // Iterative path ran out of steps: keep the dense result but report what was asked for.
  int want = k;
  if (gamma > 0) {
    int above = 0;
    while (above < m && sp.sigma(above) >= gamma * sp.sigma(0)) ++above;
    want = std::max(want, std::min(above + 1, m));
  }
  return truncate(std::move(sp), want);
}

int detect_sparsity(const SingularSpectrum& spectrum, double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw Error(ErrorKind::Domain, "detect_sparsity", "gamma must lie in (0, 1)");
  if (spectrum.count() == 0 || spectrum.sigma(0) <= 0)
    throw Error(ErrorKind::Degenerate, "detect_sparsity", "largest singular value is zero");
  int s = 0;
  while (s < spectrum.count() && spectrum.sigma(s) >= gamma * spectrum.sigma(0)) ++s;
  if (s == spectrum.count() && !spectrum.complete)
    throw Error(ErrorKind::Numerical, "detect_sparsity", "spectrum truncated above the threshold");
  return s;
}

Subspace toeplitz_estimator(const SingularSpectrum& spectrum, int s) {
  if (s < 1 || s >= spectrum.m)
    throw Error(ErrorKind::Domain, "toeplitz_estimator", "need 1 <= s < m");
  if (spectrum.count() < s)
    throw Error(ErrorKind::Domain, "toeplitz_estimator", "spectrum holds fewer than s triplets");
  const double next = spectrum.count() > s ? spectrum.sigma(s) : (spectrum.complete ? 0.0 : -1.0);
  if (next < 0)
    throw Error(ErrorKind::Domain, "toeplitz_estimator", "spectrum must include sigma_{s+1}");
  if (spectrum.sigma(s - 1) - next <= 1e-12 * spectrum.sigma(0))
    throw Error(ErrorKind::IllPosed, "toeplitz_estimator", "sigma_s and sigma_{s+1} coincide");
  return Subspace(Matrix(spectrum.u.leftCols(s)));
}

Subspace toeplitz_estimator(const ToeplitzMatrix& t, int s, SvdMethod method) {
  if (s < 1 || s >= t.m()) throw Error(ErrorKind::Domain, "toeplitz_estimator", "need 1 <= s < m");
  return toeplitz_estimator(leading_svd(t, s + 1, 0.0, method), s);
}

double sine_theta(const Subspace& v, const Subspace& w) {
  if (v.m() != w.m() || v.s() != w.s())
    throw Error(ErrorKind::Domain, "sine_theta", "subspace dimensions differ");
  if (v.s() == 0) return 0.0;
  Matrix joint(v.m(), 2 * v.s());
  joint << v.basis, w.basis;
  Eigen::ColPivHouseholderQR<Matrix> qr(joint);
  qr.setThreshold(1e-13);
  const auto r = qr.rank();
  const Matrix q = qr.householderQ() * Matrix::Identity(v.m(), r);
  const Matrix a = q.adjoint() * v.basis;
  const Matrix b = q.adjoint() * w.basis;
  const Matrix d = a * a.adjoint() - b * b.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(d, Eigen::EigenvaluesOnly);
  return std::min(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
}

double sine_theta_complement(const Subspace& v, const Subspace& w) {
  if (v.m() != w.m() || v.s() != w.s())
    throw Error(ErrorKind::Domain, "sine_theta", "subspace dimensions differ");
  if (v.s() == 0) return 0.0;
  const Matrix r = w.basis - v.basis * (v.basis.adjoint() * w.basis);
  Eigen::JacobiSVD<Matrix> dec(r);
  return std::min(1.0, dec.singularValues()(0));
}

double spectral_norm(const ToeplitzMatrix& t, SvdMethod method) {
  if (all_zero(t.generator())) return 0.0;
  return leading_svd(t, 1, 0.0, method).sigma(0);
}

double toeplitz_subspace_error(const ToeplitzMatrix& clean, const ToeplitzMatrix& noise, int s,
                               SvdMethod method) {
  if (clean.m() != noise.m()) throw Error(ErrorKind::Domain, "rho", "dimension mismatch");
  const auto sp = leading_svd(clean, s, 0.0, method);
  const double ss = sp.sigma(s - 1);
  if (!(ss > 1e-12 * sp.sigma(0)))
    throw Error(ErrorKind::Degenerate, "rho", "clean Toeplitz matrix is rank deficient at level s");
  return 2.0 * spectral_norm(noise, method) / ss;
}

}  // namespace music
