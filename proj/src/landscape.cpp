#include "music/landscape.hpp"

#include <cmath>

#include "fft.hpp"

namespace music {

namespace {

double dirichlet_sum(int m, double t, int order) {
  double acc = 0;
  for (int i = 0; i < m; ++i) {
    const double k = i - 0.5 * (m - 1);
    const double kp = order == 0 ? 1.0 : order == 1 ? k : order == 2 ? k * k : k * k * k;
    // Real part of (ik)^order e^{ikt}.
    switch (order) {
      case 0: acc += std::cos(k * t); break;
      case 1: acc -= kp * std::sin(k * t); break;
      case 2: acc -= kp * std::cos(k * t); break;
      default: acc += kp * std::sin(k * t); break;
    }
  }
  return acc / m;
}

}  // namespace

double dirichlet(int m, double t, int order) {
  if (order < 0 || order > 3) throw Error(ErrorKind::Domain, "dirichlet", "order must be 0..3");
  const double half = 0.5 * t;
  const double sn = std::sin(half);
  if (order == 0) {
    if (std::abs(sn) < 1e-6) return dirichlet_sum(m, t, 0);
    return std::sin(0.5 * m * t) / (m * sn);
  }
  // The closed form for derivatives cancels badly inside the main lobe.
  if (m * std::abs(sn) < 1.0) return dirichlet_sum(m, t, order);

  // d = g * h with g = sin(mt/2)/m and h = csc(t/2); Leibniz rule.
  const double cs = std::cos(half);
  const double csc = 1.0 / sn, cot = cs / sn;
  double h[4];
  h[0] = csc;
  h[1] = -0.5 * csc * cot;
  h[2] = 0.25 * (csc * cot * cot + csc * csc * csc);
  h[3] = -0.125 * (csc * cot * cot * cot + 5.0 * csc * csc * csc * cot);
  double g[4];
  const double arg = 0.5 * m * t;
  const double w = 0.5 * m;
  g[0] = std::sin(arg) / m;
  g[1] = w * std::cos(arg) / m;
  g[2] = -w * w * std::sin(arg) / m;
  g[3] = -w * w * w * std::cos(arg) / m;
  static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  double acc = 0;
  for (int i = 0; i <= order; ++i) acc += binom[order][i] * g[i] * h[order - i];
  return acc;
}

double fejer(int m, double t, int order) {
  if (order < 0 || order > 3) throw Error(ErrorKind::Domain, "fejer", "order must be 0..3");
  const double d0 = dirichlet(m, t, 0);
  if (order == 0) return d0 * d0;
  const double d1 = dirichlet(m, t, 1);
  if (order == 1) return 2 * d0 * d1;
  const double d2 = dirichlet(m, t, 2);
  if (order == 2) return 2 * (d1 * d1 + d0 * d2);
  const double d3 = dirichlet(m, t, 3);
  return 2 * (3 * d1 * d2 + d0 * d3);
}

Vector steering(int m, double t, int order) {
  const auto k = index_set(m);
  Vector phi(m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i) phi(i) = std::pow(cdouble(0, k[i]), order) * std::polar(norm, k[i] * t);
  return phi;
}

Landscape::Landscape(const Subspace& w) : m_(w.m()), s_(w.s()), k0_(-0.5 * (w.m() - 1)) {
  coef_.resize(static_cast<std::size_t>(m_) * s_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < s_; ++j) coef_[static_cast<std::size_t>(i) * s_ + j] = std::conj(w.basis(i, j));
}

LandscapePoint Landscape::evaluate(double t, int max_order) const {
  // a = sqrt(m) W* phi, b = sqrt(m) W* phi', c = sqrt(m) W* phi''.
  thread_local std::vector<cdouble> a, b, c;
  a.assign(s_, 0);
  b.assign(s_, 0);
  c.assign(s_, 0);
  const cdouble step = std::polar(1.0, t);
  cdouble e;
  for (int i = 0; i < m_; ++i) {
    const double k = k0_ + i;
    // Exponentials by recurrence, re-anchored every 32 terms to bound drift.
    if ((i & 31) == 0) e = std::polar(1.0, k * t);
    else e *= step;
    const cdouble* row = &coef_[static_cast<std::size_t>(i) * s_];
    if (max_order == 0) {
      for (int j = 0; j < s_; ++j) a[j] += row[j] * e;
    } else {
      const cdouble ike(-k * e.imag(), k * e.real());
      if (max_order == 1) {
        for (int j = 0; j < s_; ++j) {
          a[j] += row[j] * e;
          b[j] += row[j] * ike;
        }
      } else {
        const cdouble kke = -k * k * e;
        for (int j = 0; j < s_; ++j) {
          a[j] += row[j] * e;
          b[j] += row[j] * ike;
          c[j] += row[j] * kke;
        }
      }
    }
  }
  double na = 0, re_ab = 0, nb = 0, re_ac = 0;
  for (int j = 0; j < s_; ++j) {
    na += std::norm(a[j]);
    re_ab += (std::conj(a[j]) * b[j]).real();
    nb += std::norm(b[j]);
    re_ac += (std::conj(a[j]) * c[j]).real();
  }
  LandscapePoint p;
  p.q = 1.0 - na / m_;
  if (max_order >= 1) p.dq = -2.0 * re_ab / m_;
  if (max_order >= 2) p.d2q = -2.0 * (nb + re_ac) / m_;
  return p;
}

void Landscape::strided_row(int stride, int length, int row, double t0, std::vector<double>& out) const {
  thread_local std::vector<cdouble> buf, spec;
  buf.resize(length);
  spec.resize(length);
  out.assign(length, 1.0);
  const double theta = t0 + kTwoPi * row / (static_cast<double>(stride) * length);
  // The common factor e^{i k0 t} has unit modulus and drops out of |.|^2.
  const cdouble step = std::polar(1.0, theta);
  const double inv_m = 1.0 / m_;
  for (int j = 0; j < s_; ++j) {
    std::fill(buf.begin(), buf.end(), cdouble(0));
    cdouble e;
    for (int i = 0; i < m_; ++i) {
      if ((i & 31) == 0) e = std::polar(1.0, i * theta);
      else e *= step;
      buf[i % length] += coef_[static_cast<std::size_t>(i) * s_ + j] * e;
    }
    detail::dft(buf.data(), spec.data(), length, +1);
    for (int p = 0; p < length; ++p) out[p] -= std::norm(spec[p]) * inv_m;
  }
}

std::vector<double> Landscape::values_on_uniform_grid(int count, double t0) const {
  std::vector<double> out;
  strided_row(1, count, 0, t0, out);
  return out;
}

}  // namespace music
