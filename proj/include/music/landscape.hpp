#pragma once

#include <vector>

#include "music/subspace.hpp"

namespace music {

// Normalized Dirichlet kernel d_m(t) = (1/m) sum_{k in I(m)} e^{ikt} and its derivatives, order 0..3.
double dirichlet(int m, double t, int order = 0);

// Normalized Fejer kernel f_m = d_m^2 and its derivatives, order 0..3.
double fejer(int m, double t, int order = 0);

// Entries (ik)^order e^{ikt} / sqrt(m), k in I(m).
Vector steering(int m, double t, int order = 0);

struct LandscapePoint {
  double q = 0, dq = 0, d2q = 0;
};

// q_W(t) = 1 - ||W* phi(t)||^2 for a fixed orthonormal W. Immutable after construction.
class Landscape {
 public:
  explicit Landscape(const Subspace& w);

  int m() const { return m_; }
  int s() const { return s_; }

  double value(double t) const { return evaluate(t, 0).q; }
  double grad(double t) const { return evaluate(t, 1).dq; }
  double second(double t) const { return evaluate(t, 2).d2q; }
  // Fills derivatives up to max_order (0, 1 or 2) in one O(ms) pass.
  LandscapePoint evaluate(double t, int max_order = 2) const;

  // q at t0 + 2 pi n / count for n = 0..count-1, by one FFT per basis column.
  std::vector<double> values_on_uniform_grid(int count, double t0 = 0.0) const;

  // Row `row` of a uniform grid with stride*length points split as n = row + stride * p:
  // out[p] = q(t0 + 2 pi (row + stride p) / (stride * length)), p = 0..length-1.
  void strided_row(int stride, int length, int row, double t0, std::vector<double>& out) const;

 private:
  int m_, s_;
  double k0_;                  // smallest element of I(m)
  std::vector<cdouble> coef_;  // coef_[i * s + j] = conj(W(i, j))
};

}  // namespace music
