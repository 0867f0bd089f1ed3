#pragma once

#include <string>
#include <vector>

namespace music {

// Corrected: second terms of h_{m,2} and h_{m,3} carry |sin(t/2)|^2, as the triangle
// inequality on the derivative of sin(mt/2)/(m sin(t/2)) gives. Printed: single power.
enum class KernelForm { Corrected, Printed };

KernelForm parse_kernel_form(const std::string& name);

// Upper envelope of m^{-2l} |d_m^{(l)}(t)|^2; +infinity at t = 0 mod 2pi.
double h_kernel(int m, int order, double t, KernelForm form = KernelForm::Corrected);

struct Estimate {
  double value = 0;
  double error = 0;  // quadrature error estimate
};

// E_l(m, alpha, beta) = 2 h(2 pi alpha / m) + m/(pi beta) * int_{2pi(alpha+beta/2)/m}^{pi} h.
Estimate energy_constant(int m, double alpha, double beta, int order, double abs_tol = 1e-10,
                         KernelForm form = KernelForm::Corrected);

double a_beta(double beta);
double gamma_sin(double t);  // 2 sin(asin(t) / 2)

// T_l(m, alpha, beta) = sqrt(A E_l(m, alpha, beta)) + gamma(sqrt(A B_l E_0(m, beta, beta))).
Estimate t_constant(int m, double alpha, double beta, int order, KernelForm form = KernelForm::Corrected);

struct CertificationInput {
  int m0 = 100;
  double beta = 4.0;
  double theta = 0.01;  // upper bound on the sine-theta error
  double r = 7.0;       // critical-point radius
  KernelForm form = KernelForm::Corrected;
  // Compare against the published constants; only meaningful at the published parameters.
  bool compare_published = false;

  void validate() const;
  bool is_published_setting() const;
};

enum class LineKind { Condition, Lower, Upper, Info };

struct ReportLine {
  std::string name;
  LineKind kind = LineKind::Info;
  double value = 0;
  double error = 0;      // propagated quadrature error estimate
  double target = 0;     // published constant, or the threshold for a condition
  bool has_target = false;
  double rounded = 0;    // value rounded to 3 significant digits toward the safe side
  bool implied = true;   // the computed bound is at least as strong as the target
  bool reproduced = true;
  bool pass = true;
  std::string note;
};

struct CertificationReport {
  CertificationInput input;
  double a = 0;
  double c0 = 0, c1 = 0;
  std::vector<std::pair<std::string, Estimate>> energies;
  std::vector<std::pair<std::string, Estimate>> t_values;
  std::vector<ReportLine> lines;

  bool all_pass() const;
  const ReportLine* find(const std::string& name) const;
  std::string table() const;
};

CertificationReport certify(const CertificationInput& input);

// Rounding to 3 significant digits, downward or upward.
double round_down_3(double x);
double round_up_3(double x);

}  // namespace music
