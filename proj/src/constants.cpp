#include "music/constants.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "music/error.hpp"
#include "music/signal.hpp"

namespace music {

namespace {

constexpr double kB[4] = {1.0, 1.0 / 12.0, 1.0 / 80.0, 1.0 / 448.0};

// Published landscape constants at m0 = 100, beta = 4, theta = 0.01, r = 7.
constexpr double kCurvatureLower = 0.0271;
constexpr double kCurvatureUpper = 0.269;
constexpr double kSlopeLower = 0.0306;
constexpr double kFarFloor = 0.529;
constexpr double kSlopeRatioUpper = 0.292;

double round3(double x, bool up) {
  if (x == 0 || !std::isfinite(x)) return x;
  const double e = std::floor(std::log10(std::abs(x)));
  const double scale = std::pow(10.0, e - 2);
  const double q = x / scale;
  // Absorb representation error so 0.0271 stays 0.0271.
  const double r = up ? std::ceil(q - 1e-9) : std::floor(q + 1e-9);
  return r * scale;
}

bool same3(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

double round_down_3(double x) { return round3(x, false); }
double round_up_3(double x) { return round3(x, true); }

KernelForm parse_kernel_form(const std::string& name) {
  if (name == "corrected") return KernelForm::Corrected;
  if (name == "printed") return KernelForm::Printed;
  throw Error(ErrorKind::BadInput, "constants", "unknown kernel form '" + name + "'");
}

double h_kernel(int m, int order, double t, KernelForm form) {
  if (order < 0 || order > 3) throw Error(ErrorKind::Domain, "h_kernel", "order must be 0..3");
  const double sn = std::abs(std::sin(0.5 * t));
  if (sn == 0.0) return std::numeric_limits<double>::infinity();
  const double ms = m * sn;
  const double m2 = static_cast<double>(m) * m;
  const double mid = form == KernelForm::Corrected ? m2 * sn * sn : m2 * sn;
  double v = 0;
  switch (order) {
    case 0: v = 1.0 / ms; break;
    case 1: v = 1.0 / (2 * ms) + 1.0 / (2 * ms * ms); break;
    case 2: v = 1.0 / (4 * ms) + 1.0 / (2 * mid) + 1.0 / (2 * ms * ms * ms); break;
    default: v = 1.0 / (8 * ms) + 3.0 / (8 * mid) + 3.0 / (4 * ms * ms * ms) + 5.0 / (4 * ms * ms * ms * ms); break;
  }
  return v * v;
}

Estimate energy_constant(int m, double alpha, double beta, int order, double abs_tol, KernelForm form) {
  if (!(alpha > 0) || !(beta > 1) || m < 1)
    throw Error(ErrorKind::Domain, "energy_constant", "need alpha > 0, beta > 1, m >= 1");
  const double lo = kTwoPi * (alpha + 0.5 * beta) / m;
  if (!(lo < kPi)) throw Error(ErrorKind::Domain, "energy_constant", "empty integration interval");
  auto f = [&](double t) { return h_kernel(m, order, t, form); };
  double err = 0;
  // Relative tolerance well below abs_tol on the scale of these integrands.
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, lo, kPi, 30, 1e-14, &err);
  Estimate e;
  const double w = m / (kPi * beta);
  e.value = 2.0 * h_kernel(m, order, kTwoPi * alpha / m, form) + w * integral;
  e.error = w * err;
  if (e.error > abs_tol)
    throw Error(ErrorKind::Numerical, "energy_constant", "quadrature missed the requested tolerance");
  return e;
}

double a_beta(double beta) { return beta / (beta - 1.0); }

double gamma_sin(double t) { return 2.0 * std::sin(0.5 * std::asin(t)); }

Estimate t_constant(int m, double alpha, double beta, int order, KernelForm form) {
  const double a = a_beta(beta);
  const Estimate el = energy_constant(m, alpha, beta, order, 1e-10, form);
  const Estimate e0 = energy_constant(m, beta, beta, 0, 1e-10, form);
  const double arg = std::sqrt(a * kB[order] * e0.value);
  if (!(arg <= 1.0)) throw Error(ErrorKind::Domain, "t_constant", "gamma argument exceeds 1");
  Estimate t;
  const double root = std::sqrt(a * el.value);
  t.value = root + gamma_sin(arg);
  // First-order propagation; d/dx gamma(x) = cos(asin(x)/2) / sqrt(1 - x^2).
  const double dg = std::cos(0.5 * std::asin(arg)) / std::sqrt(1 - arg * arg);
  t.error = (root > 0 ? 0.5 * a * el.error / root : 0) + (arg > 0 ? dg * 0.5 * a * kB[order] * e0.error / arg : 0);
  return t;
}

void CertificationInput::validate() const {
  if (m0 < 2) throw Error(ErrorKind::BadInput, "certify", "m0 must be at least 2");
  if (!(beta > 1)) throw Error(ErrorKind::BadInput, "certify", "beta must exceed 1");
  if (!(theta > 0 && theta < 1)) throw Error(ErrorKind::BadInput, "certify", "theta must lie in (0, 1)");
  if (!(r > 0)) throw Error(ErrorKind::BadInput, "certify", "r must be positive");
}

bool CertificationInput::is_published_setting() const {
  return m0 == 100 && beta == 4.0 && theta == 0.01 && r == 7.0;
}

bool CertificationReport::all_pass() const {
  for (const auto& l : lines)
    if (!l.pass) return false;
  return true;
}

const ReportLine* CertificationReport::find(const std::string& name) const {
  for (const auto& l : lines)
    if (l.name == name) return &l;
  return nullptr;
}

std::string CertificationReport::table() const {
  std::ostringstream os;
  char buf[512];
  std::snprintf(buf, sizeof buf, "m0=%d beta=%.17g theta=%.17g r=%.17g kernel=%s\n", input.m0, input.beta,
                input.theta, input.r, input.form == KernelForm::Corrected ? "corrected" : "printed");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-34s %-9s %-23s %-10s %-10s %-5s %s\n", "constant", "kind", "computed", "rounded",
                "target", "pass", "note");
  os << buf;
  for (const auto& l : lines) {
    const char* kind = l.kind == LineKind::Condition ? "condition"
                       : l.kind == LineKind::Lower   ? "lower"
                       : l.kind == LineKind::Upper   ? "upper"
                                                     : "info";
    char target[32] = "-";
    char rounded[32] = "-";
    if (l.has_target) std::snprintf(target, sizeof target, "%.6g", l.target);
    if (l.kind == LineKind::Lower || l.kind == LineKind::Upper) std::snprintf(rounded, sizeof rounded, "%.6g", l.rounded);
    std::snprintf(buf, sizeof buf, "%-34s %-9s %-23.17g %-10s %-10s %-5s %s\n", l.name.c_str(), kind, l.value, rounded,
                  target, l.pass ? "PASS" : "FAIL", l.note.c_str());
    os << buf;
  }
  os << (all_pass() ? "certification: PASS\n" : "certification: FAIL\n");
  return os.str();
}

CertificationReport certify(const CertificationInput& in) {
  in.validate();
  CertificationReport rep;
  rep.input = in;
  const int m0 = in.m0;
  const double beta = in.beta, c1 = in.theta, r = in.r;
  const double a = a_beta(beta);
  rep.a = a;
  const bool compare = in.compare_published;

  auto condition = [&](const std::string& name, double value, double threshold, bool ok, std::string note = "") {
    ReportLine l;
    l.name = name;
    l.kind = LineKind::Condition;
    l.value = value;
    l.target = threshold;
    l.has_target = true;
    l.pass = ok;
    l.note = std::move(note);
    rep.lines.push_back(l);
  };
  auto info = [&](const std::string& name, double value, std::string note = "") {
    ReportLine l;
    l.name = name;
    l.kind = LineKind::Info;
    l.value = value;
    l.note = std::move(note);
    rep.lines.push_back(l);
  };
  // A bound line must be non-vacuous (floor > 0 for lower bounds); when comparing,
  // the published constant must also be implied and equal the safely rounded value.
  auto bound = [&](const std::string& name, LineKind kind, double value, double error, double published,
                   bool nonvacuous) {
    ReportLine l;
    l.name = name;
    l.kind = kind;
    l.value = value;
    l.error = error;
    l.rounded = kind == LineKind::Lower ? round_down_3(value) : round_up_3(value);
    l.pass = nonvacuous;
    if (!nonvacuous) l.note = "vacuous";
    if (compare) {
      l.target = published;
      l.has_target = true;
      l.implied = kind == LineKind::Lower ? value >= published : value <= published;
      l.reproduced = same3(l.rounded, published);
      l.pass = l.pass && l.implied && l.reproduced;
      if (!l.implied) l.note += (l.note.empty() ? "" : "; ") + std::string("published value not implied");
      else if (!l.reproduced) l.note += (l.note.empty() ? "" : "; ") + std::string("implied but not tight");
    }
    rep.lines.push_back(l);
    return l.value;
  };

  auto energy = [&](const std::string& label, double alpha, int order) {
    Estimate e = energy_constant(m0, alpha, beta, order, 1e-10, in.form);
    rep.energies.emplace_back(label, e);
    return e;
  };
  auto tval = [&](const std::string& label, double tau, int order) {
    Estimate t = t_constant(m0, beta - tau, beta, order, in.form);
    rep.t_values.emplace_back(label, t);
    return t;
  };

  // Side condition shared by every landscape lemma.
  const Estimate e0bb = energy("E0(m0,beta,beta)", beta, 0);
  const Estimate e1bb = energy("E1(m0,beta,beta)", beta, 1);
  condition("A*E0(m0,beta,beta) < 1/4", a * e0bb.value, 0.25, a * e0bb.value < 0.25);
  if (a * e0bb.value >= 0.25) return rep;

  rep.c0 = 1.0 / 6 - 2 * a * e1bb.value - 1.0 / (6.0 * m0 * m0);
  rep.c1 = 1.0 / 6 + 2 * a * e1bb.value;
  info("C0(m0,beta)", rep.c0);
  info("C1(m0,beta)", rep.c1);

  // Windows used by each step, as offsets tau with |t - x_j| <= 2 pi tau / m.
  const double tau_crit = 1.0 / (2 * kPi);
  const double tau_curv = 1.0 / 6 + r * c1 / (2 * kPi);
  const double tau_slope = 2.0 / 3 + r * c1 / (2 * kPi);
  const double tau_far = 2.0 / 3 - r * c1 / (2 * kPi);
  for (double tau : {tau_crit, tau_curv, tau_slope}) {
    if (!(tau < beta)) {
      condition("window tau < beta", tau, beta, false);
      return rep;
    }
  }

  // (a) critical points within r theta / m.
  double t[4];
  for (int l = 0; l < 4; ++l) t[l] = tval("T" + std::to_string(l) + "(crit)", tau_crit, l).value;
  const double rc = rep.c0 * r - 1 - (1.0 / 20 + t[0] * t[3] + 3 * t[1] * t[2]) * r * r * c1;
  condition("r-condition", rc, 0.0, rc > 0, "r=" + std::to_string(r).substr(0, 6));
  condition("r < 1/theta", r * c1, 1.0, r * c1 < 1.0);

  // (b) curvature on the convexity window.
  Estimate tc[3];
  for (int l = 0; l < 3; ++l) tc[l] = tval("T" + std::to_string(l) + "(curv)", tau_curv, l);
  const double v = kPi / 3;
  const double pert = 2 * tc[1].value * tc[1].value + 2 * tc[0].value * tc[2].value + (1 + r / 10) * c1;
  const double pert_err = 4 * tc[1].value * tc[1].error + 2 * (tc[0].error * tc[2].value + tc[0].value * tc[2].error);
  const double mu = bound("curvature lower", LineKind::Lower,
                          (1.0 / 6) * (1 - 1.0 / (double(m0) * m0)) - v * v / 30 - pert, pert_err, kCurvatureLower,
                          (1.0 / 6) * (1 - 1.0 / (double(m0) * m0)) - v * v / 30 - pert > 0);
  const double lip = bound("curvature upper", LineKind::Upper, 1.0 / 6 + pert, pert_err, kCurvatureUpper, true);

  // (d), (f) slope on the annulus between the windows.
  const Estimate s0 = tval("T0(slope)", tau_slope, 0);
  const Estimate s1 = tval("T1(slope)", tau_slope, 1);
  const double tt = s0.value * s1.value;
  const double tt_err = s0.error * s1.value + s0.value * s1.error;
  auto slope_at = [&](double u) {
    return std::sin(0.5 * u) * ((1.0 / 3) * (1 - 1.0 / (double(m0) * m0)) - u * u / 120) - 2 * tt - (1 + r / 6) * c1;
  };
  const double slope = std::min(slope_at(kPi / 3), slope_at(4 * kPi / 3));
  bound("slope lower", LineKind::Lower, slope, 2 * tt_err, kSlopeLower, slope > 0);
  const double ratio = 1.0 / 6 + (6 / kPi) * tt + (3 / kPi) * (1 + r / 6) * c1;
  bound("slope ratio upper", LineKind::Upper, ratio, (6 / kPi) * tt_err, kSlopeRatioUpper, true);

  // (e) far-field floor.
  const Estimate tf = t_constant(m0, beta / 2, beta, 0, in.form);
  rep.t_values.emplace_back("T0(m0,beta/2,beta)", tf);
  const double sf = std::sin(kPi * tau_far / m0);
  const double fej = std::max(0.25, 1.0 / (double(m0) * m0 * sf * sf));
  const double floor = 1 - fej - tf.value * tf.value - c1;
  bound("far-field floor", LineKind::Lower, floor, 2 * tf.value * tf.error, kFarFloor, floor > c1 * c1);

  // Gradient-descent consequences of the computed (unrounded) constants, informational.
  if (mu > 0) {
    info("step ceiling 2/(mu+L)", 2 / (mu + lip), "times 1/m^2");
    const double rate = std::sqrt(1 - 2 * 6 * mu * lip / (mu + lip));
    info("contraction with h=6/m^2", rate);
    info("termination factor 1/mu", 1 / mu, "error <= factor * eps / m");
    if (slope > 0) {
      const double lo = 6 * slope, hi = 6 * ratio;
      const double annulus = std::max(1 - 3 * lo / (4 * kPi), std::abs(1 - hi));
      info("annulus contraction", annulus);
      info("4*annulus^31", 4 * std::pow(annulus, 31), "<= 1 means 31 steps reach the window");
      info("(1/3)*contraction^-31", std::pow(rate, -31.0) / 3, "optimization-error constant");
    }
  }
  return rep;
}

}  // namespace music
