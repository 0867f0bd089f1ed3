#include "music/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace music {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadInput, "io", "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto cells = split_csv(line);
    std::vector<double> row;
    bool numeric = cells.size() == columns;
    for (std::size_t i = 0; numeric && i < cells.size(); ++i) {
      double v;
      numeric = parse_double(cells[i], v);
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw Error(ErrorKind::BadInput, "io", path + ":" + std::to_string(lineno) + ": malformed row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent >= 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent >= 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent >= 0 ? "\n" : "";
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{";
    out += nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) {
        out += ",";
        out += nl;
      }
      first = false;
      out += pad + Json(it.key()).dump() + (indent >= 0 ? ": " : ":");
      dump_rec(it.value(), indent, depth + 1, out);
    }
    out += nl + close + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += "[";
    out += nl;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) {
        out += ",";
        out += nl;
      }
      out += pad;
      dump_rec(j[i], indent, depth + 1, out);
    }
    out += nl + close + "]";
  } else if (j.is_number_float()) {
    out += format_double(j.get<double>());
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += "\n";
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadInput, "io", "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadInput, "io", path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadInput, "io", "cannot write " + path);
  out << text;
}

void write_samples_csv(const std::string& path, const SampleVector& y) {
  std::ostringstream os;
  os << "k,re,im\n";
  for (int k = y.min_index(); k <= y.max_index(); ++k)
    os << k << ',' << format_double(y.at(k).real()) << ',' << format_double(y.at(k).imag()) << '\n';
  write_text_file(path, os.str());
}

SampleVector read_samples_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path, 3);
  if (rows.empty() || rows.size() % 2 == 0)
    throw Error(ErrorKind::BadInput, "io", path + ": need 2m-1 samples for k = -m+1..m-1");
  const int m = static_cast<int>((rows.size() + 1) / 2);
  SampleVector y(m);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& r : rows) {
    const double k = r[0];
    if (k != std::floor(k) || k < -m + 1 || k > m - 1)
      throw Error(ErrorKind::BadInput, "io", path + ": sample index out of range");
    const int ki = static_cast<int>(k);
    if (seen[static_cast<std::size_t>(ki + m - 1)])
      throw Error(ErrorKind::BadInput, "io", path + ": duplicate sample index");
    seen[static_cast<std::size_t>(ki + m - 1)] = true;
    y.at(ki) = cdouble(r[1], r[2]);
  }
  return y;
}

void write_truth_csv(const std::string& path, const SignalParams& p) {
  std::ostringstream os;
  os << "j,frequency,amplitude_re,amplitude_im\n";
  for (std::size_t j = 0; j < p.size(); ++j)
    os << j << ',' << format_double(p.frequencies[j]) << ',' << format_double(p.amplitudes[j].real()) << ','
       << format_double(p.amplitudes[j].imag()) << '\n';
  write_text_file(path, os.str());
}

SignalParams read_truth_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path, 4);
  std::vector<double> x;
  std::vector<cdouble> a;
  for (const auto& r : rows) {
    x.push_back(r[1]);
    a.emplace_back(r[2], r[3]);
  }
  return SignalParams(x, a);
}

void apply_config_json(const Json& j, EstimatorConfig& c) {
  if (!j.is_object()) throw Error(ErrorKind::BadInput, "config", "config must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "gamma") c.gamma = v.get<double>();
      else if (k == "alpha") c.alpha = v.get<double>();
      else if (k == "grid_spacing") c.grid_spacing = v.get<double>();
      else if (k == "h" || k == "step") c.step = v.get<double>();
      else if (k == "n") c.n = v.get<int>();
      else if (k == "epsilon") c.epsilon = v.get<double>();
      else if (k == "n_min") c.n_min = v.get<int>();
      else if (k == "n_max") c.n_max = v.get<int>();
      else if (k == "policy") {
        const auto p = v.get<std::string>();
        if (p == "fixed") c.policy = IterationPolicy::FixedN;
        else if (p == "terminate") c.policy = IterationPolicy::Terminate;
        else throw Error(ErrorKind::BadInput, "config", "policy must be 'fixed' or 'terminate'");
      } else if (k == "svd") c.svd = parse_svd_method(v.get<std::string>());
      else if (k == "amplitude") c.amplitude = parse_amplitude_method(v.get<std::string>());
      else throw Error(ErrorKind::BadInput, "config", "unknown config key '" + k + "'");
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadInput, "config", e.what());
  }
}

NoiseModel noise_from_json(const Json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "gaussian-diag") return NoiseModel::gaussian(j.at("sigma").get<double>(), j.value("r", 0.0));
    if (kind == "deterministic") return NoiseModel::deterministic(read_samples_csv(j.at("file").get<std::string>()));
    throw Error(ErrorKind::BadInput, "noise", "unknown noise kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadInput, "noise", e.what());
  }
}

Json noise_to_json(const NoiseModel& n) {
  if (n.kind == NoiseModel::Kind::GaussianDiag) return Json{{"kind", "gaussian-diag"}, {"sigma", n.sigma}, {"r", n.r}};
  return Json{{"kind", "deterministic"}, {"m", n.fixed.m()}};
}

Json result_to_json(const EstimationResult& r) {
  Json j;
  j["s_hat"] = r.s_hat;
  j["frequencies"] = r.frequencies;
  std::vector<double> re, im;
  for (const auto& a : r.amplitudes) {
    re.push_back(a.real());
    im.push_back(a.imag());
  }
  j["amplitudes_re"] = re;
  j["amplitudes_im"] = im;
  j["iterations"] = r.iterations;
  std::vector<bool> flagged(r.flagged.begin(), r.flagged.end());
  j["flagged"] = flagged;
  j["singular_values"] = std::vector<double>(r.singular_values.data(), r.singular_values.data() + r.singular_values.size());
  j["theta_hat"] = r.theta_hat;
  j["n_used"] = r.n_used;
  j["counters"] = Json{{"grid_evals", r.counters.grid_evals}, {"gradient_evals", r.counters.gradient_evals}};
  j["seconds"] = Json{{"svd", r.seconds.svd}, {"music", r.seconds.music}, {"amplitude", r.seconds.amplitude}};
  return j;
}

}  // namespace music
