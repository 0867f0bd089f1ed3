#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "music/estimator.hpp"
#include "music/noise.hpp"

namespace music {

using Json = nlohmann::json;

// %.17g for every float; non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);
std::string format_double(double v);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Rows "k,re,im" for k = -m+1..m-1, header optional on read.
void write_samples_csv(const std::string& path, const SampleVector& y);
SampleVector read_samples_csv(const std::string& path);

// Rows "j,frequency,amplitude_re,amplitude_im".
void write_truth_csv(const std::string& path, const SignalParams& p);
SignalParams read_truth_csv(const std::string& path);

// Overlays keys present in j onto config; unknown keys throw BadInput.
void apply_config_json(const Json& j, EstimatorConfig& config);

// {"kind":"gaussian-diag","sigma":..,"r":..} or {"kind":"deterministic","file":..}.
NoiseModel noise_from_json(const Json& j);
Json noise_to_json(const NoiseModel& n);

Json result_to_json(const EstimationResult& r);

}  // namespace music
