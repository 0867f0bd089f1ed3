#pragma once

#include <stdexcept>
#include <string>

namespace music {

enum class ErrorKind {
  BadInput,
  Domain,
  Degenerate,
  IllPosed,
  NoSignal,
  ClusterMismatch,
  Numerical,
  Failure,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `stage` names the pipeline step that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& what, int found = -1)
      : std::runtime_error(what), kind_(kind), stage_(std::move(stage)), found_(found) {}

  ErrorKind kind() const { return kind_; }
  const std::string& stage() const { return stage_; }
  // Cluster count observed for ClusterMismatch, -1 otherwise.
  int found() const { return found_; }

  // Input errors map to CLI exit code 2, everything else to 1.
  bool is_input_error() const { return kind_ == ErrorKind::BadInput || kind_ == ErrorKind::Domain; }

 private:
  ErrorKind kind_;
  std::string stage_;
  int found_;
};

}  // namespace music
