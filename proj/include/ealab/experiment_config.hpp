#pragma once
#include <string>

namespace ealab {

/// Run configuration shared by the command-line experiments, read from a
/// plain-text file of `key = value` lines ('#' starts a comment).  Unknown
/// and duplicate keys are rejected so silent typos cannot change a run.
struct ExperimentConfig {
  int resolution = 64;
  double alpha = 1.0;
  double dt = 1e-3;
  double t_final = 1.0;
  double lambda = 8.0;
  double r = 0.5;
  int d = 2;
  int direction_set = 0;       // index into the rotated direction sets
  std::string parameter_file;  // exponent-ledger input, when a command needs it
  std::string output_dir;      // resolved against EAF_OUTPUT_DIR by the CLI
  unsigned long seed = 2026;

  /// Throws std::invalid_argument when a physical value is not positive.
  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Round-trip formatting: parse_config_text(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

}  // namespace ealab
