#ifndef WISHLAB_HARNESS_HPP
#define WISHLAB_HARNESS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wishlab/integrators.hpp"
#include "wishlab/model.hpp"

namespace wishlab {

enum class Command { simulate, regime, phase_diagram, verify, stationary_compare, laplace_check, collision_scan };
const char* to_string(Command c) noexcept;
/// Throws ConfigError("command", ...) for unknown names.
Command parse_command(const std::string& name);

/// One swept coefficient: alpha, beta or gamma.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

/// Cartesian grid; `alpha=0.4,0.7;beta=0.5:1.5:0.5` lists values or start:stop:step ranges.
struct SweepGrid {
  std::vector<SweepAxis> axes;

  /// Grid points in row-major order (last axis fastest), other fields from `base`.
  std::vector<ModelParams> points(const ModelParams& base) const;
};

SweepGrid parse_sweep(const std::string& text);

struct ExperimentSpec {
  Command command = Command::simulate;
  ModelParams params;
  SimConfig config;
  std::optional<SweepGrid> sweep;
  std::string sweep_text;
  std::string out_dir = "out";
  /// collision-scan: partial sum index, 0 scans k = 1..n.
  int k = 0;
  /// laplace-check grid.
  std::vector<double> mu{0.5, 1.0};
  std::vector<double> t{0.5, 1.0, 2.0};
  /// stationary-compare: Metropolis sample size.
  long long mh_samples = 10000;
  /// verify: criteria to run, empty for all.
  std::vector<int> only;
};

/// Sets one key (underscores or hyphens); throws ConfigError naming the key.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Flat `key = value` lines; `#` starts a comment.
void apply_config_text(ExperimentSpec& spec, std::string_view text);
void apply_config_file(ExperimentSpec& spec, const std::string& path);

/// Every setting with its effective value, as one line of key=value pairs.
std::string provenance(const ExperimentSpec& spec);

/// Runs one command, writing artifacts under spec.out_dir and a summary to `out`.
/// Returns 0, or 2 when verify sees a failing criterion, or 3 on numerical failure.
/// Library errors propagate.
int run_command(const ExperimentSpec& spec, std::ostream& out);

/// Exit code for an exception escaping run_command: 3 for numerical failures, 1 otherwise.
int exit_code_for(const std::exception& e) noexcept;

/// Full command line front end; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace wishlab

#endif  // WISHLAB_HARNESS_HPP
