#pragma once

#include "weightlab/quadrature.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weightlab::cli {

enum class Subcommand { analyze, conditions, apply, kernel, build_weight, probe, suite };
enum class OutputFormat { json, csv };

std::string to_string(Subcommand s);

/// Bad flag or flag value. The message names the flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input file; the message starts with the path.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed and validated command line. Fields a subcommand does not accept keep their defaults.
struct CommandSpec {
  Subcommand subcommand = Subcommand::analyze;
  std::string weight_path;  // --weight: WeightSpec JSON
  std::string input_path;   // --input: coefficient series (apply) or WeightSpec (build-weight)
  std::optional<double> p;
  std::optional<double> q;
  std::optional<int> n_out;  // --n-out / --N; apply defaults to 64, two-path to 16
  int degree = 0;  // --degree: max degree of random polynomials (probe)
  double tol = kDefaultTol;
  int grid_depth = 80;
  std::optional<int> n_max;  // conditions: N_max; kernel: term cap; build-weight: plateau count
  std::uint64_t seed = 42;
  std::string output;  // empty: stdout
  OutputFormat format = OutputFormat::json;
  bool timings = false;

  std::string condition = "all";  // conditions
  double dilation = 2.0;          // --K: dcheck dilation (analyze, conditions); 0 in build-weight picks the default
  std::string kind;               // kernel: B|K|G; build-weight: weight kind
  double t = 0.5;                 // kernel
  double z_re = 0.5;
  double z_im = 0.0;
  bool sublinear = false;  // apply
  double beta = 0.0;       // build-weight
  double c = 1.0;
  std::string base_path;
  std::string probe;  // probe name
  std::string space_x = "HLp";
  std::string space_y = "HLp";
  std::string family = "power_block";
};

/// Arguments without the program name. Throws UsageError or HelpRequested.
CommandSpec parse_command(const std::vector<std::string>& args);

/// Runs the command, writing the report to spec.output or `out`.
/// Returns 0 on success, 2 when every verdict or outcome is inconclusive,
/// 1 when a probe fails. Throws on input, IO and numerical errors.
int run(const CommandSpec& spec, std::ostream& out);

/// parse_command + run with errors mapped to messages on `err` and exit code 1.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weightlab::cli
