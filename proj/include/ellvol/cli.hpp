#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ellvol/special_functions.hpp"
#include "ellvol/spectra.hpp"

namespace ellvol::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitIo = 3;

inline constexpr std::size_t kMaxAxesFromFile = 10'000'000;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by parse_args for --help; what() carries the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { constants, spectrum, volume, scan, clt, asymptotics };
enum class Format { json, csv };
enum class Emit { summary, samples };
enum class Lemma { factorial, sum_power_log, log_pow, prod_log };

struct RunConfig {
  Command command = Command::constants;
  std::vector<Exponent> p;           ///< exactly one except for `spectrum`
  std::optional<double> q;
  std::optional<std::size_t> n;
  std::optional<double> t;
  std::optional<double> t_min;
  std::optional<double> t_max;
  unsigned t_steps = 31;
  std::optional<std::string> family;     ///< family descriptor, including file:<path>
  std::optional<std::string> axes_file;  ///< --axes-file
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  Format format = Format::json;
  std::optional<std::string> output;
  Emit emit = Emit::summary;
  Lemma lemma = Lemma::prod_log;
  double alpha = 0.0;
  double beta = 0.0;
  unsigned terms = 3;
  std::vector<std::size_t> n_grid;
};

[[nodiscard]] std::string to_string(Command c);
[[nodiscard]] std::string to_string(Lemma l);

/// Parses argv (without the program name). Throws UsageError or HelpRequested.
[[nodiscard]] RunConfig parse_args(const std::vector<std::string>& args);

/// Parses `constant:<c>`, `periodic:<v,…>[;head=<u,…>]`, `powerlog:<a>,<b>`, `file:<path>`.
[[nodiscard]] SpectrumFamily parse_family(const std::string& text);

/// One positive decimal per line; blank lines and `#` comments are skipped.
[[nodiscard]] SemiAxesRow load_axes_file(const std::string& path);

/// Executes the command and writes one JSON document or CSV table to `out`
/// (or to config.output). Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run, with usage errors reported on `err`.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ellvol::cli
