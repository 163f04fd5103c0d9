#pragma once

// Verification runs: configuration, identity records, suites and report
// emission. Every identity is checked as a maximum residual over seeded
// sample points of the sphere bundle, evaluated on adapted frames.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbl/lagrangian_weingarten.hpp"

namespace sbl {

/// Invalid configuration: unknown metric or suite, bad value, incompatible
/// dimension. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named tolerances with their defaults for the given backend.
std::map<std::string, double> default_tolerances(Backend backend);

struct RunConfig {
  std::string command = "verify";  // verify | classify | integrate | surface
  std::string metric = "sphere3";
  std::map<std::string, double> metric_params;  // c, eps
  double s = 1.0;
  int samples = 30;
  std::uint64_t seed = 20240607;
  Backend backend = Backend::Dual;
  std::optional<double> tol;                 // overrides every tolerance
  std::map<std::string, double> tol_overrides;  // per-name, wins over `tol`
  std::vector<std::string> suites;           // empty: every suite valid for the dimension
  std::string format = "text";               // text | json
  std::string out;                           // empty: stdout
  // surface and fibre selection
  std::string surface;
  std::map<std::string, double> surface_params;  // a, h, amp
  std::optional<double> t0;
  Branch branch = Branch::Upper;
  std::optional<Vec3<double>> x;

  /// Tolerances after applying `tol` and `tol_overrides`. Throws ConfigError
  /// for an override naming an unknown tolerance.
  std::map<std::string, double> tolerances() const;
  ChartMetric make_chart() const;
};

/// All suite names in report order.
const std::vector<std::string>& suite_names();
/// Base dimension a suite needs.
int suite_dimension(const std::string& suite);

/// Settings are string key/value pairs. Keys: command, metric, c, eps, s,
/// seed, samples, backend, tol, tol.<name>, suites, format, out, surface, a,
/// h, amp, t0, branch, x. Throws ConfigError on unknown keys or bad values.
RunConfig config_from_settings(const std::map<std::string, std::string>& settings);

/// Line-oriented `key = value` text; `#` starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Layers settings: file, then environment (SBL_<KEY>, key upper-cased with
/// '.' and '-' mapped to '_'), then flags. Later layers win.
std::map<std::string, std::string> merge_settings(
    const std::map<std::string, std::string>& file, const std::function<std::optional<std::string>(const std::string&)>& env,
    const std::map<std::string, std::string>& flags);

// ---------------------------------------------------------------------------
// Reports.

enum class Status { Pass, Fail, MismatchVsPaper };
std::string to_string(Status s);
Status status_from_string(const std::string& s);

struct Record {
  std::string id;      // "<suite>.<name>", stable
  std::string anchor;  // the identity as displayed
  int samples = 0;
  double max_residual = 0;
  double tol = 0;
  Status status = Status::Pass;
  std::string note;

  bool operator==(const Record&) const = default;
};

/// A computed quantity reported without asserting an identity.
struct Observation {
  std::string id;
  double value = 0;
  std::string note;

  bool operator==(const Observation&) const = default;
};

struct Summary {
  int records = 0, passed = 0, failures = 0, mismatches = 0, observations = 0;
  bool operator==(const Summary&) const = default;
};

struct VerificationReport {
  std::map<std::string, std::string> config;  // echo, including every tolerance
  std::vector<Record> records;                // sorted by id
  std::vector<Observation> observations;      // sorted by id
  Summary summary;

  /// Sorts and recounts.
  void finalize();
  int exit_code() const { return summary.failures == 0 ? 0 : 1; }
  const Record* find(const std::string& id) const;
  bool operator==(const VerificationReport&) const = default;
};

std::string emit_text(const VerificationReport& r);
std::string emit_json(const VerificationReport& r);
VerificationReport parse_json(const std::string& text);
/// Writes in the configured format to `out` (or stdout when empty). Throws
/// std::runtime_error when the path cannot be written.
void emit_report(const VerificationReport& r, const std::string& format, const std::string& out);

// ---------------------------------------------------------------------------
// Commands.

/// Seeded sample points: x uniform in the chart's sampling box, u a
/// normalised Gaussian combination of a g-orthonormal basis, scaled to s.
std::vector<BundlePoint> sample_points(const ChartMetric& m, double s, int count, std::uint64_t seed);

VerificationReport cmd_verify(const RunConfig& cfg);
VerificationReport cmd_classify(const RunConfig& cfg);
VerificationReport cmd_integrate(const RunConfig& cfg);
/// Requires cfg.t0 (ConfigError otherwise).
VerificationReport cmd_surface(const RunConfig& cfg);
/// Dispatches on cfg.command.
VerificationReport run_command(const RunConfig& cfg);

}  // namespace sbl
