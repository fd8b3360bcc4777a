#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace zorich::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitVerifyFailed = 3;

inline constexpr const char* kToolName = "zorich";
inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
  int d = 2;
  std::optional<double> rho;  // pi/2 for d = 2, else 1
  double a = 50.0;
  double alpha = 0.5;
  int samples_per_axis = 64;
  std::optional<std::int64_t> N;
  std::int64_t N_cap = 10000;
  bool unit_constants = false;

  // orbits and grids
  int n_max = 200;
  std::optional<double> escape_threshold;
  double attract_tol = 1e-8;
  int window_len = 3;
  std::optional<double> radius_cap;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  int resolution = 101;

  // chaos game and box counting
  std::int64_t points = 100000;
  int burn_in = 32;
  int streams = 16;
  int box_scales = 8;
  double finest_scale = 1e-3;  // relative to the cloud diameter

  // lattice sum
  double t = 2.0;
  double b = 3.0;

  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  int threads = 0;           // 0: environment or hardware default
  double perturb_c4 = 1.0;  // test hook for verify

  double resolved_rho() const;
  /// Throws Error(InvalidArgument) on the first invalid field.
  void validate() const;
  /// Every field that affects results; threads and output paths excluded.
  nlohmann::json to_json() const;
  /// Overrides the fields present in `j`. Unknown keys are rejected.
  void apply_json(const nlohmann::json& j);
  /// FNV-1a of the canonical to_json() dump, as 16 hex digits.
  std::string hash() const;
};

nlohmann::json provenance(const RunConfig& config);

/// Writes to a temporary sibling, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

int cmd_bounds(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sum(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_attractor(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zorich::cli
