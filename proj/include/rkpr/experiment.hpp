#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkpr/analysis.hpp"
#include "rkpr/ensemble.hpp"
#include "rkpr/kaczmarz.hpp"
#include "rkpr/lemmas.hpp"

namespace rkpr {

inline constexpr int kSchemaVersion = 1;

enum class InitKind { Planted, Spectral, Zero, Truth };

std::string_view to_string(InitKind k) noexcept;
InitKind parse_init(std::string_view name);
std::string_view to_string(Selection s) noexcept;
Selection parse_selection(std::string_view name);
std::string_view to_string(ZeroResidualPolicy p) noexcept;
ZeroResidualPolicy parse_policy(std::string_view name);

/// Everything a run depends on. Unset optionals take per-command defaults
/// (trials, max_iters, init, delta, samples, lambda; listed in README), so
/// one config file can drive every command.
struct ExperimentConfig {
  std::size_t n = 64;
  std::optional<std::size_t> m;  ///< overrides m_over_n when set
  double m_over_n = 8.0;
  Model model = Model::UnitSphere;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> max_iters;
  std::optional<InitKind> init;
  double planted_radius = 0.005;  ///< relative to ||x||
  std::optional<double> delta;
  std::uint64_t seed = 7;
  std::string output_dir = "rkpr_out";
  double signal_scale = 1.0;
  /// Permits a planted radius above 0.01 * delta; such runs assert nothing.
  bool allow_outside_hypothesis = false;
  double ball_radius_rel = 0.01;
  std::optional<std::size_t> samples;
  std::size_t threads = 1;
  bool serial = false;
  Selection selection = Selection::NormWeighted;
  ZeroResidualPolicy policy = ZeroResidualPolicy::PhaseOne;
  std::size_t power_iters = 200;
  double power_tol = 1e-8;
  std::optional<double> lambda;
  double sigma = 0.0;
  double alpha = 12.0;
  bool trace_files = true;

  std::size_t resolved_m() const;
  std::size_t worker_threads() const { return serial ? 1 : threads; }

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

/// Unknown keys are rejected so typos cannot silently fall back to defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// With include_runtime false, output_dir, threads, serial and trace_files
/// are left out; artifacts embed that form so they do not depend on where or
/// how parallel a run was.
nlohmann::json config_to_json(const ExperimentConfig& c, bool include_runtime = true);

/// Hash of the canonical JSON of the fields that affect results; output_dir,
/// threads, serial and trace_files are excluded. 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// {seed, generator, config_hash, schema_version}, embedded in every artifact.
nlohmann::json provenance_header(const ExperimentConfig& c);

struct RunSummary {
  bool asserted = false;  ///< false outside the theorem regime
  bool pass = true;       ///< always true when nothing is asserted
  nlohmann::json summary;
};

struct SolveResult {
  RunSummary run;
  ContractionStats stats;
  std::vector<double> median_dist;
  double max_ratio = 0.0;
  double ratio_bound = 0.0;
  double fitted_factor = 0.0;
};

/// Trial t uses RngStream(seed, t): draws x, then the ensemble, then z0,
/// then runs the solver. Writes trace_NNNN.{csv,json} (if trace_files),
/// aggregate.{csv,json} and summary.json into output_dir unless `write` is
/// false. The theorem regime is unit-sphere rows, m >= 8n, a planted start
/// with radius <= 0.01 delta and ball radius 0.01.
SolveResult cmd_solve(const ExperimentConfig& c, bool write = true);

struct RscScanResult {
  RunSummary run;
  std::vector<RscSample> samples;
  std::size_t rejected = 0;  ///< points with some a_j^* z == 0
  double min_gamma = 0.0;
  double threshold = 0.0;
};

/// Fixes one ensemble and x from RngStream(seed, 0), then evaluates the RSC
/// margin at `samples` points in the ball. The first three points (when
/// requested) are h = +r x/||x||, h = -r x/||x|| and h orthogonal to x at
/// the ball radius; point i >= 3 uses RngStream(seed, 1).split(i) with
/// radius uniform in (0, ball]. Writes rsc_scan.csv and rsc_summary.json.
RscScanResult cmd_rsc_scan(const ExperimentConfig& c, bool write = true);

struct VerifyResult {
  RunSummary run;
  std::vector<LemmaReport> reports;
};

/// lemma in {covariance, F, G, ratio, moment, all}. Throws
/// std::invalid_argument for unknown names and std::domain_error for
/// parameters outside a lemma's regime. Writes verify.jsonl when `write`.
VerifyResult cmd_verify(const ExperimentConfig& c, const std::string& lemma, bool write = true);

nlohmann::json report_to_json(const LemmaReport& r);

struct BaselineResult {
  RunSummary run;
  std::vector<double> final_error;  ///< ||z_T - x|| / ||x|| per trial
  std::vector<double> median_dist;
  bool monotone = true;
};

/// Linear randomized Kaczmarz on consistent systems y = A x; same artifact
/// layout as cmd_solve. Asserts monotone error per trial always, and the
/// median final relative error <= 1e-10 when max_iters >= 50n.
BaselineResult cmd_baseline(const ExperimentConfig& c, bool write = true);

}  // namespace rkpr
