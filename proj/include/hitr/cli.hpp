#pragma once

#include "hitr/io.hpp"
#include "hitr/metrics.hpp"
#include "hitr/radii.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace hitr {

/// Scope on which radius schedules are derived: one schedule from the
/// whole dataset's distances, or one per image domain.
enum class ScheduleScope { global, image };

/// Everything an `eval` run depends on. Echoed verbatim into the report
/// so results are reproducible from the report alone.
struct EvalConfig {
    std::filesystem::path annotations;
    std::filesystem::path predictions;
    std::optional<std::filesystem::path> weights;
    std::optional<std::filesystem::path> runtimes;
    std::filesystem::path out_dir;
    double mu_min = kDefaultMuMin;
    double mu_max = kDefaultMuMax;
    int mu_steps = kDefaultMuSteps;
    ScheduleScope scope = ScheduleScope::global;
    MissingPolicy missing_policy = MissingPolicy::miss;
    CurveAggregation aggregation = CurveAggregation::image_mean;
    /// When set, the hit-vs-TRE pairs use this fixed radius instead of the
    /// per-annotator distances.
    std::optional<double> correlation_radius;
};

/// Full evaluation pipeline: parse, validate, consensus, schedules,
/// curves, per-annotator rates, TRE summaries, correlation, ranking;
/// writes report.json, curves.csv, curves.svg, tre_boxplot.svg and
/// annotator_boxplot.svg into out_dir. Returns the report.
EvaluationReport run_eval(const EvalConfig& config);

struct SimulateConfig {
    std::filesystem::path annotations; ///< reference landmarks (consensus is taken)
    std::optional<std::filesystem::path> distances; ///< annotations to derive D from (default: same file)
    std::filesystem::path out_csv;
    int annotators = 20;
    std::uint64_t seed = 42;
    bool normalize_per_dimension = false;
};

/// Simulates an annotator cohort around the reference consensus and
/// writes it in the standard annotations format. Same seed, same bytes.
void run_simulate(const SimulateConfig& config);

struct RankConfig {
    std::filesystem::path curves_csv;
    double threshold = 0.0;
    std::optional<std::filesystem::path> runtimes;
    std::optional<std::filesystem::path> out_csv;
};

/// Threshold ranking over curves read back from a curves CSV. Prints the
/// table and optionally writes it as CSV.
std::vector<RankedAlgorithm> run_rank(const RankConfig& config);

struct DemoConfig {
    std::filesystem::path out_dir;
    std::uint64_t seed = 42;
};

/// Writes a small deterministic dataset (annotations.csv, predictions.csv,
/// runtimes.csv): 3 images with 6-10 landmarks each, 3 annotators, and two
/// synthetic algorithms with clearly separated error levels.
void run_demo(const DemoConfig& config);

/// Command-line entry point. Exit codes: 0 success, 1 data or validation
/// error, 2 usage error.
int run_cli(int argc, const char* const* argv);

} // namespace hitr
