#pragma once

#include "hitr/analysis.hpp"
#include "hitr/radii.hpp"
#include "hitr/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hitr {

// File formats. All CSVs are UTF-8 with `.` as the decimal separator and
// comma-separated fields that must not themselves contain commas.
//
//   annotations:  image_id,landmark_id,annotator_id,x_mm,y_mm,z_mm
//   predictions:  algorithm_id,image_id,landmark_id,x_mm,y_mm,z_mm
//   weights:      annotator_id,lambda
//   runtimes:     algorithm_id,seconds
//   curves:       algorithm_id,mu,radius_mm,hit_rate
//
// Store CSVs print coordinates with shortest round-trip formatting, so
// write -> parse reproduces every point bit-exactly. Report and curve
// outputs use fixed 6-significant-digit formatting for byte-stable
// goldens.

/// Shortest decimal representation that parses back to the same double.
std::string format_full(double value);

/// Fixed formatting at the given number of significant digits.
std::string format_sig(double value, int significant = 6);

/// Rejects duplicate (image, landmark, annotator) triples and non-finite
/// numbers; malformed rows report their line number.
AnnotationStore parse_annotations(const std::filesystem::path& path);

/// Same rules keyed by (algorithm, image, landmark). An optional runtimes
/// sidecar attaches per-algorithm runtimes; negative runtimes are errors.
PredictionStore parse_predictions(const std::filesystem::path& path,
                                  const std::optional<std::filesystem::path>& runtimes_path =
                                      std::nullopt);

WeightMap parse_weights(const std::filesystem::path& path);
std::map<std::string, double> parse_runtimes(const std::filesystem::path& path);

void write_annotations(const AnnotationStore& store, const std::filesystem::path& path);
void write_predictions(const PredictionStore& store, const std::filesystem::path& path);
void write_weights(const WeightMap& weights, const std::filesystem::path& path);
void write_runtimes(const std::map<std::string, double>& runtimes,
                    const std::filesystem::path& path);

/// Per-algorithm slice of an evaluation report.
struct AlgorithmReport {
    std::string algorithm_id;
    HitRateCurve curve;
    double hit_rate_at_median = 0.0; ///< dataset hit rate at the mu=0 radius
    std::map<std::string, double> hit_rate_per_image; ///< at the mu=0 radius
    SummaryStats tre_mm;
    std::map<std::string, double> per_annotator; ///< annotator -> hit rate
    std::optional<SummaryStats> annotator_spread; ///< across annotators
    std::optional<double> runtime_seconds;
    std::optional<double> correlation; ///< per-algorithm hit-vs-TRE r
};

/// Everything one evaluation run produced. Serialization is byte-stable
/// for identical inputs and config: object keys sorted, floats at 6
/// significant digits.
struct EvaluationReport {
    std::string version;
    std::map<std::string, std::string> config; ///< verbatim run-config echo
    std::vector<AlgorithmReport> algorithms;   ///< sorted by algorithm_id
    double median_radius_mm = 0.0;
    std::vector<RankedAlgorithm> ranking_at_median;
    std::optional<double> pooled_correlation;
    std::size_t correlation_pairs = 0;
    std::string correlation_radii; ///< "per_annotator" or "fixed(<r>)"
    std::vector<std::string> warnings;
};

void write_report(const EvaluationReport& report, const std::filesystem::path& path);

void write_curves_csv(const std::vector<HitRateCurve>& curves, const std::filesystem::path& path);

/// Reads back a curves CSV: one curve per algorithm, sorted by id.
/// Samples with radii that collide after rounding are collapsed;
/// decreasing radii are an error.
std::vector<HitRateCurve> parse_curves_csv(const std::filesystem::path& path);

/// Line chart of hit rate vs radius: labeled axes, one polyline per
/// algorithm, sample dots, legend. Deterministic byte stream.
void write_curve_chart_svg(const std::vector<HitRateCurve>& curves,
                           const std::filesystem::path& path);

/// Five-number box chart, one box per labeled summary. Deterministic.
void write_box_chart_svg(const std::vector<std::pair<std::string, SummaryStats>>& summaries,
                         const std::string& title, const std::string& y_label,
                         const std::filesystem::path& path);

} // namespace hitr
