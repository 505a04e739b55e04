#pragma once

#include "hitr/metrics.hpp"
#include "hitr/radii.hpp"
#include "hitr/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hitr {

/// One (hit, TRE) pair for the hit-vs-error comparison.
struct PairedObservation {
    int hit = 0;
    double tre = 0.0; // mm
};
using PairedObservations = std::vector<PairedObservation>;

/// Product-moment correlation of the 0/1 hit indicator against TRE
/// (point-biserial form). Errors with "undefined correlation" when fewer
/// than two pairs are given or either variable is constant.
double pearson(const PairedObservations& pairs);

/// Five-number summary plus mean of a distance population. Quartiles use
/// linear interpolation between closest ranks.
struct SummaryStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::size_t n = 0;
};

/// Five-number summary of an arbitrary sample. Errors on an empty sample.
SummaryStats summarize(const std::vector<double>& values);

/// Pools the TRE of each of the algorithm's predictions against every
/// individual annotator landmark (not the consensus) and summarizes the
/// pool. Errors when the algorithm has no prediction with annotations.
SummaryStats tre_summary(const PredictionStore& predictions, const AnnotationStore& store,
                         const std::string& algorithm_id);

struct RankedAlgorithm {
    std::string algorithm_id;
    double hit_rate = 0.0;
    std::optional<double> runtime_seconds;
};

/// Ranks algorithms by interpolated hit rate at one threshold radius,
/// descending. Ties break ascending by runtime (entries without one sort
/// after timed ones), then lexicographically by algorithm id. Runtimes
/// are attached to the rows when provided.
std::vector<RankedAlgorithm> threshold_ranking(
    const std::vector<HitRateCurve>& curves, double r,
    const std::optional<std::map<std::string, double>>& runtimes = std::nullopt);

/// Per-(algorithm, annotator) hit rates, with a per-algorithm five-point
/// spread across annotators (the boxplot content).
struct AnnotatorSpread {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};
struct AnnotatorMatrix {
    std::map<std::pair<std::string, std::string>, double> cells; // (algorithm, annotator)
    std::map<std::string, AnnotatorSpread> per_algorithm;
};

/// Evaluates per_annotator_hit_rate for every (algorithm, annotator) pair
/// with coverage; pairs without coverage are skipped. Errors when no pair
/// has coverage at all.
AnnotatorMatrix per_annotator_matrix(const AnnotationStore& store, const ConsensusStore& consensus,
                                     const PredictionStore& predictions);

/// Radius source for the hit side of the hit-vs-TRE comparison: each
/// annotator's own distance to the consensus (one pair per algorithm,
/// annotator, and covered landmark), or one fixed radius (one pair per
/// algorithm and predicted landmark).
struct CorrelationRadii {
    enum class Mode { per_annotator, fixed };
    Mode mode = Mode::per_annotator;
    double fixed_radius = 0.0;

    static CorrelationRadii per_annotator() { return {}; }
    static CorrelationRadii fixed(double radius) { return {Mode::fixed, radius}; }
};

/// Paired (hit, TRE) observations pooled across all algorithms, plus the
/// per-algorithm breakdown.
struct CorrelationPairs {
    PairedObservations pooled;
    std::map<std::string, PairedObservations> per_algorithm;
};

CorrelationPairs paired_observations(const AnnotationStore& store, const ConsensusStore& consensus,
                                     const PredictionStore& predictions,
                                     const CorrelationRadii& radii = CorrelationRadii::per_annotator());

} // namespace hitr
