#pragma once

#include "hitr/metrics.hpp"
#include "hitr/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace hitr {

/// Median and raw (unscaled) median absolute deviation of a distance
/// population. Even cardinality takes the mean of the two central
/// elements; no 1.4826 consistency factor is applied.
struct RobustStats {
    double median = 0.0;
    double mad = 0.0;
};

/// Errors on an empty distance set ("cannot extrapolate from empty
/// distance set"). A set of all zeros is legal and yields (0, 0).
RobustStats robust_stats(const DistanceSet& d);

/// Radius extrapolated from a distance population:
/// max(0, median + mu * MAD). Clamped at zero so sub-median multipliers
/// stay meaningful.
double radius_from_mu(const DistanceSet& d, double mu);

/// Same extrapolation restricted to one image domain's pooled distances.
double radius_from_mu_per_image(const AnnotationStore& store, const ConsensusStore& consensus,
                                const std::string& image_id, double mu);

/// steps+1 evenly spaced multiplier values covering [mu_min, mu_max],
/// endpoints included. Equal endpoints collapse to a single value.
std::vector<double> mu_grid(double mu_min, double mu_max, int steps);

// Default multiplier grid: -2..30 in steps of 1 (33 points). Spans
// sub-median radii up to well past the tail of typical inter-annotator
// distance populations at brain-MR scale. Configurable from the CLI.
inline constexpr double kDefaultMuMin = -2.0;
inline constexpr double kDefaultMuMax = 30.0;
inline constexpr int kDefaultMuSteps = 32;

/// One sampled radius with its multiplier provenance.
struct SchedulePoint {
    double mu = 0.0;
    double radius = 0.0; // mm, clamped >= 0
};

/// Radius samples for one scope (the whole dataset or one image domain),
/// derived from that scope's distance population. Points are sorted
/// strictly increasing in mu; radii are non-decreasing.
struct RadiusSchedule {
    DistanceScope scope;
    std::vector<SchedulePoint> points;
    RobustStats source_stats;
};

/// Schedule from a distance population; scope is inherited from the set.
/// The mu values must be strictly increasing.
RadiusSchedule make_schedule(const DistanceSet& d, std::span<const double> mus);

/// One schedule per image domain, each from its own pooled distances.
std::map<std::string, RadiusSchedule> make_image_schedules(const AnnotationStore& store,
                                                           const ConsensusStore& consensus,
                                                           std::span<const double> mus);

/// How a dataset-level hit rate is assembled from images: equal weight
/// per image (every image counts the same regardless of its landmark
/// count), or one pool of landmarks across all images.
enum class CurveAggregation { image_mean, pooled_landmarks };

/// One point of a hit-rate curve. Curves are linearly interpolated
/// between samples.
struct CurveSample {
    double mu = 0.0;
    double radius = 0.0;   // mm
    double hit_rate = 0.0; // in [0, 1]
};

/// Per-algorithm hit rate as a function of radius. Radii are strictly
/// increasing (samples with duplicate radii are collapsed; they are
/// identical by construction).
struct HitRateCurve {
    std::string algorithm_id;
    std::vector<CurveSample> samples;
};

/// Curve with one sample per schedule point, the same radius applied to
/// every landmark in every image (global scope).
HitRateCurve build_curve(const ConsensusStore& consensus, const PredictionStore& predictions,
                         const std::string& algorithm_id, const RadiusSchedule& schedule,
                         MissingPolicy policy = MissingPolicy::miss,
                         CurveAggregation aggregation = CurveAggregation::image_mean,
                         std::vector<MissingPrediction>* missing = nullptr);

/// Curve where each image uses its own radius at each mu (image scope).
/// All schedules must share one mu grid; the sample's radius column is the
/// equal-weight mean of the per-image radii at that mu.
HitRateCurve build_curve(const ConsensusStore& consensus, const PredictionStore& predictions,
                         const std::string& algorithm_id,
                         const std::map<std::string, RadiusSchedule>& image_schedules,
                         MissingPolicy policy = MissingPolicy::miss,
                         CurveAggregation aggregation = CurveAggregation::image_mean,
                         std::vector<MissingPrediction>* missing = nullptr);

/// Hit rate at an arbitrary radius: linear between bracketing samples,
/// clamped to the first/last sample outside the sampled range. Errors on
/// an empty curve.
double interpolate(const HitRateCurve& curve, double r);

/// A radius interval on which two curves trade places. sign_change is the
/// sign of (a - b) to the right of the crossing: +1 when a overtakes b,
/// -1 when b overtakes a.
struct Crossing {
    double radius_lo = 0.0;
    double radius_hi = 0.0;
    int sign_change = 0;
};

/// Sign changes of (a - b) over the overlap of the two sampled ranges,
/// evaluated at the union of the curves' knot radii. Curves that touch
/// without trading places are not crossings. Errors when the sampled
/// ranges do not overlap.
std::vector<Crossing> find_crossings(const HitRateCurve& a, const HitRateCurve& b);

} // namespace hitr
