#pragma once

#include "hitr/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hitr {

/// Euclidean distance between two points, in millimeters.
double euclidean_distance(const Point3& p, const Point3& q);

/// Target registration error: the Euclidean distance between a reference
/// landmark and its registered (warped) prediction.
double tre(const Point3& reference, const Point3& prediction);

/// Consensus (reference) landmark positions, one per landmark key.
/// Each point is a convex combination of its annotations, so it lies
/// inside their convex hull.
class ConsensusStore {
  public:
    ConsensusStore() = default;
    explicit ConsensusStore(std::map<LandmarkKey, Point3> points) : points_(std::move(points)) {}

    const std::map<LandmarkKey, Point3>& points() const { return points_; }
    const Point3& at(const LandmarkKey& key) const;
    bool contains(const LandmarkKey& key) const { return points_.count(key) > 0; }
    bool has_image(const std::string& image_id) const;

    std::vector<std::string> image_ids() const; ///< sorted, unique
    /// Landmark keys belonging to one image, in store order.
    std::vector<LandmarkKey> image_keys(const std::string& image_id) const;
    std::size_t size() const { return points_.size(); }

  private:
    std::map<LandmarkKey, Point3> points_;
};

/// Consensus position for one landmark: the unweighted mean of the
/// annotations, or, when reliability weights are given, their weighted
/// average. Weights are restricted to the annotators present, must sum to
/// 1 within 1e-6, and are renormalized exactly before use.
///
/// Errors: empty annotation list, a listed annotator without a weight, a
/// negative weight, or a restricted weight sum off by more than 1e-6.
Point3 consensus_landmark(const std::vector<Annotation>& annotations,
                          const std::optional<WeightMap>& weights = std::nullopt);

/// Consensus for every landmark in the store; uses the store's weights
/// iff present. Errors from consensus_landmark are rethrown with the
/// offending key attached.
ConsensusStore build_consensus(const AnnotationStore& store);

/// Per-landmark distance multiset: each annotator's distance to the
/// consensus point. Cardinality equals the number of annotators there.
DistanceSet annotator_distance_set(const AnnotationStore& store, const ConsensusStore& consensus,
                                   const LandmarkKey& key);

/// Pools per-landmark distance sets over the whole dataset (global scope)
/// or over one image domain (image scope). Duplicates preserved.
DistanceSet pool_distances(const AnnotationStore& store, const ConsensusStore& consensus,
                           const DistanceScope& scope);

/// Hit classification for one landmark: 1 iff the prediction lies within
/// the ball of the given radius around the reference. The comparison is
/// exact floating-point <= with no epsilon; a distance exactly on the
/// boundary is a hit. Negative radius is an error.
int hit_indicator(const Point3& reference, const Point3& prediction, double radius);

/// What to do when an algorithm produced no prediction for a landmark:
/// count it as a miss (and record a warning), or fail hard.
enum class MissingPolicy { miss, strict };

/// One missing-prediction event, recorded under MissingPolicy::miss.
struct MissingPrediction {
    std::string algorithm_id;
    LandmarkKey key;
};

/// Hit classification results for (algorithm, landmark) pairs.
/// Invariant: hit == 1 iff distance <= radius_used.
struct HitRecord {
    int hit = 0;
    double distance = 0.0;    // mm
    double radius_used = 0.0; // mm
};
struct HitMatrix {
    std::map<std::pair<std::string, LandmarkKey>, HitRecord> cells;
};

/// Raw hit count over one image: the hit rate is hits / landmarks.
struct HitCount {
    long hits = 0;
    long landmarks = 0;
};

/// Counts hits of one algorithm over one image at a single radius.
/// Missing predictions count as misses under MissingPolicy::miss (each
/// event appended to `missing` when given) and are an error under strict.
/// An image with no landmarks is an error.
HitCount count_hits(const ConsensusStore& consensus, const PredictionStore& predictions,
                    const std::string& algorithm_id, const std::string& image_id, double radius,
                    MissingPolicy policy = MissingPolicy::miss,
                    std::vector<MissingPrediction>* missing = nullptr);

/// Hit rate for one algorithm over one image: hits divided by the number
/// of consensus landmarks in that image. The scalar-radius overload uses
/// the same radius everywhere; the map overload must provide a radius for
/// every landmark of the image.
///
/// Missing predictions count as misses under MissingPolicy::miss (each
/// event appended to `missing` when given) and are an error under strict.
/// An image with no landmarks is an error.
double hit_rate(const ConsensusStore& consensus, const PredictionStore& predictions,
                const std::string& algorithm_id, const std::string& image_id, double radius,
                MissingPolicy policy = MissingPolicy::miss,
                std::vector<MissingPrediction>* missing = nullptr);
double hit_rate(const ConsensusStore& consensus, const PredictionStore& predictions,
                const std::string& algorithm_id, const std::string& image_id,
                const std::map<LandmarkKey, double>& radii,
                MissingPolicy policy = MissingPolicy::miss,
                std::vector<MissingPrediction>* missing = nullptr);

/// Hit rate of one algorithm judged by one annotator: over all landmarks
/// annotated by that annotator and predicted by the algorithm, each
/// landmark's radius is the annotator's own distance to the consensus.
/// Pools across images. Errors when the annotator covers no predicted
/// landmark.
double per_annotator_hit_rate(const AnnotationStore& store, const ConsensusStore& consensus,
                              const PredictionStore& predictions, const std::string& algorithm_id,
                              const std::string& annotator_id);

/// Classifies every predicted landmark of one algorithm against
/// per-landmark radii. Landmarks without predictions are skipped under
/// miss (recorded in `missing`) and an error under strict; landmarks
/// without a radius entry are skipped.
HitMatrix build_hit_matrix(const ConsensusStore& consensus, const PredictionStore& predictions,
                           const std::string& algorithm_id,
                           const std::map<LandmarkKey, double>& radii,
                           MissingPolicy policy = MissingPolicy::miss,
                           std::vector<MissingPrediction>* missing = nullptr);

} // namespace hitr
