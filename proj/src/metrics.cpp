#include "hitr/metrics.hpp"

#include <cmath>

namespace hitr {

namespace {

constexpr double kWeightSumTolerance = 1e-6;

} // namespace

double euclidean_distance(const Point3& p, const Point3& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    const double dz = p.z - q.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double tre(const Point3& reference, const Point3& prediction) {
    return euclidean_distance(reference, prediction);
}

const Point3& ConsensusStore::at(const LandmarkKey& key) const {
    auto it = points_.find(key);
    if (it == points_.end()) {
        throw Error("unknown landmark key " + key.str());
    }
    return it->second;
}

bool ConsensusStore::has_image(const std::string& image_id) const {
    auto it = points_.lower_bound(LandmarkKey{image_id, ""});
    return it != points_.end() && it->first.image_id == image_id;
}

std::vector<std::string> ConsensusStore::image_ids() const {
    std::vector<std::string> ids;
    for (const auto& [key, _] : points_) {
        if (ids.empty() || ids.back() != key.image_id) {
            ids.push_back(key.image_id);
        }
    }
    return ids;
}

std::vector<LandmarkKey> ConsensusStore::image_keys(const std::string& image_id) const {
    std::vector<LandmarkKey> keys;
    for (auto it = points_.lower_bound(LandmarkKey{image_id, ""});
         it != points_.end() && it->first.image_id == image_id; ++it) {
        keys.push_back(it->first);
    }
    return keys;
}

Point3 consensus_landmark(const std::vector<Annotation>& annotations,
                          const std::optional<WeightMap>& weights) {
    if (annotations.empty()) {
        throw Error("no annotations");
    }
    if (!weights) {
        Point3 sum;
        for (const auto& a : annotations) {
            sum.x += a.point.x;
            sum.y += a.point.y;
            sum.z += a.point.z;
        }
        const double n = static_cast<double>(annotations.size());
        return Point3{sum.x / n, sum.y / n, sum.z / n};
    }
    // Restrict the weights to the annotators present, then renormalize the
    // restricted weights to sum exactly to 1.
    double sum = 0.0;
    for (const auto& a : annotations) {
        auto it = weights->find(a.annotator_id);
        if (it == weights->end()) {
            throw Error("annotator " + a.annotator_id + " has no weight");
        }
        if (!(it->second >= 0.0)) {
            throw Error("negative weight for annotator " + a.annotator_id);
        }
        sum += it->second;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        throw Error("restricted weights sum to " + std::to_string(sum) +
                    ", expected 1 within 1e-6");
    }
    Point3 result;
    for (const auto& a : annotations) {
        const double lambda = weights->at(a.annotator_id) / sum;
        result.x += lambda * a.point.x;
        result.y += lambda * a.point.y;
        result.z += lambda * a.point.z;
    }
    return result;
}

ConsensusStore build_consensus(const AnnotationStore& store) {
    std::map<LandmarkKey, Point3> points;
    for (const auto& [key, annotations] : store.entries()) {
        try {
            points.emplace(key, consensus_landmark(annotations, store.weights()));
        } catch (const Error& e) {
            throw Error("consensus failed at " + key.str() + ": " + e.what());
        }
    }
    return ConsensusStore{std::move(points)};
}

DistanceSet annotator_distance_set(const AnnotationStore& store, const ConsensusStore& consensus,
                                   const LandmarkKey& key) {
    const auto& annotations = store.at(key);
    const Point3& reference = consensus.at(key);
    DistanceSet d;
    d.scope = DistanceScope::landmark(key.image_id, key.landmark_id);
    d.values.reserve(annotations.size());
    for (const auto& a : annotations) {
        d.values.push_back(euclidean_distance(a.point, reference));
    }
    return d;
}

DistanceSet pool_distances(const AnnotationStore& store, const ConsensusStore& consensus,
                           const DistanceScope& scope) {
    if (scope.kind == ScopeKind::landmark) {
        throw Error("pool_distances expects global or image scope");
    }
    if (scope.kind == ScopeKind::image && !store.has_image(scope.image_id)) {
        throw Error("unknown image " + scope.image_id);
    }
    DistanceSet pooled;
    pooled.scope = scope;
    for (const auto& [key, annotations] : store.entries()) {
        if (scope.kind == ScopeKind::image && key.image_id != scope.image_id) {
            continue;
        }
        DistanceSet d = annotator_distance_set(store, consensus, key);
        pooled.values.insert(pooled.values.end(), d.values.begin(), d.values.end());
    }
    return pooled;
}

int hit_indicator(const Point3& reference, const Point3& prediction, double radius) {
    if (!(radius >= 0.0)) {
        throw Error("negative radius");
    }
    return euclidean_distance(reference, prediction) <= radius ? 1 : 0;
}

namespace {

// Shared core of both hit_rate overloads: the radius for each landmark is
// supplied by a callable so the scalar and per-landmark variants stay on
// one code path.
template <typename RadiusFn>
HitCount count_hits_impl(const ConsensusStore& consensus, const PredictionStore& predictions,
                         const std::string& algorithm_id, const std::string& image_id,
                         RadiusFn&& radius_for, MissingPolicy policy,
                         std::vector<MissingPrediction>* missing) {
    const auto keys = consensus.image_keys(image_id);
    if (keys.empty()) {
        throw Error("no landmarks in image " + image_id);
    }
    HitCount count;
    count.landmarks = static_cast<long>(keys.size());
    for (const auto& key : keys) {
        const Point3* prediction = predictions.find(algorithm_id, key);
        if (prediction == nullptr) {
            if (policy == MissingPolicy::strict) {
                throw Error("missing prediction for (" + algorithm_id + ", " + key.str() + ")");
            }
            if (missing != nullptr) {
                missing->push_back({algorithm_id, key});
            }
            continue; // counts as a miss
        }
        count.hits += hit_indicator(consensus.at(key), *prediction, radius_for(key));
    }
    return count;
}

} // namespace

HitCount count_hits(const ConsensusStore& consensus, const PredictionStore& predictions,
                    const std::string& algorithm_id, const std::string& image_id, double radius,
                    MissingPolicy policy, std::vector<MissingPrediction>* missing) {
    return count_hits_impl(
        consensus, predictions, algorithm_id, image_id,
        [radius](const LandmarkKey&) { return radius; }, policy, missing);
}

double hit_rate(const ConsensusStore& consensus, const PredictionStore& predictions,
                const std::string& algorithm_id, const std::string& image_id, double radius,
                MissingPolicy policy, std::vector<MissingPrediction>* missing) {
    const HitCount count = count_hits(consensus, predictions, algorithm_id, image_id, radius,
                                      policy, missing);
    return static_cast<double>(count.hits) / static_cast<double>(count.landmarks);
}

double hit_rate(const ConsensusStore& consensus, const PredictionStore& predictions,
                const std::string& algorithm_id, const std::string& image_id,
                const std::map<LandmarkKey, double>& radii, MissingPolicy policy,
                std::vector<MissingPrediction>* missing) {
    const HitCount count = count_hits_impl(
        consensus, predictions, algorithm_id, image_id,
        [&radii](const LandmarkKey& key) {
            auto it = radii.find(key);
            if (it == radii.end()) {
                throw Error("no radius for landmark " + key.str());
            }
            return it->second;
        },
        policy, missing);
    return static_cast<double>(count.hits) / static_cast<double>(count.landmarks);
}

double per_annotator_hit_rate(const AnnotationStore& store, const ConsensusStore& consensus,
                              const PredictionStore& predictions, const std::string& algorithm_id,
                              const std::string& annotator_id) {
    long hits = 0;
    long total = 0;
    for (const auto& [key, annotations] : store.entries()) {
        const Annotation* own = nullptr;
        for (const auto& a : annotations) {
            if (a.annotator_id == annotator_id) {
                own = &a;
                break;
            }
        }
        if (own == nullptr) {
            continue;
        }
        const Point3* prediction = predictions.find(algorithm_id, key);
        if (prediction == nullptr) {
            continue;
        }
        const Point3& reference = consensus.at(key);
        const double radius = euclidean_distance(own->point, reference);
        hits += hit_indicator(reference, *prediction, radius);
        ++total;
    }
    if (total == 0) {
        throw Error("annotator " + annotator_id + " covers no predicted landmark of " +
                    algorithm_id);
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

HitMatrix build_hit_matrix(const ConsensusStore& consensus, const PredictionStore& predictions,
                           const std::string& algorithm_id,
                           const std::map<LandmarkKey, double>& radii, MissingPolicy policy,
                           std::vector<MissingPrediction>* missing) {
    HitMatrix matrix;
    for (const auto& [key, radius] : radii) {
        if (!consensus.contains(key)) {
            continue;
        }
        const Point3* prediction = predictions.find(algorithm_id, key);
        if (prediction == nullptr) {
            if (policy == MissingPolicy::strict) {
                throw Error("missing prediction for (" + algorithm_id + ", " + key.str() + ")");
            }
            if (missing != nullptr) {
                missing->push_back({algorithm_id, key});
            }
            continue;
        }
        HitRecord record;
        record.distance = euclidean_distance(consensus.at(key), *prediction);
        record.radius_used = radius;
        record.hit = hit_indicator(consensus.at(key), *prediction, radius);
        matrix.cells.emplace(std::make_pair(algorithm_id, key), record);
    }
    return matrix;
}

} // namespace hitr
