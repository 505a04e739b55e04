#include "hitr/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hitr {

namespace {

// Tolerance on the restricted weight sum before renormalization is refused.
constexpr double kWeightSumTolerance = 1e-6;

} // namespace

bool Point3::is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

DistanceScope DistanceScope::image(std::string image_id) {
    DistanceScope s;
    s.kind = ScopeKind::image;
    s.image_id = std::move(image_id);
    return s;
}

DistanceScope DistanceScope::landmark(std::string image_id, std::string landmark_id) {
    DistanceScope s;
    s.kind = ScopeKind::landmark;
    s.image_id = std::move(image_id);
    s.landmark_id = std::move(landmark_id);
    return s;
}

std::string DistanceScope::str() const {
    switch (kind) {
    case ScopeKind::global:
        return "global";
    case ScopeKind::image:
        return "image(" + image_id + ")";
    case ScopeKind::landmark:
        return "landmark(" + image_id + "/" + landmark_id + ")";
    }
    return "?";
}

AnnotationStore AnnotationStore::from_rows(const std::vector<AnnotationRow>& rows,
                                           std::optional<WeightMap> weights) {
    AnnotationStore store;
    for (const auto& row : rows) {
        LandmarkKey key{row.image_id, row.landmark_id};
        auto& annotations = store.entries_[key];
        for (const auto& existing : annotations) {
            if (existing.annotator_id == row.annotator_id) {
                throw Error("duplicate annotation for (" + key.str() + ", annotator " +
                            row.annotator_id + ")");
            }
        }
        annotations.push_back(Annotation{row.annotator_id, row.point});
    }
    for (auto& [key, annotations] : store.entries_) {
        std::sort(annotations.begin(), annotations.end(),
                  [](const Annotation& a, const Annotation& b) {
                      return a.annotator_id < b.annotator_id;
                  });
    }
    store.weights_ = std::move(weights);
    return store;
}

AnnotationStore AnnotationStore::with_weights(WeightMap weights) const {
    AnnotationStore copy = *this;
    copy.weights_ = std::move(weights);
    return copy;
}

const std::vector<Annotation>& AnnotationStore::at(const LandmarkKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw Error("unknown landmark key " + key.str());
    }
    return it->second;
}

bool AnnotationStore::has_image(const std::string& image_id) const {
    auto it = entries_.lower_bound(LandmarkKey{image_id, ""});
    return it != entries_.end() && it->first.image_id == image_id;
}

std::vector<std::string> AnnotationStore::image_ids() const {
    std::vector<std::string> ids;
    for (const auto& [key, _] : entries_) {
        if (ids.empty() || ids.back() != key.image_id) {
            ids.push_back(key.image_id);
        }
    }
    return ids;
}

std::vector<std::string> AnnotationStore::annotator_ids() const {
    std::set<std::string> ids;
    for (const auto& [key, annotations] : entries_) {
        for (const auto& a : annotations) {
            ids.insert(a.annotator_id);
        }
    }
    return {ids.begin(), ids.end()};
}

std::size_t AnnotationStore::annotation_count() const {
    std::size_t n = 0;
    for (const auto& [key, annotations] : entries_) {
        n += annotations.size();
    }
    return n;
}

PredictionStore PredictionStore::from_rows(const std::vector<PredictionRow>& rows,
                                           std::optional<std::map<std::string, double>> runtimes) {
    PredictionStore store;
    for (const auto& row : rows) {
        Key key{row.algorithm_id, LandmarkKey{row.image_id, row.landmark_id}};
        auto [it, inserted] = store.entries_.emplace(key, row.point);
        if (!inserted) {
            throw Error("duplicate prediction for (" + row.algorithm_id + ", " +
                        key.second.str() + ")");
        }
    }
    store.runtimes_ = std::move(runtimes);
    return store;
}

const Point3* PredictionStore::find(const std::string& algorithm_id,
                                    const LandmarkKey& key) const {
    auto it = entries_.find(Key{algorithm_id, key});
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> PredictionStore::algorithm_ids() const {
    std::vector<std::string> ids;
    for (const auto& [key, _] : entries_) {
        if (ids.empty() || ids.back() != key.first) {
            ids.push_back(key.first);
        }
    }
    return ids;
}

std::vector<Violation> validate_store(const AnnotationStore& store) {
    std::vector<Violation> report;
    for (const auto& [key, annotations] : store.entries()) {
        if (key.image_id.empty() || key.landmark_id.empty()) {
            report.push_back({key.str(), "empty identifier in landmark key"});
        }
        if (annotations.empty()) {
            report.push_back({key.str(), "landmark has no annotations"});
        }
        std::set<std::string> seen;
        for (const auto& a : annotations) {
            if (a.annotator_id.empty()) {
                report.push_back({key.str(), "empty annotator_id"});
            }
            if (!seen.insert(a.annotator_id).second) {
                report.push_back({key.str(), "duplicate annotator " + a.annotator_id});
            }
            if (!a.point.is_finite()) {
                report.push_back({key.str(),
                                  "non-finite coordinate for annotator " + a.annotator_id});
            }
        }
    }
    if (store.weights()) {
        const auto& weights = *store.weights();
        for (const auto& [annotator, lambda] : weights) {
            if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
                report.push_back({annotator, "negative or non-finite weight"});
            }
        }
        for (const auto& [key, annotations] : store.entries()) {
            double sum = 0.0;
            bool covered = true;
            for (const auto& a : annotations) {
                auto it = weights.find(a.annotator_id);
                if (it == weights.end()) {
                    report.push_back({key.str(), "annotator " + a.annotator_id + " has no weight"});
                    covered = false;
                } else {
                    sum += it->second;
                }
            }
            if (covered && std::abs(sum - 1.0) > kWeightSumTolerance) {
                report.push_back({key.str(), "restricted weights sum to " + std::to_string(sum) +
                                                 ", expected 1 within 1e-6"});
            }
        }
    }
    return report;
}

std::vector<Violation> validate_store(const PredictionStore& store) {
    std::vector<Violation> report;
    for (const auto& [key, point] : store.entries()) {
        const auto& [algorithm_id, landmark] = key;
        std::string where = algorithm_id + ":" + landmark.str();
        if (algorithm_id.empty() || landmark.image_id.empty() || landmark.landmark_id.empty()) {
            report.push_back({where, "empty identifier"});
        }
        if (!point.is_finite()) {
            report.push_back({where, "non-finite coordinate"});
        }
    }
    if (store.runtimes()) {
        for (const auto& [algorithm_id, seconds] : *store.runtimes()) {
            if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
                report.push_back({algorithm_id, "negative or non-finite runtime"});
            }
        }
    }
    return report;
}

} // namespace hitr
