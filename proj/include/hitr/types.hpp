#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hitr {

/// Error type for all data and precondition failures in the library.
/// Parsing errors carry file/line context in the message.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A landmark position in physical millimeter space.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool is_finite() const;

    friend bool operator==(const Point3&, const Point3&) = default;
};

/// Identifies one landmark within one image domain. Ordering is
/// lexicographic by image_id then landmark_id, which fixes the iteration
/// order of every store and keeps downstream reports byte-stable.
struct LandmarkKey {
    std::string image_id;
    std::string landmark_id;

    auto operator<=>(const LandmarkKey&) const = default;

    std::string str() const { return image_id + "/" + landmark_id; }
};

/// One annotator's placement of one landmark.
struct Annotation {
    std::string annotator_id;
    Point3 point;
};

/// Optional per-annotator reliability weights. When attached to a store,
/// the weights restricted to the annotators present at each landmark must
/// sum to 1 within 1e-6 (they are renormalized exactly before use).
using WeightMap = std::map<std::string, double>;

struct AnnotationRow {
    std::string image_id;
    std::string landmark_id;
    std::string annotator_id;
    Point3 point;
};

/// All annotator landmarks, indexed by (image, landmark). Immutable after
/// construction; safe to share across concurrent readers.
class AnnotationStore {
  public:
    AnnotationStore() = default;

    /// Builds a store from rows. Duplicate (image, landmark, annotator)
    /// triples are a hard error, not last-wins: a silent overwrite would
    /// bias the annotator distance population. Annotations are kept
    /// sorted by annotator_id within each landmark.
    static AnnotationStore from_rows(const std::vector<AnnotationRow>& rows,
                                     std::optional<WeightMap> weights = std::nullopt);

    /// Copy of this store with reliability weights attached.
    AnnotationStore with_weights(WeightMap weights) const;

    const std::map<LandmarkKey, std::vector<Annotation>>& entries() const { return entries_; }
    const std::optional<WeightMap>& weights() const { return weights_; }

    /// Annotations at a key; throws Error on unknown key.
    const std::vector<Annotation>& at(const LandmarkKey& key) const;

    bool contains(const LandmarkKey& key) const { return entries_.count(key) > 0; }
    bool has_image(const std::string& image_id) const;

    std::vector<std::string> image_ids() const;     ///< sorted, unique
    std::vector<std::string> annotator_ids() const; ///< sorted, unique
    std::size_t landmark_count() const { return entries_.size(); }
    std::size_t annotation_count() const;

  private:
    std::map<LandmarkKey, std::vector<Annotation>> entries_;
    std::optional<WeightMap> weights_;
};

struct PredictionRow {
    std::string algorithm_id;
    std::string image_id;
    std::string landmark_id;
    Point3 point;
};

/// Registered (warped) landmark positions per algorithm, plus optional
/// per-algorithm runtimes in seconds. Immutable after construction.
class PredictionStore {
  public:
    using Key = std::pair<std::string, LandmarkKey>; // (algorithm_id, landmark)

    PredictionStore() = default;

    /// At most one prediction per (algorithm, landmark); duplicates are a
    /// hard error.
    static PredictionStore from_rows(const std::vector<PredictionRow>& rows,
                                     std::optional<std::map<std::string, double>> runtimes =
                                         std::nullopt);

    const std::map<Key, Point3>& entries() const { return entries_; }
    const std::optional<std::map<std::string, double>>& runtimes() const { return runtimes_; }

    /// Prediction lookup; nullptr when the algorithm produced none.
    const Point3* find(const std::string& algorithm_id, const LandmarkKey& key) const;

    std::vector<std::string> algorithm_ids() const; ///< sorted, unique
    std::size_t prediction_count() const { return entries_.size(); }

  private:
    std::map<Key, Point3> entries_;
    std::optional<std::map<std::string, double>> runtimes_;
};

enum class ScopeKind { landmark, image, global };

/// Scope tag of a distance population: one landmark, one image domain, or
/// the whole dataset.
struct DistanceScope {
    ScopeKind kind = ScopeKind::global;
    std::string image_id;    // set for image and landmark scopes
    std::string landmark_id; // set for landmark scope

    static DistanceScope global() { return {}; }
    static DistanceScope image(std::string image_id);
    static DistanceScope landmark(std::string image_id, std::string landmark_id);

    std::string str() const;
};

/// A multiset of non-negative annotator-to-consensus distances.
/// Duplicates are preserved: the pooled population feeds median/MAD and
/// must reflect every annotation, repeated values included.
struct DistanceSet {
    DistanceScope scope;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
};

/// One invariant violation found by validate_store.
struct Violation {
    std::string key; ///< store key the violation is attached to ("" for store-level)
    std::string message;
};

/// Checks every type invariant and returns one entry per violation.
/// An empty report means the store is valid. Never throws.
std::vector<Violation> validate_store(const AnnotationStore& store);
std::vector<Violation> validate_store(const PredictionStore& store);

} // namespace hitr
