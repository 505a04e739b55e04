#include "hitr/cli.hpp"
#include "hitr/io.hpp"
#include "hitr/metrics.hpp"
#include "hitr/radii.hpp"

#include "rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace hitr {

namespace {

using detail::SplitMix64;

std::string two_digit(const std::string& prefix, int index) {
    return prefix + (index < 10 ? "0" : "") + std::to_string(index);
}

Point3 offset_point(const Point3& base, SplitMix64& rng, double per_dim_cap) {
    Point3 p = base;
    double* coords[3] = {&p.x, &p.y, &p.z};
    for (double* coord : coords) {
        *coord += rng.next_sign() * rng.next_unit() * per_dim_cap;
    }
    return p;
}

// A point at the given exact distance from `base`, direction random.
Point3 displaced_point(const Point3& base, SplitMix64& rng, double distance) {
    double dir[3];
    double norm = 0.0;
    for (double& d : dir) {
        d = rng.next_sign() * (0.1 + 0.9 * rng.next_unit());
        norm += d * d;
    }
    norm = std::sqrt(norm);
    return Point3{base.x + dir[0] / norm * distance, base.y + dir[1] / norm * distance,
                  base.z + dir[2] / norm * distance};
}

} // namespace

void run_demo(const DemoConfig& config) {
    std::filesystem::create_directories(config.out_dir);
    SplitMix64 rng(config.seed);

    constexpr int kImages = 3;
    constexpr int kAnnotators = 3;
    constexpr double kAnnotatorNoiseMm = 2.5; // per-dimension cap

    std::vector<AnnotationRow> annotation_rows;
    std::vector<LandmarkKey> keys;
    for (int img = 1; img <= kImages; ++img) {
        const std::string image_id = two_digit("case", img);
        const int n_landmarks = 6 + static_cast<int>(rng.next_index(5)); // 6..10
        for (int lm = 1; lm <= n_landmarks; ++lm) {
            const std::string landmark_id = two_digit("lm", lm);
            const Point3 truth{20.0 + 200.0 * rng.next_unit(), 20.0 + 200.0 * rng.next_unit(),
                               20.0 + 200.0 * rng.next_unit()};
            keys.push_back({image_id, landmark_id});
            for (int rater = 1; rater <= kAnnotators; ++rater) {
                annotation_rows.push_back({image_id, landmark_id, "rater" + std::to_string(rater),
                                           offset_point(truth, rng, kAnnotatorNoiseMm)});
            }
        }
    }
    const AnnotationStore annotations = AnnotationStore::from_rows(annotation_rows);
    const ConsensusStore consensus = build_consensus(annotations);

    // Place the two synthetic algorithms relative to the default radius
    // grid of this dataset, so the clean one dominates the noisy one at
    // every sampled radius.
    const DistanceSet pooled = pool_distances(annotations, consensus, DistanceScope::global());
    const auto mus = mu_grid(kDefaultMuMin, kDefaultMuMax, kDefaultMuSteps);
    const RadiusSchedule schedule = make_schedule(pooled, mus);
    double smallest_positive = schedule.points.back().radius;
    for (const auto& point : schedule.points) {
        if (point.radius > 0.0) {
            smallest_positive = point.radius;
            break;
        }
    }
    const double largest = schedule.points.back().radius;
    const double fine_cap = 0.45 * smallest_positive;  // whole error ball below the first radius
    const double coarse_lo = 1.05 * smallest_positive; // never hit at the first radius
    const double coarse_hi = 0.9 * largest;

    std::vector<PredictionRow> prediction_rows;
    int index = 0;
    for (const auto& key : keys) {
        const Point3& reference = consensus.at(key);
        // demo-fine: sub-threshold errors, every 4th landmark exact.
        Point3 fine = (index % 4 == 0)
                          ? reference
                          : offset_point(reference, rng, fine_cap / std::sqrt(3.0) * 0.99);
        prediction_rows.push_back({"demo-fine", key.image_id, key.landmark_id, fine});
        // demo-coarse: errors spread over the grid, every 5th beyond it.
        const double distance = (index % 5 == 0)
                                    ? largest * (1.2 + 0.3 * rng.next_unit())
                                    : coarse_lo + (coarse_hi - coarse_lo) * rng.next_unit();
        prediction_rows.push_back(
            {"demo-coarse", key.image_id, key.landmark_id, displaced_point(reference, rng,
                                                                           distance)});
        ++index;
    }

    std::map<std::string, double> runtimes{{"demo-fine", 142.5}, {"demo-coarse", 6.8}};
    const PredictionStore predictions = PredictionStore::from_rows(prediction_rows, runtimes);

    write_annotations(annotations, config.out_dir / "annotations.csv");
    write_predictions(predictions, config.out_dir / "predictions.csv");
    write_runtimes(runtimes, config.out_dir / "runtimes.csv");
}

} // namespace hitr
