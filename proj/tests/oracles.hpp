// Independent reference implementations the test suites check the library
// against. Everything here is deliberately written as plain loops over
// the raw data, separate from the library's code paths.
#pragma once

#include "hitr/metrics.hpp"
#include "hitr/radii.hpp"
#include "hitr/types.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

// Componentwise sum-then-sqrt distance.
inline double distance(const hitr::Point3& p, const hitr::Point3& q) {
    double sum = 0.0;
    const double dp[3] = {p.x, p.y, p.z};
    const double dq[3] = {q.x, q.y, q.z};
    for (int i = 0; i < 3; ++i) {
        const double d = dp[i] - dq[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

// Full-sort median; even sizes take the mean of the central pair.
inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

inline double mad(const std::vector<double>& values) {
    const double m = median(values);
    std::vector<double> deviations;
    deviations.reserve(values.size());
    for (double v : values) {
        deviations.push_back(std::abs(v - m));
    }
    return median(deviations);
}

// Brute-force hit count of one algorithm over one image: classify each
// consensus landmark independently; absent predictions are misses.
inline long hit_count(const hitr::ConsensusStore& consensus,
                      const hitr::PredictionStore& predictions, const std::string& algorithm_id,
                      const std::string& image_id, double radius) {
    long hits = 0;
    for (const auto& [key, reference] : consensus.points()) {
        if (key.image_id != image_id) {
            continue;
        }
        const hitr::Point3* prediction = predictions.find(algorithm_id, key);
        if (prediction != nullptr && distance(reference, *prediction) <= radius) {
            ++hits;
        }
    }
    return hits;
}

// Quantile with linear interpolation between closest ranks.
inline double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double position = p * static_cast<double>(values.size() - 1);
    const std::size_t lower = static_cast<std::size_t>(position);
    if (lower + 1 >= values.size()) {
        return values.back();
    }
    const double frac = position - static_cast<double>(lower);
    return values[lower] + frac * (values[lower + 1] - values[lower]);
}

// Piecewise-linear evaluation of a curve, clamped outside the range.
inline double interp(const hitr::HitRateCurve& curve, double r) {
    const auto& s = curve.samples;
    if (r <= s.front().radius) {
        return s.front().hit_rate;
    }
    if (r >= s.back().radius) {
        return s.back().hit_rate;
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (r <= s[i].radius) {
            const double t = (r - s[i - 1].radius) / (s[i].radius - s[i - 1].radius);
            return s[i - 1].hit_rate + t * (s[i].hit_rate - s[i - 1].hit_rate);
        }
    }
    return s.back().hit_rate;
}

// Counts sign changes of (a - b) by dense evaluation over the overlap of
// the two ranges; returns the bracketing evaluation points of each change.
struct DenseCrossing {
    double r_before;
    double r_after;
    int sign_after;
};
inline std::vector<DenseCrossing> dense_crossings(const hitr::HitRateCurve& a,
                                                  const hitr::HitRateCurve& b, int points) {
    const double lo = std::max(a.samples.front().radius, b.samples.front().radius);
    const double hi = std::min(a.samples.back().radius, b.samples.back().radius);
    std::vector<DenseCrossing> crossings;
    int last_sign = 0;
    double last_r = lo;
    for (int i = 0; i <= points; ++i) {
        const double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
        const double diff = interp(a, r) - interp(b, r);
        const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
        if (sign == 0) {
            continue;
        }
        if (last_sign != 0 && sign != last_sign) {
            crossings.push_back({last_r, r, sign});
        }
        last_sign = sign;
        last_r = r;
    }
    return crossings;
}

// --- random dataset generation for the property suites ---

struct RandomDataset {
    hitr::AnnotationStore annotations;
    hitr::PredictionStore predictions;
    std::vector<std::string> algorithm_ids;
};

inline hitr::Point3 random_point(std::mt19937_64& rng, double span = 100.0) {
    std::uniform_real_distribution<double> u(-span, span);
    return {u(rng), u(rng), u(rng)};
}

inline RandomDataset random_dataset(std::mt19937_64& rng, int max_images = 4,
                                    int max_landmarks = 10, int max_annotators = 5,
                                    int n_algorithms = 2, double prediction_noise = 8.0,
                                    double drop_probability = 0.0) {
    std::uniform_int_distribution<int> image_count(1, max_images);
    std::uniform_int_distribution<int> landmark_count(1, max_landmarks);
    std::uniform_int_distribution<int> annotator_count(1, max_annotators);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> noise(-prediction_noise, prediction_noise);

    RandomDataset data;
    std::vector<hitr::AnnotationRow> annotation_rows;
    std::vector<hitr::PredictionRow> prediction_rows;
    for (int a = 0; a < n_algorithms; ++a) {
        data.algorithm_ids.push_back("alg" + std::to_string(a));
    }
    const int images = image_count(rng);
    for (int k = 0; k < images; ++k) {
        const std::string image_id = "img" + std::to_string(k);
        const int landmarks = landmark_count(rng);
        for (int l = 0; l < landmarks; ++l) {
            const std::string landmark_id = "lm" + std::to_string(l);
            const hitr::Point3 truth = random_point(rng);
            const int annotators = annotator_count(rng);
            for (int v = 0; v < annotators; ++v) {
                hitr::Point3 p{truth.x + noise(rng) * 0.25, truth.y + noise(rng) * 0.25,
                               truth.z + noise(rng) * 0.25};
                annotation_rows.push_back({image_id, landmark_id, "rater" + std::to_string(v), p});
            }
            for (const auto& algorithm_id : data.algorithm_ids) {
                if (drop_probability > 0.0 && unit(rng) < drop_probability) {
                    continue;
                }
                hitr::Point3 p{truth.x + noise(rng), truth.y + noise(rng), truth.z + noise(rng)};
                prediction_rows.push_back({algorithm_id, image_id, landmark_id, p});
            }
        }
    }
    data.annotations = hitr::AnnotationStore::from_rows(annotation_rows);
    data.predictions = hitr::PredictionStore::from_rows(prediction_rows);
    return data;
}

} // namespace oracle
