#include "hitr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hitr {

double pearson(const PairedObservations& pairs) {
    if (pairs.size() < 2) {
        throw Error("undefined correlation: need at least two pairs");
    }
    double mean_hit = 0.0;
    double mean_tre = 0.0;
    for (const auto& p : pairs) {
        mean_hit += static_cast<double>(p.hit);
        mean_tre += p.tre;
    }
    const double n = static_cast<double>(pairs.size());
    mean_hit /= n;
    mean_tre /= n;

    double cov = 0.0;
    double var_hit = 0.0;
    double var_tre = 0.0;
    for (const auto& p : pairs) {
        const double dh = static_cast<double>(p.hit) - mean_hit;
        const double dt = p.tre - mean_tre;
        cov += dh * dt;
        var_hit += dh * dh;
        var_tre += dt * dt;
    }
    if (var_hit == 0.0 || var_tre == 0.0) {
        throw Error("undefined correlation: constant variable");
    }
    return cov / (std::sqrt(var_hit) * std::sqrt(var_tre));
}

namespace {

// Quantile by linear interpolation between closest ranks of the sorted
// sample: position p*(n-1), fractional part interpolated.
double sorted_quantile(const std::vector<double>& sorted, double p) {
    const double position = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lower = static_cast<std::size_t>(position);
    if (lower + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = position - static_cast<double>(lower);
    return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
}

} // namespace

SummaryStats summarize(const std::vector<double>& values) {
    if (values.empty()) {
        throw Error("cannot summarize an empty sample");
    }
    std::vector<double> sorted = values;
    double sum = 0.0;
    for (double v : sorted) {
        sum += v;
    }
    std::sort(sorted.begin(), sorted.end());
    SummaryStats stats;
    stats.min = sorted.front();
    stats.q1 = sorted_quantile(sorted, 0.25);
    stats.median = sorted_quantile(sorted, 0.5);
    stats.q3 = sorted_quantile(sorted, 0.75);
    stats.max = sorted.back();
    stats.mean = sum / static_cast<double>(sorted.size());
    stats.n = sorted.size();
    return stats;
}

SummaryStats tre_summary(const PredictionStore& predictions, const AnnotationStore& store,
                         const std::string& algorithm_id) {
    std::vector<double> pool;
    for (const auto& [key, annotations] : store.entries()) {
        const Point3* prediction = predictions.find(algorithm_id, key);
        if (prediction == nullptr) {
            continue;
        }
        for (const auto& a : annotations) {
            pool.push_back(tre(a.point, *prediction));
        }
    }
    if (pool.empty()) {
        throw Error("no (prediction, annotation) pairs for algorithm " + algorithm_id);
    }
    return summarize(pool);
}

std::vector<RankedAlgorithm> threshold_ranking(
    const std::vector<HitRateCurve>& curves, double r,
    const std::optional<std::map<std::string, double>>& runtimes) {
    if (curves.empty()) {
        throw Error("no curves to rank");
    }
    std::vector<RankedAlgorithm> ranking;
    ranking.reserve(curves.size());
    for (const auto& curve : curves) {
        RankedAlgorithm row;
        row.algorithm_id = curve.algorithm_id;
        row.hit_rate = interpolate(curve, r);
        if (runtimes) {
            auto it = runtimes->find(curve.algorithm_id);
            if (it != runtimes->end()) {
                row.runtime_seconds = it->second;
            }
        }
        ranking.push_back(std::move(row));
    }
    // Tie-break key: runtime when known (entries without one sort after
    // timed ones), then id. A single lexicographic key keeps the
    // comparison a strict weak ordering.
    const auto runtime_key = [](const RankedAlgorithm& a) {
        return a.runtime_seconds.value_or(std::numeric_limits<double>::infinity());
    };
    std::sort(ranking.begin(), ranking.end(),
              [&](const RankedAlgorithm& a, const RankedAlgorithm& b) {
                  if (a.hit_rate != b.hit_rate) {
                      return a.hit_rate > b.hit_rate;
                  }
                  if (runtime_key(a) != runtime_key(b)) {
                      return runtime_key(a) < runtime_key(b);
                  }
                  return a.algorithm_id < b.algorithm_id;
              });
    return ranking;
}

AnnotatorMatrix per_annotator_matrix(const AnnotationStore& store, const ConsensusStore& consensus,
                                     const PredictionStore& predictions) {
    AnnotatorMatrix matrix;
    const auto algorithms = predictions.algorithm_ids();
    const auto annotators = store.annotator_ids();
    for (const auto& algorithm_id : algorithms) {
        std::vector<double> rates;
        for (const auto& annotator_id : annotators) {
            double rate = 0.0;
            try {
                rate = per_annotator_hit_rate(store, consensus, predictions, algorithm_id,
                                              annotator_id);
            } catch (const Error&) {
                continue; // no coverage for this pair
            }
            matrix.cells.emplace(std::make_pair(algorithm_id, annotator_id), rate);
            rates.push_back(rate);
        }
        if (!rates.empty()) {
            std::sort(rates.begin(), rates.end());
            AnnotatorSpread spread;
            spread.min = rates.front();
            spread.median = sorted_quantile(rates, 0.5);
            spread.max = rates.back();
            matrix.per_algorithm.emplace(algorithm_id, spread);
        }
    }
    if (matrix.cells.empty()) {
        throw Error("no (algorithm, annotator) pair has coverage");
    }
    return matrix;
}

CorrelationPairs paired_observations(const AnnotationStore& store, const ConsensusStore& consensus,
                                     const PredictionStore& predictions,
                                     const CorrelationRadii& radii) {
    CorrelationPairs result;
    for (const auto& algorithm_id : predictions.algorithm_ids()) {
        PairedObservations pairs;
        for (const auto& [key, annotations] : store.entries()) {
            const Point3* prediction = predictions.find(algorithm_id, key);
            if (prediction == nullptr) {
                continue;
            }
            const Point3& reference = consensus.at(key);
            const double error = tre(reference, *prediction);
            if (radii.mode == CorrelationRadii::Mode::fixed) {
                pairs.push_back({hit_indicator(reference, *prediction, radii.fixed_radius), error});
            } else {
                // One pair per annotator: the hit side is judged with that
                // annotator's own distance as the radius.
                for (const auto& a : annotations) {
                    const double radius = euclidean_distance(a.point, reference);
                    pairs.push_back({hit_indicator(reference, *prediction, radius), error});
                }
            }
        }
        if (!pairs.empty()) {
            result.pooled.insert(result.pooled.end(), pairs.begin(), pairs.end());
            result.per_algorithm.emplace(algorithm_id, std::move(pairs));
        }
    }
    if (result.pooled.empty()) {
        throw Error("no paired observations");
    }
    return result;
}

} // namespace hitr
