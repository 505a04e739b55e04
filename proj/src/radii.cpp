#include "hitr/radii.hpp"

#include <algorithm>
#include <cmath>

namespace hitr {

namespace {

// Median of a sorted vector; even cardinality takes the mean of the two
// central elements.
double sorted_median(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) {
        return sorted[n / 2];
    }
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

} // namespace

RobustStats robust_stats(const DistanceSet& d) {
    if (d.empty()) {
        throw Error("cannot extrapolate from empty distance set (" + d.scope.str() + ")");
    }
    std::vector<double> sorted = d.values;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted_median(sorted);

    std::vector<double> deviations;
    deviations.reserve(sorted.size());
    for (double v : sorted) {
        deviations.push_back(std::abs(v - median));
    }
    std::sort(deviations.begin(), deviations.end());
    return RobustStats{median, sorted_median(deviations)};
}

double radius_from_mu(const DistanceSet& d, double mu) {
    const RobustStats stats = robust_stats(d);
    return std::max(0.0, stats.median + mu * stats.mad);
}

double radius_from_mu_per_image(const AnnotationStore& store, const ConsensusStore& consensus,
                                const std::string& image_id, double mu) {
    return radius_from_mu(pool_distances(store, consensus, DistanceScope::image(image_id)), mu);
}

std::vector<double> mu_grid(double mu_min, double mu_max, int steps) {
    if (mu_min > mu_max) {
        throw Error("mu_min > mu_max");
    }
    if (steps < 1) {
        throw Error("mu grid needs at least one step");
    }
    if (mu_min == mu_max) {
        return {mu_min};
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        grid.push_back(mu_min + (mu_max - mu_min) * static_cast<double>(i) /
                                    static_cast<double>(steps));
    }
    grid.back() = mu_max; // endpoint exact
    return grid;
}

RadiusSchedule make_schedule(const DistanceSet& d, std::span<const double> mus) {
    if (mus.empty()) {
        throw Error("empty mu list");
    }
    for (std::size_t i = 1; i < mus.size(); ++i) {
        if (!(mus[i] > mus[i - 1])) {
            throw Error("mu values must be strictly increasing");
        }
    }
    RadiusSchedule schedule;
    schedule.scope = d.scope;
    schedule.source_stats = robust_stats(d);
    schedule.points.reserve(mus.size());
    for (double mu : mus) {
        schedule.points.push_back(
            {mu, std::max(0.0, schedule.source_stats.median + mu * schedule.source_stats.mad)});
    }
    return schedule;
}

std::map<std::string, RadiusSchedule> make_image_schedules(const AnnotationStore& store,
                                                           const ConsensusStore& consensus,
                                                           std::span<const double> mus) {
    std::map<std::string, RadiusSchedule> schedules;
    for (const auto& image_id : store.image_ids()) {
        schedules.emplace(
            image_id,
            make_schedule(pool_distances(store, consensus, DistanceScope::image(image_id)), mus));
    }
    return schedules;
}

namespace {

// Collapses runs of samples with equal radii. Equal radii only arise from
// clamping or zero MAD, where the hit rates are identical as well, so
// keeping the first sample of each run is lossless and leaves the radii
// strictly increasing.
void dedupe_radii(HitRateCurve& curve) {
    auto last = std::unique(curve.samples.begin(), curve.samples.end(),
                            [](const CurveSample& a, const CurveSample& b) {
                                return a.radius == b.radius;
                            });
    curve.samples.erase(last, curve.samples.end());
}

double aggregate(const std::vector<HitCount>& counts, CurveAggregation aggregation) {
    if (aggregation == CurveAggregation::pooled_landmarks) {
        long hits = 0;
        long landmarks = 0;
        for (const auto& c : counts) {
            hits += c.hits;
            landmarks += c.landmarks;
        }
        return static_cast<double>(hits) / static_cast<double>(landmarks);
    }
    double sum = 0.0;
    for (const auto& c : counts) {
        sum += static_cast<double>(c.hits) / static_cast<double>(c.landmarks);
    }
    return sum / static_cast<double>(counts.size());
}

} // namespace

HitRateCurve build_curve(const ConsensusStore& consensus, const PredictionStore& predictions,
                         const std::string& algorithm_id, const RadiusSchedule& schedule,
                         MissingPolicy policy, CurveAggregation aggregation,
                         std::vector<MissingPrediction>* missing) {
    if (schedule.points.empty()) {
        throw Error("empty radius schedule");
    }
    const auto images = consensus.image_ids();
    if (images.empty()) {
        throw Error("consensus store has no images");
    }
    HitRateCurve curve;
    curve.algorithm_id = algorithm_id;
    // The set of missing predictions does not depend on the radius, so it
    // is recorded on the first schedule point only.
    std::vector<MissingPrediction>* missing_once = missing;
    for (const auto& point : schedule.points) {
        std::vector<HitCount> counts;
        counts.reserve(images.size());
        for (const auto& image_id : images) {
            counts.push_back(count_hits(consensus, predictions, algorithm_id, image_id,
                                        point.radius, policy, missing_once));
        }
        missing_once = nullptr;
        curve.samples.push_back({point.mu, point.radius, aggregate(counts, aggregation)});
    }
    dedupe_radii(curve);
    return curve;
}

HitRateCurve build_curve(const ConsensusStore& consensus, const PredictionStore& predictions,
                         const std::string& algorithm_id,
                         const std::map<std::string, RadiusSchedule>& image_schedules,
                         MissingPolicy policy, CurveAggregation aggregation,
                         std::vector<MissingPrediction>* missing) {
    const auto images = consensus.image_ids();
    if (images.empty()) {
        throw Error("consensus store has no images");
    }
    const RadiusSchedule* first = nullptr;
    for (const auto& image_id : images) {
        auto it = image_schedules.find(image_id);
        if (it == image_schedules.end()) {
            throw Error("no radius schedule for image " + image_id);
        }
        if (first == nullptr) {
            first = &it->second;
        } else if (it->second.points.size() != first->points.size()) {
            throw Error("image schedules do not share one mu grid");
        }
    }
    if (first->points.empty()) {
        throw Error("empty radius schedule");
    }
    HitRateCurve curve;
    curve.algorithm_id = algorithm_id;
    std::vector<MissingPrediction>* missing_once = missing;
    for (std::size_t i = 0; i < first->points.size(); ++i) {
        const double mu = first->points[i].mu;
        std::vector<HitCount> counts;
        counts.reserve(images.size());
        double radius_sum = 0.0;
        for (const auto& image_id : images) {
            const auto& point = image_schedules.at(image_id).points[i];
            if (point.mu != mu) {
                throw Error("image schedules do not share one mu grid");
            }
            radius_sum += point.radius;
            counts.push_back(count_hits(consensus, predictions, algorithm_id, image_id,
                                        point.radius, policy, missing_once));
        }
        missing_once = nullptr;
        // The sample's radius column is the equal-weight mean of the
        // per-image radii; equal means imply equal per-image radii because
        // every radius is non-decreasing in mu.
        curve.samples.push_back(
            {mu, radius_sum / static_cast<double>(images.size()), aggregate(counts, aggregation)});
    }
    dedupe_radii(curve);
    return curve;
}

double interpolate(const HitRateCurve& curve, double r) {
    if (curve.samples.empty()) {
        throw Error("empty curve");
    }
    const auto& samples = curve.samples;
    if (r <= samples.front().radius) {
        return samples.front().hit_rate;
    }
    if (r >= samples.back().radius) {
        return samples.back().hit_rate;
    }
    auto upper = std::lower_bound(samples.begin(), samples.end(), r,
                                  [](const CurveSample& s, double value) {
                                      return s.radius < value;
                                  });
    if (upper->radius == r) {
        return upper->hit_rate; // knot identity, no arithmetic
    }
    const auto& hi = *upper;
    const auto& lo = *(upper - 1);
    const double t = (r - lo.radius) / (hi.radius - lo.radius);
    return lo.hit_rate + t * (hi.hit_rate - lo.hit_rate);
}

std::vector<Crossing> find_crossings(const HitRateCurve& a, const HitRateCurve& b) {
    if (a.samples.empty() || b.samples.empty()) {
        throw Error("empty curve");
    }
    const double lo = std::max(a.samples.front().radius, b.samples.front().radius);
    const double hi = std::min(a.samples.back().radius, b.samples.back().radius);
    if (lo > hi) {
        throw Error("curve radius ranges do not overlap");
    }
    // Union of knot radii inside the overlap. Between consecutive union
    // knots both curves are linear, so the difference is linear too and a
    // sign change there is a genuine crossing.
    std::vector<double> knots;
    for (const auto& s : a.samples) {
        if (s.radius >= lo && s.radius <= hi) {
            knots.push_back(s.radius);
        }
    }
    for (const auto& s : b.samples) {
        if (s.radius >= lo && s.radius <= hi) {
            knots.push_back(s.radius);
        }
    }
    knots.push_back(lo);
    knots.push_back(hi);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    std::vector<Crossing> crossings;
    int last_sign = 0;
    double last_sign_radius = lo;
    for (double r : knots) {
        const double diff = interpolate(a, r) - interpolate(b, r);
        const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
        if (sign == 0) {
            continue; // touching; a crossing needs the sign to flip across it
        }
        if (last_sign != 0 && sign != last_sign) {
            crossings.push_back({last_sign_radius, r, sign});
        }
        last_sign = sign;
        last_sign_radius = r;
    }
    return crossings;
}

} // namespace hitr
