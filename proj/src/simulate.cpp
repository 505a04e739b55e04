#include "hitr/simulate.hpp"

#include "rng.hpp"

#include <cmath>

namespace hitr {

namespace {

using detail::SplitMix64;

std::string cohort_annotator_id(int index, int n) {
    int width = 2;
    for (int v = n; v >= 100; v /= 10) {
        ++width;
    }
    std::string digits = std::to_string(index);
    return "sim" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

std::vector<AnnotationRow> simulate_rows(const ConsensusStore& reference,
                                         const EmpiricalDistribution& dist,
                                         const VirtualAnnotator& annotator,
                                         const SimulationOptions& options) {
    const double scale =
        options.normalize_per_dimension ? annotator.beta / std::sqrt(3.0) : annotator.beta;
    SplitMix64 rng(annotator.stream_seed);
    std::vector<AnnotationRow> rows;
    rows.reserve(reference.size());
    for (const auto& [key, point] : reference.points()) {
        Point3 simulated = point;
        double* coords[3] = {&simulated.x, &simulated.y, &simulated.z};
        for (double* coord : coords) {
            const double magnitude = dist.values[rng.next_index(dist.values.size())];
            *coord += rng.next_sign() * scale * magnitude;
        }
        rows.push_back({key.image_id, key.landmark_id, annotator.annotator_id, simulated});
    }
    return rows;
}

} // namespace

EmpiricalDistribution fit_empirical(const DistanceSet& d) {
    if (d.empty()) {
        throw Error("cannot fit distribution to empty distance set (" + d.scope.str() + ")");
    }
    for (double v : d.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error("distance set contains a negative or non-finite value");
        }
    }
    return EmpiricalDistribution{d.values};
}

std::vector<double> bootstrap_sample(const EmpiricalDistribution& dist, std::size_t n,
                                     std::uint64_t seed) {
    if (dist.values.empty()) {
        throw Error("empty empirical distribution");
    }
    SplitMix64 rng(seed);
    std::vector<double> draws;
    draws.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        draws.push_back(dist.values[rng.next_index(dist.values.size())]);
    }
    return draws;
}

AnnotationStore simulate_annotator(const ConsensusStore& reference,
                                   const EmpiricalDistribution& dist,
                                   const VirtualAnnotator& annotator,
                                   const SimulationOptions& options) {
    if (dist.values.empty()) {
        throw Error("empty empirical distribution");
    }
    if (!(annotator.beta >= 0.7 && annotator.beta <= 1.3)) {
        throw Error("annotator bias outside [0.7, 1.3]");
    }
    return AnnotationStore::from_rows(simulate_rows(reference, dist, annotator, options));
}

SimulatedCohort simulate_cohort(const ConsensusStore& reference, const EmpiricalDistribution& dist,
                                int n_annotators, std::uint64_t master_seed,
                                const SimulationOptions& options) {
    if (n_annotators < 1) {
        throw Error("cohort needs at least one annotator");
    }
    if (dist.values.empty()) {
        throw Error("empty empirical distribution");
    }
    // The master seed feeds one splitmix sequence: the first output seeds
    // the beta stream, the following ones seed the annotator streams.
    SplitMix64 seeder(master_seed);
    SplitMix64 beta_stream(seeder.next());

    SimulatedCohort cohort;
    std::vector<AnnotationRow> rows;
    rows.reserve(reference.size() * static_cast<std::size_t>(n_annotators));
    for (int i = 1; i <= n_annotators; ++i) {
        VirtualAnnotator annotator;
        annotator.annotator_id = cohort_annotator_id(i, n_annotators);
        annotator.beta = 0.7 + 0.6 * beta_stream.next_unit();
        annotator.stream_seed = seeder.next();
        auto annotator_rows = simulate_rows(reference, dist, annotator, options);
        rows.insert(rows.end(), annotator_rows.begin(), annotator_rows.end());
        cohort.annotators.push_back(std::move(annotator));
    }
    cohort.store = AnnotationStore::from_rows(rows);
    return cohort;
}

} // namespace hitr
