#pragma once

#include "hitr/metrics.hpp"
#include "hitr/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hitr {

/// Bootstrap model of the observed inter-annotator distances: sampling
/// draws uniformly with replacement from the stored values.
struct EmpiricalDistribution {
    std::vector<double> values;
};

/// Wraps a distance population for resampling. Errors on an empty set.
EmpiricalDistribution fit_empirical(const DistanceSet& d);

/// n bootstrap draws (uniform with replacement) from the distribution,
/// deterministic in the seed.
std::vector<double> bootstrap_sample(const EmpiricalDistribution& dist, std::size_t n,
                                     std::uint64_t seed);

/// One simulated annotator: a multiplicative bias in [0.7, 1.3] and the
/// seed of its private random stream. Identical (stream_seed, reference)
/// inputs reproduce the annotator bit-exactly.
struct VirtualAnnotator {
    std::string annotator_id;
    double beta = 1.0;
    std::uint64_t stream_seed = 0;
};

struct SimulationOptions {
    /// Divide each per-dimension offset by sqrt(3). The literal rule
    /// applies a full sampled distance to every dimension, which inflates
    /// the expected 3D displacement; this option compensates. Off by
    /// default to keep the literal behavior.
    bool normalize_per_dimension = false;
};

/// Perturbs every reference landmark once: per dimension, a magnitude is
/// drawn from the distribution, a fair random sign is drawn, and the
/// coordinate is offset by sign * beta * magnitude. Draw order is fixed
/// (landmarks in store order; per landmark x, y, z; per dimension
/// magnitude then sign), so output is a pure function of the inputs.
AnnotationStore simulate_annotator(const ConsensusStore& reference,
                                   const EmpiricalDistribution& dist,
                                   const VirtualAnnotator& annotator,
                                   const SimulationOptions& options = {});

struct SimulatedCohort {
    AnnotationStore store;
    std::vector<VirtualAnnotator> annotators;
};

/// Builds a cohort of virtual annotators. Each beta is drawn from
/// U(0.7, 1.3) and each annotator gets an independent stream, all derived
/// from the master seed, so the whole cohort is reproducible and any
/// single annotator can be regenerated in isolation. Errors when
/// n_annotators < 1.
SimulatedCohort simulate_cohort(const ConsensusStore& reference, const EmpiricalDistribution& dist,
                                int n_annotators, std::uint64_t master_seed,
                                const SimulationOptions& options = {});

} // namespace hitr
