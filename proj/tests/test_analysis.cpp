#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hitr/analysis.hpp"
#include "hitr/simulate.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace hitr;

namespace {

// Generic product-moment correlation on raw columns, for cross-checking.
double pearson_columns(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    return cov / (std::sqrt(vx) * std::sqrt(vy));
}

} // namespace

TEST_CASE("pearson: worked example and degenerate inputs") {
    PairedObservations pairs{{1, 1.0}, {1, 2.0}, {0, 10.0}, {0, 20.0}};
    CHECK(pearson(pairs) == doctest::Approx(-0.8849).epsilon(1e-3));

    CHECK_THROWS_AS(pearson({{1, 1.0}, {1, 2.0}}), Error);          // constant hits
    CHECK_THROWS_AS(pearson({{1, 3.0}, {0, 3.0}}), Error);          // constant tre
    CHECK_THROWS_AS(pearson({{1, 1.0}}), Error);                    // too few
}

TEST_CASE("pearson is negative whenever hits are a threshold cut of tre") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> value(0.0, 30.0);
    for (int rep = 0; rep < 50; ++rep) {
        PairedObservations pairs;
        const double threshold = 5.0 + value(rng) * 0.5;
        int below = 0;
        for (int i = 0; i < 100; ++i) {
            const double t = value(rng);
            pairs.push_back({t <= threshold ? 1 : 0, t});
            below += t <= threshold ? 1 : 0;
        }
        if (below == 0 || below == 100) {
            continue; // threshold did not split the sample
        }
        CHECK(pearson(pairs) < 0.0);
    }
}

TEST_CASE("pearson is symmetric in its arguments and affine-invariant in tre") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> value(0.0, 30.0);
    PairedObservations pairs;
    std::vector<double> hits;
    std::vector<double> tres;
    for (int i = 0; i < 64; ++i) {
        const int hit = (rng() & 1) != 0 ? 1 : 0;
        const double t = value(rng);
        pairs.push_back({hit, t});
        hits.push_back(double(hit));
        tres.push_back(t);
    }
    const double r = pearson(pairs);
    CHECK(r == doctest::Approx(pearson_columns(hits, tres)).epsilon(1e-12));
    CHECK(r == doctest::Approx(pearson_columns(tres, hits)).epsilon(1e-12));

    PairedObservations rescaled;
    for (const auto& p : pairs) {
        rescaled.push_back({p.hit, 3.5 * p.tre + 12.0});
    }
    CHECK(pearson(rescaled) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("summarize and tre_summary: singleton and symmetric pair") {
    auto annotations = AnnotationStore::from_rows({{"i", "l", "a", {0, 0, 0}}});
    auto predictions = PredictionStore::from_rows({{"alg", "i", "l", {3, 0, 0}}});
    const auto stats = tre_summary(predictions, annotations, "alg");
    CHECK(stats.min == 3.0);
    CHECK(stats.q1 == 3.0);
    CHECK(stats.median == 3.0);
    CHECK(stats.q3 == 3.0);
    CHECK(stats.max == 3.0);
    CHECK(stats.mean == 3.0);
    CHECK(stats.n == 1);

    // prediction at the midpoint of two annotators 4 mm apart
    auto pair_store = AnnotationStore::from_rows(
        {{"i", "l", "a", {0, 0, 0}}, {"i", "l", "b", {4, 0, 0}}});
    auto mid = PredictionStore::from_rows({{"alg", "i", "l", {2, 0, 0}}});
    const auto pair_stats = tre_summary(mid, pair_store, "alg");
    CHECK(pair_stats.median == 2.0);
    CHECK(pair_stats.n == 2);
    CHECK(pair_stats.min == 2.0);
    CHECK(pair_stats.max == 2.0);

    CHECK_THROWS_AS(tre_summary(predictions, annotations, "ghost"), Error);
}

TEST_CASE("tre_summary matches the sort-based quantile oracle") {
    std::mt19937_64 rng(10);
    const auto data = oracle::random_dataset(rng, 3, 6, 4, 1);
    const auto stats = tre_summary(data.predictions, data.annotations, "alg0");

    std::vector<double> pool;
    for (const auto& [key, annotations] : data.annotations.entries()) {
        const Point3* p = data.predictions.find("alg0", key);
        if (p == nullptr) {
            continue;
        }
        for (const auto& a : annotations) {
            pool.push_back(oracle::distance(a.point, *p));
        }
    }
    CHECK(stats.n == pool.size());
    CHECK(stats.q1 == doctest::Approx(oracle::quantile(pool, 0.25)).epsilon(1e-12));
    CHECK(stats.median == doctest::Approx(oracle::quantile(pool, 0.5)).epsilon(1e-12));
    CHECK(stats.q3 == doctest::Approx(oracle::quantile(pool, 0.75)).epsilon(1e-12));
    CHECK(stats.min <= stats.q1);
    CHECK(stats.q1 <= stats.median);
    CHECK(stats.median <= stats.q3);
    CHECK(stats.q3 <= stats.max);
    CHECK(stats.mean >= stats.min);
    CHECK(stats.mean <= stats.max);
}

namespace {

HitRateCurve constant_curve(const std::string& id, double rate) {
    HitRateCurve curve;
    curve.algorithm_id = id;
    curve.samples = {{0.0, 0.0, rate}, {1.0, 10.0, rate}};
    return curve;
}

} // namespace

TEST_CASE("threshold ranking: order, ties, runtimes") {
    const std::vector<HitRateCurve> curves{constant_curve("best", 0.4),
                                           constant_curve("worst", 0.1)};
    const auto ranking = threshold_ranking(curves, 5.0);
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].algorithm_id == "best");
    CHECK(ranking[0].hit_rate == 0.4);
    CHECK(ranking[1].algorithm_id == "worst");

    const auto single = threshold_ranking({constant_curve("only", 0.5)}, 1.0);
    REQUIRE(single.size() == 1);
    CHECK(single[0].algorithm_id == "only");

    // tie broken by runtime, then by id
    const std::vector<HitRateCurve> tied{constant_curve("slow", 0.3),
                                         constant_curve("fast", 0.3),
                                         constant_curve("arun", 0.3)};
    std::map<std::string, double> runtimes{{"slow", 90.0}, {"fast", 2.0}};
    const auto tie_ranking = threshold_ranking(tied, 5.0, runtimes);
    CHECK(tie_ranking[0].algorithm_id == "fast");
    CHECK(tie_ranking[1].algorithm_id == "slow");
    CHECK(tie_ranking[2].algorithm_id == "arun"); // untimed entries sort after timed ones
    REQUIRE(tie_ranking[0].runtime_seconds.has_value());
    CHECK(*tie_ranking[0].runtime_seconds == 2.0);

    CHECK_THROWS_AS(threshold_ranking({}, 1.0), Error);
}

TEST_CASE("ranking order flips across a curve crossing") {
    HitRateCurve flat;
    flat.algorithm_id = "flat";
    flat.samples = {{0.0, 0.0, 0.6}, {1.0, 10.0, 0.6}};
    HitRateCurve riser;
    riser.algorithm_id = "riser";
    riser.samples = {{0.0, 0.0, 0.2}, {1.0, 10.0, 0.9}};

    const auto low = threshold_ranking({flat, riser}, 1.0);
    const auto high = threshold_ranking({flat, riser}, 9.5);
    CHECK(low[0].algorithm_id == "flat");
    CHECK(high[0].algorithm_id == "riser");

    // both thresholds agree with direct interpolation
    CHECK(low[1].hit_rate == interpolate(riser, 1.0));
    CHECK(high[0].hit_rate == interpolate(riser, 9.5));
}

TEST_CASE("ranking order is invariant under positive rescaling of hit rates") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::vector<HitRateCurve> curves;
    for (int i = 0; i < 6; ++i) {
        curves.push_back(constant_curve("alg" + std::to_string(i), unit(rng)));
    }
    const auto base = threshold_ranking(curves, 5.0);
    for (double scale : {0.5, 0.25, 0.9}) {
        std::vector<HitRateCurve> scaled = curves;
        for (auto& curve : scaled) {
            for (auto& s : curve.samples) {
                s.hit_rate *= scale;
            }
        }
        const auto scaled_ranking = threshold_ranking(scaled, 5.0);
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(scaled_ranking[i].algorithm_id == base[i].algorithm_id);
        }
    }
}

TEST_CASE("per-annotator matrix: exact predictions give all-ones cells") {
    std::mt19937_64 rng(15);
    const auto data = oracle::random_dataset(rng, 2, 5, 3, 1);
    const auto consensus = build_consensus(data.annotations);
    std::vector<PredictionRow> rows;
    for (const auto& [key, p] : consensus.points()) {
        rows.push_back({"exact", key.image_id, key.landmark_id, p});
    }
    const auto predictions = PredictionStore::from_rows(rows);
    const auto matrix = per_annotator_matrix(data.annotations, consensus, predictions);
    CHECK(!matrix.cells.empty());
    for (const auto& [cell, rate] : matrix.cells) {
        CHECK(rate == 1.0);
    }
    CHECK(matrix.per_algorithm.at("exact").min == 1.0);
    CHECK(matrix.per_algorithm.at("exact").max == 1.0);
}

TEST_CASE("per-annotator matrix at challenge scale: 15 algorithms x 20 annotators") {
    // 24-landmark reference, simulated cohort, 15 synthetic algorithms
    std::map<LandmarkKey, Point3> points;
    for (int i = 0; i < 24; ++i) {
        points.emplace(LandmarkKey{"img" + std::to_string(i / 8), "lm" + std::to_string(i % 8)},
                       Point3{double(i), double(i % 5), double(i % 3)});
    }
    const ConsensusStore reference{std::move(points)};
    DistanceSet d;
    d.values = {0.5, 1.0, 2.0, 3.0};
    const auto cohort = simulate_cohort(reference, fit_empirical(d), 20, 2025);
    const auto consensus = build_consensus(cohort.store);

    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> noise(-2.0, 2.0);
    std::vector<PredictionRow> rows;
    for (int a = 0; a < 15; ++a) {
        const std::string algorithm_id = "alg" + (a < 10 ? std::string("0") : std::string()) +
                                         std::to_string(a);
        for (const auto& [key, p] : consensus.points()) {
            rows.push_back({algorithm_id, key.image_id, key.landmark_id,
                            {p.x + noise(rng), p.y + noise(rng), p.z + noise(rng)}});
        }
    }
    const auto predictions = PredictionStore::from_rows(rows);
    const auto matrix = per_annotator_matrix(cohort.store, consensus, predictions);
    CHECK(matrix.cells.size() == 15 * 20);
    CHECK(matrix.per_algorithm.size() == 15);

    // independent recount of a few cells
    int checked = 0;
    for (const auto& [cell, rate] : matrix.cells) {
        if (++checked % 37 != 0) {
            continue;
        }
        long hits = 0;
        long total = 0;
        for (const auto& [key, annotations] : cohort.store.entries()) {
            const Point3* p = predictions.find(cell.first, key);
            if (p == nullptr) {
                continue;
            }
            for (const auto& a : annotations) {
                if (a.annotator_id != cell.second) {
                    continue;
                }
                ++total;
                const auto& c = consensus.at(key);
                if (oracle::distance(c, *p) <= oracle::distance(a.point, c)) {
                    ++hits;
                }
            }
        }
        CHECK(rate == double(hits) / double(total));
    }
}

TEST_CASE("paired observations: per-annotator and fixed radius modes") {
    std::mt19937_64 rng(18);
    const auto data = oracle::random_dataset(rng, 2, 5, 3, 2);
    const auto consensus = build_consensus(data.annotations);

    const auto per_annotator = paired_observations(data.annotations, consensus, data.predictions);
    // one pair per (algorithm, covered landmark, annotator)
    std::size_t expected = 0;
    for (const auto& algorithm_id : data.algorithm_ids) {
        for (const auto& [key, annotations] : data.annotations.entries()) {
            if (data.predictions.find(algorithm_id, key) != nullptr) {
                expected += annotations.size();
            }
        }
    }
    CHECK(per_annotator.pooled.size() == expected);
    CHECK(per_annotator.per_algorithm.size() == 2);

    const auto fixed = paired_observations(data.annotations, consensus, data.predictions,
                                           CorrelationRadii::fixed(5.0));
    for (const auto& p : fixed.pooled) {
        CHECK(p.hit == (p.tre <= 5.0 ? 1 : 0));
    }
}
