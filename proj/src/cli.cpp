#include "hitr/cli.hpp"

#include "hitr/analysis.hpp"
#include "hitr/simulate.hpp"
#include "hitr/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <unistd.h>

namespace hitr {

namespace {

std::string path_or_empty(const std::optional<std::filesystem::path>& path) {
    return path ? path->string() : std::string{};
}

std::string describe_missing(const MissingPrediction& event) {
    return "missing prediction: algorithm=" + event.algorithm_id +
           " image=" + event.key.image_id + " landmark=" + event.key.landmark_id +
           " (counted as miss)";
}

void fail_on_violations(const std::vector<Violation>& violations, const std::string& what) {
    if (violations.empty()) {
        return;
    }
    std::string message = what + " failed validation:";
    for (const auto& v : violations) {
        message += "\n  [" + v.key + "] " + v.message;
    }
    throw Error(message);
}

std::map<std::string, std::string> eval_config_echo(const EvalConfig& config) {
    std::map<std::string, std::string> echo;
    echo["annotations"] = config.annotations.string();
    echo["predictions"] = config.predictions.string();
    echo["weights"] = path_or_empty(config.weights);
    echo["runtimes"] = path_or_empty(config.runtimes);
    echo["out"] = config.out_dir.string();
    echo["mu_min"] = format_full(config.mu_min);
    echo["mu_max"] = format_full(config.mu_max);
    echo["mu_steps"] = std::to_string(config.mu_steps);
    echo["scope"] = config.scope == ScheduleScope::global ? "global" : "image";
    echo["missing_policy"] = config.missing_policy == MissingPolicy::miss ? "miss" : "strict";
    echo["aggregation"] =
        config.aggregation == CurveAggregation::image_mean ? "image-mean" : "pooled";
    echo["correlation_radii"] = config.correlation_radius
                                    ? "fixed(" + format_full(*config.correlation_radius) + ")"
                                    : "per_annotator";
    return echo;
}

} // namespace

EvaluationReport run_eval(const EvalConfig& config) {
    AnnotationStore annotations = parse_annotations(config.annotations);
    if (config.weights) {
        annotations = annotations.with_weights(parse_weights(*config.weights));
    }
    fail_on_violations(validate_store(annotations), "annotations store");

    const PredictionStore predictions = parse_predictions(config.predictions, config.runtimes);
    fail_on_violations(validate_store(predictions), "prediction store");
    if (predictions.prediction_count() == 0) {
        throw Error("prediction file contains no rows");
    }

    const ConsensusStore consensus = build_consensus(annotations);
    const auto mus = mu_grid(config.mu_min, config.mu_max, config.mu_steps);

    const DistanceSet pooled = pool_distances(annotations, consensus, DistanceScope::global());
    const RobustStats global_stats = robust_stats(pooled);
    const double median_radius = global_stats.median;

    RadiusSchedule global_schedule;
    std::map<std::string, RadiusSchedule> image_schedules;
    if (config.scope == ScheduleScope::global) {
        global_schedule = make_schedule(pooled, mus);
    } else {
        image_schedules = make_image_schedules(annotations, consensus, mus);
    }

    EvaluationReport report;
    report.version = kVersion;
    report.config = eval_config_echo(config);
    report.median_radius_mm = median_radius;
    report.correlation_radii = report.config.at("correlation_radii");

    std::vector<HitRateCurve> curves;
    const auto algorithm_ids = predictions.algorithm_ids();
    for (const auto& algorithm_id : algorithm_ids) {
        std::vector<MissingPrediction> missing;
        HitRateCurve curve =
            config.scope == ScheduleScope::global
                ? build_curve(consensus, predictions, algorithm_id, global_schedule,
                              config.missing_policy, config.aggregation, &missing)
                : build_curve(consensus, predictions, algorithm_id, image_schedules,
                              config.missing_policy, config.aggregation, &missing);
        for (const auto& event : missing) {
            report.warnings.push_back(describe_missing(event));
        }

        AlgorithmReport entry;
        entry.algorithm_id = algorithm_id;
        entry.curve = curve;
        // Dataset and per-image hit rate at the dataset median radius.
        std::vector<HitCount> counts;
        for (const auto& image_id : consensus.image_ids()) {
            const HitCount count = count_hits(consensus, predictions, algorithm_id, image_id,
                                              median_radius, config.missing_policy, nullptr);
            const double rate =
                static_cast<double>(count.hits) / static_cast<double>(count.landmarks);
            entry.hit_rate_per_image.emplace(image_id, rate);
            counts.push_back(count);
        }
        if (config.aggregation == CurveAggregation::pooled_landmarks) {
            long hits = 0;
            long landmarks = 0;
            for (const auto& count : counts) {
                hits += count.hits;
                landmarks += count.landmarks;
            }
            entry.hit_rate_at_median =
                static_cast<double>(hits) / static_cast<double>(landmarks);
        } else {
            double sum = 0.0;
            for (const auto& [_, rate] : entry.hit_rate_per_image) {
                sum += rate;
            }
            entry.hit_rate_at_median = sum / static_cast<double>(entry.hit_rate_per_image.size());
        }
        entry.tre_mm = tre_summary(predictions, annotations, algorithm_id);
        if (predictions.runtimes()) {
            auto it = predictions.runtimes()->find(algorithm_id);
            if (it != predictions.runtimes()->end()) {
                entry.runtime_seconds = it->second;
            }
        }
        report.algorithms.push_back(std::move(entry));
        curves.push_back(std::move(curve));
    }

    try {
        const AnnotatorMatrix matrix = per_annotator_matrix(annotations, consensus, predictions);
        for (auto& entry : report.algorithms) {
            std::vector<double> rates;
            for (const auto& [cell, rate] : matrix.cells) {
                if (cell.first == entry.algorithm_id) {
                    entry.per_annotator.emplace(cell.second, rate);
                    rates.push_back(rate);
                }
            }
            if (!rates.empty()) {
                entry.annotator_spread = summarize(rates);
            }
        }
    } catch (const Error& e) {
        report.warnings.push_back(std::string("per-annotator hit rates unavailable: ") + e.what());
    }

    const CorrelationRadii radii = config.correlation_radius
                                       ? CorrelationRadii::fixed(*config.correlation_radius)
                                       : CorrelationRadii::per_annotator();
    try {
        const CorrelationPairs pairs = paired_observations(annotations, consensus, predictions,
                                                           radii);
        report.correlation_pairs = pairs.pooled.size();
        try {
            report.pooled_correlation = pearson(pairs.pooled);
        } catch (const Error& e) {
            report.warnings.push_back(std::string("pooled correlation undefined: ") + e.what());
        }
        for (auto& entry : report.algorithms) {
            auto it = pairs.per_algorithm.find(entry.algorithm_id);
            if (it == pairs.per_algorithm.end()) {
                continue;
            }
            try {
                entry.correlation = pearson(it->second);
            } catch (const Error&) {
                // leave the per-algorithm cell empty
            }
        }
    } catch (const Error& e) {
        report.warnings.push_back(std::string("correlation unavailable: ") + e.what());
    }

    report.ranking_at_median = threshold_ranking(curves, median_radius, predictions.runtimes());

    std::filesystem::create_directories(config.out_dir);
    write_report(report, config.out_dir / "report.json");
    write_curves_csv(curves, config.out_dir / "curves.csv");
    write_curve_chart_svg(curves, config.out_dir / "curves.svg");

    std::vector<std::pair<std::string, SummaryStats>> tre_boxes;
    for (const auto& entry : report.algorithms) {
        tre_boxes.emplace_back(entry.algorithm_id, entry.tre_mm);
    }
    write_box_chart_svg(tre_boxes, "TRE to individual annotator landmarks", "TRE [mm]",
                        config.out_dir / "tre_boxplot.svg");

    std::vector<std::pair<std::string, SummaryStats>> annotator_boxes;
    for (const auto& entry : report.algorithms) {
        if (entry.annotator_spread) {
            annotator_boxes.emplace_back(entry.algorithm_id, *entry.annotator_spread);
        }
    }
    if (!annotator_boxes.empty()) {
        write_box_chart_svg(annotator_boxes, "Hit rate per annotator", "hit rate",
                            config.out_dir / "annotator_boxplot.svg");
    }
    return report;
}

void run_simulate(const SimulateConfig& config) {
    if (config.annotators < 1) {
        throw Error("--annotators must be at least 1");
    }
    const AnnotationStore reference_store = parse_annotations(config.annotations);
    fail_on_violations(validate_store(reference_store), "reference annotations");
    const ConsensusStore reference = build_consensus(reference_store);

    const std::filesystem::path distance_path = config.distances.value_or(config.annotations);
    DistanceSet distances;
    if (distance_path == config.annotations) {
        distances = pool_distances(reference_store, reference, DistanceScope::global());
    } else {
        const AnnotationStore distance_store = parse_annotations(distance_path);
        fail_on_violations(validate_store(distance_store), "distance annotations");
        distances =
            pool_distances(distance_store, build_consensus(distance_store), DistanceScope::global());
    }

    SimulationOptions options;
    options.normalize_per_dimension = config.normalize_per_dimension;
    const SimulatedCohort cohort = simulate_cohort(reference, fit_empirical(distances),
                                                   config.annotators, config.seed, options);
    if (config.out_csv.has_parent_path()) {
        std::filesystem::create_directories(config.out_csv.parent_path());
    }
    write_annotations(cohort.store, config.out_csv);
    std::cout << "wrote " << cohort.store.annotation_count() << " annotations ("
              << config.annotators << " virtual annotators x " << reference.size()
              << " landmarks) to " << config.out_csv.string() << "\n";
}

std::vector<RankedAlgorithm> run_rank(const RankConfig& config) {
    const std::vector<HitRateCurve> curves = parse_curves_csv(config.curves_csv);
    std::optional<std::map<std::string, double>> runtimes;
    if (config.runtimes) {
        runtimes = parse_runtimes(*config.runtimes);
    }
    const auto ranking = threshold_ranking(curves, config.threshold, runtimes);

    std::cout << "rank,algorithm_id,hit_rate,runtime_seconds\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        std::cout << (i + 1) << ',' << ranking[i].algorithm_id << ','
                  << format_sig(ranking[i].hit_rate) << ',';
        if (ranking[i].runtime_seconds) {
            std::cout << format_sig(*ranking[i].runtime_seconds);
        }
        std::cout << '\n';
    }
    if (config.out_csv) {
        if (config.out_csv->has_parent_path()) {
            std::filesystem::create_directories(config.out_csv->parent_path());
        }
        std::ofstream out(*config.out_csv, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + config.out_csv->string());
        }
        out << "rank,algorithm_id,hit_rate,runtime_seconds\n";
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            out << (i + 1) << ',' << ranking[i].algorithm_id << ','
                << format_sig(ranking[i].hit_rate) << ',';
            if (ranking[i].runtime_seconds) {
                out << format_sig(*ranking[i].runtime_seconds);
            }
            out << '\n';
        }
    }
    return ranking;
}

namespace {

std::string error_prefix() {
    const bool no_color = std::getenv("HITR_NO_COLOR") != nullptr;
    if (!no_color && isatty(2)) {
        return "\x1b[31merror:\x1b[0m ";
    }
    return "error: ";
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Label-noise-aware landmark hit-rate evaluation for image registration"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    EvalConfig eval;
    std::string scope = "global";
    std::string missing_policy = "miss";
    std::string aggregation = "image-mean";
    std::string eval_weights;
    std::string eval_runtimes;
    double correlation_radius = -1.0;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate predictions against annotations");
    cmd_eval->add_option("--annotations", eval.annotations, "annotations CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_eval->add_option("--predictions", eval.predictions, "predictions CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_eval->add_option("--weights", eval_weights, "annotator reliability weights CSV")
        ->check(CLI::ExistingFile);
    cmd_eval->add_option("--runtimes", eval_runtimes, "per-algorithm runtimes CSV")
        ->check(CLI::ExistingFile);
    cmd_eval->add_option("--out", eval.out_dir, "output directory")->required();
    cmd_eval->add_option("--mu-min", eval.mu_min, "smallest MAD multiplier")
        ->capture_default_str();
    cmd_eval->add_option("--mu-max", eval.mu_max, "largest MAD multiplier")
        ->capture_default_str();
    cmd_eval->add_option("--mu-steps", eval.mu_steps, "number of grid intervals")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd_eval->add_option("--scope", scope, "radius schedule scope")
        ->check(CLI::IsMember({"global", "image"}))
        ->capture_default_str();
    cmd_eval->add_option("--missing-policy", missing_policy, "absent predictions: miss or fail")
        ->check(CLI::IsMember({"miss", "strict"}))
        ->capture_default_str();
    cmd_eval->add_option("--aggregation", aggregation, "dataset hit-rate aggregation")
        ->check(CLI::IsMember({"image-mean", "pooled"}))
        ->capture_default_str();
    cmd_eval->add_option("--correlation-radius", correlation_radius,
                         "fixed radius for the hit-vs-TRE pairs (default: per-annotator radii)");

    SimulateConfig simulate;
    std::string simulate_distances;
    auto* cmd_simulate =
        app.add_subcommand("simulate", "Generate a virtual annotator cohort");
    cmd_simulate->add_option("--annotations", simulate.annotations, "reference annotations CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_simulate
        ->add_option("--distances", simulate_distances,
                     "annotations CSV the distance population is derived from "
                     "(default: the reference file)")
        ->check(CLI::ExistingFile);
    cmd_simulate->add_option("--annotators", simulate.annotators, "cohort size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--seed", simulate.seed, "master seed")->capture_default_str();
    cmd_simulate->add_flag("--normalize", simulate.normalize_per_dimension,
                           "divide per-dimension offsets by sqrt(3)");
    cmd_simulate->add_option("--out", simulate.out_csv, "output annotations CSV")->required();

    RankConfig rank;
    std::string rank_runtimes;
    std::string rank_out;
    auto* cmd_rank = app.add_subcommand("rank", "Rank algorithms at a threshold radius");
    cmd_rank->add_option("--curves", rank.curves_csv, "curves CSV from eval")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_rank->add_option("--threshold", rank.threshold, "radius threshold in mm")->required();
    cmd_rank->add_option("--runtimes", rank_runtimes, "per-algorithm runtimes CSV")
        ->check(CLI::ExistingFile);
    cmd_rank->add_option("--out", rank_out, "also write the ranking CSV here");

    DemoConfig demo;
    auto* cmd_demo = app.add_subcommand("demo", "Write a small synthetic dataset");
    cmd_demo->add_option("--out", demo.out_dir, "output directory")->required();
    cmd_demo->add_option("--seed", demo.seed, "master seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_eval->parsed()) {
            if (!eval_weights.empty()) {
                eval.weights = eval_weights;
            }
            if (!eval_runtimes.empty()) {
                eval.runtimes = eval_runtimes;
            }
            eval.scope = scope == "global" ? ScheduleScope::global : ScheduleScope::image;
            eval.missing_policy =
                missing_policy == "miss" ? MissingPolicy::miss : MissingPolicy::strict;
            eval.aggregation = aggregation == "image-mean" ? CurveAggregation::image_mean
                                                           : CurveAggregation::pooled_landmarks;
            if (cmd_eval->count("--correlation-radius") > 0) {
                if (correlation_radius < 0.0) {
                    throw Error("--correlation-radius must be non-negative");
                }
                eval.correlation_radius = correlation_radius;
            }
            const EvaluationReport report = run_eval(eval);
            std::cout << "evaluated " << report.algorithms.size() << " algorithm(s); report at "
                      << (eval.out_dir / "report.json").string() << "\n";
            if (!report.warnings.empty()) {
                std::cout << report.warnings.size() << " warning(s) recorded in the report\n";
            }
        } else if (cmd_simulate->parsed()) {
            if (!simulate_distances.empty()) {
                simulate.distances = simulate_distances;
            }
            run_simulate(simulate);
        } else if (cmd_rank->parsed()) {
            if (!rank_runtimes.empty()) {
                rank.runtimes = rank_runtimes;
            }
            if (!rank_out.empty()) {
                rank.out_csv = rank_out;
            }
            run_rank(rank);
        } else if (cmd_demo->parsed()) {
            run_demo(demo);
            std::cout << "wrote demo dataset to " << demo.out_dir.string() << "\n";
        }
    } catch (const Error& e) {
        std::cerr << error_prefix() << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << error_prefix() << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace hitr
