#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hitr/io.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hitr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("hitr_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("parse_annotations: valid file, errors with line numbers") {
    TempDir dir;
    const auto good = write_file(dir.path / "good.csv",
                                 "image_id,landmark_id,annotator_id,x_mm,y_mm,z_mm\n"
                                 "img1,lm1,a,1.5,2.5,3.5\n"
                                 "img1,lm1,b,1.0,2.0,3.0\n"
                                 "img2,lm1,a,-4.25,0,19\n");
    const auto store = parse_annotations(good);
    CHECK(store.annotation_count() == 3);
    CHECK(store.at({"img1", "lm1"}).size() == 2);
    CHECK(store.at({"img2", "lm1"})[0].point == Point3{-4.25, 0.0, 19.0});

    const auto nan_file = write_file(dir.path / "nan.csv",
                                     "image_id,landmark_id,annotator_id,x_mm,y_mm,z_mm\n"
                                     "img1,lm1,a,nan,2.5,3.5\n");
    CHECK_THROWS_WITH_AS(parse_annotations(nan_file),
                         doctest::Contains("nan.csv:2"), Error);

    const auto bad_header = write_file(dir.path / "header.csv", "x,y,z\nimg1,lm1,a,1,2,3\n");
    CHECK_THROWS_WITH_AS(parse_annotations(bad_header), doctest::Contains("bad header"), Error);

    const auto short_row = write_file(dir.path / "short.csv",
                                      "image_id,landmark_id,annotator_id,x_mm,y_mm,z_mm\n"
                                      "img1,lm1,a,1,2\n");
    CHECK_THROWS_WITH_AS(parse_annotations(short_row), doctest::Contains("short.csv:2"), Error);

    const auto duplicate = write_file(dir.path / "dup.csv",
                                      "image_id,landmark_id,annotator_id,x_mm,y_mm,z_mm\n"
                                      "img1,lm1,a,1,2,3\n"
                                      "img1,lm1,a,4,5,6\n");
    CHECK_THROWS_WITH_AS(parse_annotations(duplicate), doctest::Contains("dup.csv:3"), Error);

    CHECK_THROWS_AS(parse_annotations(dir.path / "absent.csv"), Error);
}

TEST_CASE("annotations round-trip bit-exactly") {
    TempDir dir;
    std::mt19937_64 rng(71);
    for (int rep = 0; rep < 5; ++rep) {
        const auto data = oracle::random_dataset(rng);
        const auto path = dir.path / ("roundtrip" + std::to_string(rep) + ".csv");
        write_annotations(data.annotations, path);
        const auto parsed = parse_annotations(path);
        REQUIRE(parsed.landmark_count() == data.annotations.landmark_count());
        for (const auto& [key, annotations] : data.annotations.entries()) {
            const auto& other = parsed.at(key);
            REQUIRE(other.size() == annotations.size());
            for (std::size_t i = 0; i < annotations.size(); ++i) {
                CHECK(other[i].annotator_id == annotations[i].annotator_id);
                CHECK(other[i].point == annotations[i].point); // bit-equal
            }
        }
    }
}

TEST_CASE("parse_predictions with runtimes sidecar") {
    TempDir dir;
    std::string content = "algorithm_id,image_id,landmark_id,x_mm,y_mm,z_mm\n";
    for (int a = 0; a < 2; ++a) {
        for (int l = 0; l < 5; ++l) {
            content += "alg" + std::to_string(a) + ",img,lm" + std::to_string(l) + ",1,2,3\n";
        }
    }
    const auto pred_path = write_file(dir.path / "pred.csv", content);
    const auto runtime_path =
        write_file(dir.path / "runtimes.csv", "algorithm_id,seconds\nalg0,12.5\nalg1,90\n");
    const auto store = parse_predictions(pred_path, runtime_path);
    CHECK(store.prediction_count() == 10);
    REQUIRE(store.runtimes().has_value());
    CHECK(store.runtimes()->at("alg0") == 12.5);

    const auto negative =
        write_file(dir.path / "neg.csv", "algorithm_id,seconds\nalg0,-3\n");
    CHECK_THROWS_WITH_AS(parse_runtimes(negative), doctest::Contains("negative runtime"), Error);

    const auto duplicate = write_file(dir.path / "dup_pred.csv",
                                      "algorithm_id,image_id,landmark_id,x_mm,y_mm,z_mm\n"
                                      "alg0,img,lm1,1,2,3\n"
                                      "alg0,img,lm1,4,5,6\n");
    CHECK_THROWS_AS(parse_predictions(duplicate), Error);
}

TEST_CASE("predictions round-trip bit-exactly") {
    TempDir dir;
    std::mt19937_64 rng(72);
    const auto data = oracle::random_dataset(rng);
    const auto path = dir.path / "pred.csv";
    write_predictions(data.predictions, path);
    const auto parsed = parse_predictions(path);
    REQUIRE(parsed.prediction_count() == data.predictions.prediction_count());
    for (const auto& [key, point] : data.predictions.entries()) {
        const Point3* other = parsed.find(key.first, key.second);
        REQUIRE(other != nullptr);
        CHECK(*other == point);
    }
}

TEST_CASE("weights parse, reject negatives, round-trip") {
    TempDir dir;
    const auto good = write_file(dir.path / "w.csv", "annotator_id,lambda\nA,0.5\nB,0.5\n");
    const auto weights = parse_weights(good);
    CHECK(weights.at("A") == 0.5);
    CHECK(weights.at("B") == 0.5);

    const auto negative = write_file(dir.path / "wneg.csv", "annotator_id,lambda\nA,-0.1\n");
    CHECK_THROWS_WITH_AS(parse_weights(negative), doctest::Contains("negative weight"), Error);

    WeightMap original{{"A", 0.3}, {"B", 0.7}, {"C", 1.0 / 3.0}};
    const auto path = dir.path / "wround.csv";
    write_weights(original, path);
    CHECK(parse_weights(path) == original);
}

TEST_CASE("float formatting: shortest round-trip and 6 significant digits") {
    CHECK(format_full(0.1) == "0.1");
    CHECK(std::strtod(format_full(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
    CHECK(format_sig(0.123456789) == "0.123457");
    CHECK(format_sig(1234567.0) == "1.23457e+06");
    CHECK(format_sig(3.0) == "3");
}

namespace {

EvaluationReport tiny_report() {
    EvaluationReport report;
    report.version = "0.1.0";
    report.config = {{"scope", "global"}, {"missing_policy", "miss"}};
    report.median_radius_mm = 1.234567891;
    AlgorithmReport alg;
    alg.algorithm_id = "alg0";
    alg.curve.algorithm_id = "alg0";
    alg.curve.samples = {{-1.0, 0.5, 0.25}, {0.0, 1.2345678, 0.75}};
    alg.hit_rate_at_median = 2.0 / 3.0;
    alg.hit_rate_per_image = {{"img0", 0.5}, {"img1", 1.0}};
    alg.tre_mm = SummaryStats{0.1, 0.2, 0.3, 0.4, 0.5, 0.3, 9};
    alg.per_annotator = {{"rater0", 1.0}};
    alg.runtime_seconds = 17.25;
    report.algorithms.push_back(alg);
    report.ranking_at_median = {{"alg0", 2.0 / 3.0, 17.25}};
    report.pooled_correlation = -0.4937;
    report.correlation_pairs = 42;
    report.correlation_radii = "per_annotator";
    report.warnings = {"missing prediction: algorithm=alg0 image=img2 landmark=lm1"};
    return report;
}

} // namespace

TEST_CASE("report serialization is byte-stable and 6-digit formatted") {
    TempDir dir;
    const auto report = tiny_report();
    write_report(report, dir.path / "a.json");
    write_report(report, dir.path / "b.json");
    const std::string a = read_file(dir.path / "a.json");
    CHECK(a == read_file(dir.path / "b.json"));
    CHECK(a.find("0.666667") != std::string::npos);  // 2/3 at 6 significant digits
    CHECK(a.find("-0.4937") != std::string::npos);
    CHECK(a.find("\"tool\": \"hitr\"") != std::string::npos);
    CHECK(a.find("img2") != std::string::npos); // warning kept verbatim
}

TEST_CASE("curves CSV round-trips to printed precision") {
    TempDir dir;
    HitRateCurve curve;
    curve.algorithm_id = "alg0";
    curve.samples = {{-2.0, 0.0, 0.0}, {0.0, 1.23456789, 0.3333333}, {2.0, 4.5, 1.0}};
    HitRateCurve other;
    other.algorithm_id = "alg1";
    other.samples = {{0.0, 0.5, 0.5}};
    const auto path = dir.path / "curves.csv";
    write_curves_csv({curve, other}, path);

    const auto parsed = parse_curves_csv(path);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].algorithm_id == "alg0");
    REQUIRE(parsed[0].samples.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(format_sig(parsed[0].samples[i].radius) == format_sig(curve.samples[i].radius));
        CHECK(format_sig(parsed[0].samples[i].hit_rate) == format_sig(curve.samples[i].hit_rate));
        CHECK(format_sig(parsed[0].samples[i].mu) == format_sig(curve.samples[i].mu));
    }

    const auto decreasing = write_file(dir.path / "bad.csv",
                                       "algorithm_id,mu,radius_mm,hit_rate\n"
                                       "a,0,5,0.5\n"
                                       "a,1,4,0.6\n");
    CHECK_THROWS_AS(parse_curves_csv(decreasing), Error);

    const auto out_of_range = write_file(dir.path / "range.csv",
                                         "algorithm_id,mu,radius_mm,hit_rate\n"
                                         "a,0,1,1.5\n");
    CHECK_THROWS_AS(parse_curves_csv(out_of_range), Error);
}

TEST_CASE("curve chart: one polyline per algorithm, deterministic bytes") {
    TempDir dir;
    HitRateCurve curve;
    curve.algorithm_id = "only";
    curve.samples = {{0.0, 0.5, 0.2}, {1.0, 2.0, 0.8}, {2.0, 4.0, 1.0}};
    const auto path_a = dir.path / "a.svg";
    const auto path_b = dir.path / "b.svg";
    write_curve_chart_svg({curve}, path_a);
    write_curve_chart_svg({curve}, path_b);
    const std::string svg = read_file(path_a);
    CHECK(svg == read_file(path_b));

    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1)) {
        ++polylines;
    }
    CHECK(polylines == 1);
    CHECK(svg.find("radius [mm]") != std::string::npos);
    CHECK(svg.find("hit rate") != std::string::npos);
    CHECK(svg.find("only") != std::string::npos); // legend entry
    CHECK(svg.rfind("</svg>") != std::string::npos);
}

TEST_CASE("box chart renders one box per summary") {
    TempDir dir;
    std::vector<std::pair<std::string, SummaryStats>> summaries{
        {"alg0", {0.5, 1.0, 2.0, 3.5, 9.0, 2.8, 100}},
        {"alg1", {0.2, 0.7, 1.2, 2.0, 4.0, 1.5, 100}},
    };
    const auto path = dir.path / "box.svg";
    write_box_chart_svg(summaries, "TRE to individual annotator landmarks", "TRE [mm]", path);
    const std::string svg = read_file(path);
    std::size_t rects = 0;
    for (std::size_t pos = svg.find("<rect"); pos != std::string::npos;
         pos = svg.find("<rect", pos + 1)) {
        ++rects;
    }
    CHECK(rects == 3); // background + one box per algorithm
    CHECK(svg.find("alg0") != std::string::npos);
    CHECK(svg.find("alg1") != std::string::npos);
}
