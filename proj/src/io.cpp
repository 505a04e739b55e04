#include "hitr/io.hpp"

#include "hitr/version.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <tuple>

namespace hitr {

namespace {

constexpr const char* kAnnotationsHeader = "image_id,landmark_id,annotator_id,x_mm,y_mm,z_mm";
constexpr const char* kPredictionsHeader = "algorithm_id,image_id,landmark_id,x_mm,y_mm,z_mm";
constexpr const char* kWeightsHeader = "annotator_id,lambda";
constexpr const char* kRuntimesHeader = "algorithm_id,seconds";
constexpr const char* kCurvesHeader = "algorithm_id,mu,radius_mm,hit_rate";

std::string location(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_number(const std::string& field, const std::filesystem::path& path,
                    std::size_t line, const char* what, bool require_finite = true) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw Error(location(path, line) + ": cannot parse " + std::string(what) + " '" + field +
                    "'");
    }
    if (require_finite && !std::isfinite(value)) {
        throw Error(location(path, line) + ": non-finite " + std::string(what) + " '" + field +
                    "'");
    }
    return value;
}

// One row per call; strips a trailing carriage return so CRLF files parse.
class CsvReader {
  public:
    CsvReader(const std::filesystem::path& path, const char* expected_header)
        : path_(path), in_(path) {
        if (!in_) {
            throw Error("cannot open " + path.string());
        }
        std::string header;
        if (!std::getline(in_, header)) {
            throw Error(path.string() + ": missing header (expected '" +
                        std::string(expected_header) + "')");
        }
        strip_cr(header);
        if (header != expected_header) {
            throw Error(location(path, 1) + ": bad header '" + header + "' (expected '" +
                        std::string(expected_header) + "')");
        }
        line_number_ = 1;
    }

    bool next_row(std::vector<std::string>& fields, std::size_t expected_fields) {
        std::string line;
        if (!std::getline(in_, line)) {
            return false;
        }
        ++line_number_;
        strip_cr(line);
        fields = split_fields(line);
        if (fields.size() != expected_fields) {
            throw Error(location(path_, line_number_) + ": expected " +
                        std::to_string(expected_fields) + " fields, got " +
                        std::to_string(fields.size()));
        }
        return true;
    }

    std::size_t line() const { return line_number_; }
    const std::filesystem::path& path() const { return path_; }

  private:
    static void strip_cr(std::string& line) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
    }

    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_number_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // '\n' line endings everywhere
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

} // namespace

std::string format_full(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

std::string format_sig(double value, int significant) {
    char buffer[64];
    const int n = std::snprintf(buffer, sizeof(buffer), "%.*g", significant, value);
    return std::string(buffer, static_cast<std::size_t>(n));
}

AnnotationStore parse_annotations(const std::filesystem::path& path) {
    CsvReader reader(path, kAnnotationsHeader);
    std::vector<AnnotationRow> rows;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::vector<std::string> f;
    while (reader.next_row(f, 6)) {
        if (!seen.emplace(f[0], f[1], f[2]).second) {
            throw Error(location(path, reader.line()) + ": duplicate (image, landmark, annotator) "
                        "triple (" + f[0] + ", " + f[1] + ", " + f[2] + ")");
        }
        AnnotationRow row;
        row.image_id = f[0];
        row.landmark_id = f[1];
        row.annotator_id = f[2];
        row.point.x = parse_number(f[3], path, reader.line(), "x_mm");
        row.point.y = parse_number(f[4], path, reader.line(), "y_mm");
        row.point.z = parse_number(f[5], path, reader.line(), "z_mm");
        rows.push_back(std::move(row));
    }
    return AnnotationStore::from_rows(rows);
}

PredictionStore parse_predictions(const std::filesystem::path& path,
                                  const std::optional<std::filesystem::path>& runtimes_path) {
    CsvReader reader(path, kPredictionsHeader);
    std::vector<PredictionRow> rows;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::vector<std::string> f;
    while (reader.next_row(f, 6)) {
        if (!seen.emplace(f[0], f[1], f[2]).second) {
            throw Error(location(path, reader.line()) +
                        ": duplicate (algorithm, image, landmark) triple (" + f[0] + ", " + f[1] +
                        ", " + f[2] + ")");
        }
        PredictionRow row;
        row.algorithm_id = f[0];
        row.image_id = f[1];
        row.landmark_id = f[2];
        row.point.x = parse_number(f[3], path, reader.line(), "x_mm");
        row.point.y = parse_number(f[4], path, reader.line(), "y_mm");
        row.point.z = parse_number(f[5], path, reader.line(), "z_mm");
        rows.push_back(std::move(row));
    }
    std::optional<std::map<std::string, double>> runtimes;
    if (runtimes_path) {
        runtimes = parse_runtimes(*runtimes_path);
    }
    return PredictionStore::from_rows(rows, std::move(runtimes));
}

WeightMap parse_weights(const std::filesystem::path& path) {
    CsvReader reader(path, kWeightsHeader);
    WeightMap weights;
    std::vector<std::string> f;
    while (reader.next_row(f, 2)) {
        const double lambda = parse_number(f[1], path, reader.line(), "lambda");
        if (lambda < 0.0) {
            throw Error(location(path, reader.line()) + ": negative weight for annotator " + f[0]);
        }
        if (!weights.emplace(f[0], lambda).second) {
            throw Error(location(path, reader.line()) + ": duplicate annotator " + f[0]);
        }
    }
    return weights;
}

std::map<std::string, double> parse_runtimes(const std::filesystem::path& path) {
    CsvReader reader(path, kRuntimesHeader);
    std::map<std::string, double> runtimes;
    std::vector<std::string> f;
    while (reader.next_row(f, 2)) {
        const double seconds = parse_number(f[1], path, reader.line(), "seconds");
        if (seconds < 0.0) {
            throw Error(location(path, reader.line()) + ": negative runtime for " + f[0]);
        }
        if (!runtimes.emplace(f[0], seconds).second) {
            throw Error(location(path, reader.line()) + ": duplicate algorithm " + f[0]);
        }
    }
    return runtimes;
}

void write_annotations(const AnnotationStore& store, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kAnnotationsHeader << '\n';
    for (const auto& [key, annotations] : store.entries()) {
        for (const auto& a : annotations) {
            out << key.image_id << ',' << key.landmark_id << ',' << a.annotator_id << ','
                << format_full(a.point.x) << ',' << format_full(a.point.y) << ','
                << format_full(a.point.z) << '\n';
        }
    }
}

void write_predictions(const PredictionStore& store, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kPredictionsHeader << '\n';
    for (const auto& [key, point] : store.entries()) {
        out << key.first << ',' << key.second.image_id << ',' << key.second.landmark_id << ','
            << format_full(point.x) << ',' << format_full(point.y) << ',' << format_full(point.z)
            << '\n';
    }
}

void write_weights(const WeightMap& weights, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kWeightsHeader << '\n';
    for (const auto& [annotator_id, lambda] : weights) {
        out << annotator_id << ',' << format_full(lambda) << '\n';
    }
}

void write_runtimes(const std::map<std::string, double>& runtimes,
                    const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kRuntimesHeader << '\n';
    for (const auto& [algorithm_id, seconds] : runtimes) {
        out << algorithm_id << ',' << format_full(seconds) << '\n';
    }
}

namespace {

// Rounds through the fixed 6-significant-digit text form, so the JSON
// serializer prints at most those digits and output bytes stay stable.
double round_sig6(double value) {
    return std::strtod(format_sig(value).c_str(), nullptr);
}

nlohmann::json stats_json(const SummaryStats& stats) {
    nlohmann::json j;
    j["min"] = round_sig6(stats.min);
    j["q1"] = round_sig6(stats.q1);
    j["median"] = round_sig6(stats.median);
    j["q3"] = round_sig6(stats.q3);
    j["max"] = round_sig6(stats.max);
    j["mean"] = round_sig6(stats.mean);
    j["n"] = stats.n;
    return j;
}

} // namespace

void write_report(const EvaluationReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = report.version;
    j["config"] = report.config;
    j["median_radius_mm"] = round_sig6(report.median_radius_mm);

    nlohmann::json algorithms = nlohmann::json::object();
    for (const auto& a : report.algorithms) {
        nlohmann::json ja;
        nlohmann::json curve = nlohmann::json::array();
        for (const auto& s : a.curve.samples) {
            curve.push_back({{"mu", round_sig6(s.mu)},
                             {"radius_mm", round_sig6(s.radius)},
                             {"hit_rate", round_sig6(s.hit_rate)}});
        }
        ja["curve"] = std::move(curve);
        nlohmann::json at_median;
        at_median["overall"] = round_sig6(a.hit_rate_at_median);
        nlohmann::json per_image = nlohmann::json::object();
        for (const auto& [image_id, rate] : a.hit_rate_per_image) {
            per_image[image_id] = round_sig6(rate);
        }
        at_median["per_image"] = std::move(per_image);
        ja["hit_rate_at_median_radius"] = std::move(at_median);
        ja["tre_summary_mm"] = stats_json(a.tre_mm);
        if (!a.per_annotator.empty()) {
            nlohmann::json cells = nlohmann::json::object();
            for (const auto& [annotator_id, rate] : a.per_annotator) {
                cells[annotator_id] = round_sig6(rate);
            }
            ja["per_annotator_hit_rate"] = std::move(cells);
        }
        if (a.annotator_spread) {
            ja["per_annotator_spread"] = stats_json(*a.annotator_spread);
        }
        if (a.runtime_seconds) {
            ja["runtime_seconds"] = round_sig6(*a.runtime_seconds);
        }
        if (a.correlation) {
            ja["hit_tre_pearson_r"] = round_sig6(*a.correlation);
        }
        algorithms[a.algorithm_id] = std::move(ja);
    }
    j["algorithms"] = std::move(algorithms);

    nlohmann::json ranking = nlohmann::json::array();
    for (const auto& row : report.ranking_at_median) {
        nlohmann::json jr;
        jr["algorithm_id"] = row.algorithm_id;
        jr["hit_rate"] = round_sig6(row.hit_rate);
        if (row.runtime_seconds) {
            jr["runtime_seconds"] = round_sig6(*row.runtime_seconds);
        }
        ranking.push_back(std::move(jr));
    }
    j["ranking_at_median_radius"] = std::move(ranking);

    nlohmann::json correlation;
    correlation["radii"] = report.correlation_radii;
    correlation["pairs"] = report.correlation_pairs;
    if (report.pooled_correlation) {
        correlation["pooled_pearson_r"] = round_sig6(*report.pooled_correlation);
    } else {
        correlation["pooled_pearson_r"] = nullptr;
    }
    j["correlation"] = std::move(correlation);

    j["warnings"] = report.warnings;

    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_curves_csv(const std::vector<HitRateCurve>& curves, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kCurvesHeader << '\n';
    for (const auto& curve : curves) {
        for (const auto& s : curve.samples) {
            out << curve.algorithm_id << ',' << format_sig(s.mu) << ',' << format_sig(s.radius)
                << ',' << format_sig(s.hit_rate) << '\n';
        }
    }
}

std::vector<HitRateCurve> parse_curves_csv(const std::filesystem::path& path) {
    CsvReader reader(path, kCurvesHeader);
    std::map<std::string, HitRateCurve> by_algorithm;
    std::vector<std::string> f;
    while (reader.next_row(f, 4)) {
        CurveSample sample;
        sample.mu = parse_number(f[1], path, reader.line(), "mu");
        sample.radius = parse_number(f[2], path, reader.line(), "radius_mm");
        sample.hit_rate = parse_number(f[3], path, reader.line(), "hit_rate");
        if (sample.radius < 0.0) {
            throw Error(location(path, reader.line()) + ": negative radius");
        }
        if (sample.hit_rate < 0.0 || sample.hit_rate > 1.0) {
            throw Error(location(path, reader.line()) + ": hit_rate outside [0, 1]");
        }
        auto& curve = by_algorithm[f[0]];
        curve.algorithm_id = f[0];
        if (!curve.samples.empty()) {
            if (sample.radius < curve.samples.back().radius) {
                throw Error(location(path, reader.line()) + ": curve radii must be " +
                            "non-decreasing per algorithm");
            }
            if (sample.radius == curve.samples.back().radius) {
                continue; // collapsed by printing precision
            }
        }
        curve.samples.push_back(sample);
    }
    std::vector<HitRateCurve> curves;
    curves.reserve(by_algorithm.size());
    for (auto& [_, curve] : by_algorithm) {
        curves.push_back(std::move(curve));
    }
    return curves;
}

} // namespace hitr
