#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexsimp/corpus.hpp"
#include "lexsimp/pipeline.hpp"

namespace lexsimp::metrics {

struct EvalCounts {
    std::size_t gold_p = 0;        // gold complex words
    std::size_t pred_q = 0;        // identified (edited) words
    std::size_t correct_cw = 0;
    std::size_t correct_simp = 0;
    std::int64_t weight_sum = 0;   // sum of annotator weights over correct simplifications

    EvalCounts& operator+=(const EvalCounts& o);
    friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

enum class Aggregation { micro, macro };

std::string_view to_string(Aggregation a);
Aggregation parse_aggregation(std::string_view s);  // throws InputError

struct MetricConfig {
    int w_max = 20;
    Aggregation aggregation = Aggregation::micro;

    void validate() const;  // throws ConfigError
};

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double precision_w = 0.0;
    double recall_w = 0.0;
    double f1_20 = 0.0;
};

/// Harmonic mean, 0 when both terms are 0.
double harmonic(double p, double r);

EvalCounts score_outcome(const pipeline::SimplificationOutcome& outcome, const corpus::Instance& gold,
                         const MetricConfig& config = {});

Scores f1_scores(const EvalCounts& counts, const MetricConfig& config = {});

struct ReportRow {
    std::string dataset;
    std::string method;
    Aggregation aggregation = Aggregation::micro;
    std::size_t num_cw = 0;
    std::size_t correct_cw = 0;
    std::size_t correct_simp = 0;
    Scores scores;
};

/// Micro sums the counts and scores once; macro averages per-instance scores.
ReportRow aggregate(std::span<const EvalCounts> per_instance, const MetricConfig& config);

using EvalReport = std::vector<ReportRow>;

enum class ReportFormat { table, json, csv };
ReportFormat parse_format(std::string_view s);  // throws InputError

void write_report(const EvalReport& report, ReportFormat format, std::ostream& out);

void to_json(nlohmann::ordered_json& j, const EvalCounts& c);
void to_json(nlohmann::ordered_json& j, const Scores& s);
void to_json(nlohmann::ordered_json& j, const ReportRow& r);
void from_json(const nlohmann::ordered_json& j, ReportRow& r);

} // namespace lexsimp::metrics
