#include "lexsimp/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "lexsimp/errors.hpp"

namespace lexsimp::metrics {

using Json = nlohmann::ordered_json;

EvalCounts& EvalCounts::operator+=(const EvalCounts& o) {
    gold_p += o.gold_p;
    pred_q += o.pred_q;
    correct_cw += o.correct_cw;
    correct_simp += o.correct_simp;
    weight_sum += o.weight_sum;
    return *this;
}

std::string_view to_string(Aggregation a) { return a == Aggregation::micro ? "micro" : "macro"; }

Aggregation parse_aggregation(std::string_view s) {
    if (s == "micro") return Aggregation::micro;
    if (s == "macro") return Aggregation::macro;
    throw InputError("unknown aggregation '" + std::string(s) + "' (expected micro or macro)");
}

void MetricConfig::validate() const {
    if (w_max < 1) throw ConfigError("w_max must be >= 1");
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

EvalCounts score_outcome(const pipeline::SimplificationOutcome& outcome, const corpus::Instance& gold,
                         const MetricConfig& config) {
    config.validate();
    if (outcome.original != gold.sentence) {
        throw InputError("outcome sentence does not match gold instance '" + gold.id + "'");
    }
    const auto& words = gold.complex_words;
    EvalCounts c;
    c.gold_p = words.size();
    c.pred_q = outcome.edits.size();

    std::vector<bool> cw_credited(words.size(), false);
    std::vector<bool> simp_credited(words.size(), false);
    for (const auto& edit : outcome.edits) {
        std::optional<std::size_t> match;
        bool any_overlap = false;
        for (std::size_t g = 0; g < words.size(); ++g) {
            if (!words[g].span.overlaps(edit.span)) continue;
            any_overlap = true;
            if (text::equals_ci(words[g].surface, edit.original_surface)) {
                match = g;
                break;
            }
        }
        if (!match && !any_overlap) {
            // Prefer an uncredited occurrence so duplicate surfaces are each reachable.
            for (std::size_t g = 0; g < words.size(); ++g) {
                if (!text::equals_ci(words[g].surface, edit.original_surface)) continue;
                if (!match || (cw_credited[*match] && !cw_credited[g])) match = g;
            }
        }
        if (!match) continue;
        const auto g = *match;
        if (!cw_credited[g]) {
            cw_credited[g] = true;
            ++c.correct_cw;
        }
        if (simp_credited[g]) continue;
        const auto& subs = words[g].substitutes;
        const bool hit = std::any_of(subs.begin(), subs.end(),
                                     [&](const std::string& s) { return text::equals_ci(s, edit.substitute); });
        if (hit) {
            simp_credited[g] = true;
            ++c.correct_simp;
            c.weight_sum += std::min(words[g].weight, config.w_max);
        }
    }
    return c;
}

Scores f1_scores(const EvalCounts& counts, const MetricConfig& config) {
    config.validate();
    auto ratio = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
    const auto q = static_cast<double>(counts.correct_simp);
    const auto big_q = static_cast<double>(counts.pred_q);
    const auto big_p = static_cast<double>(counts.gold_p);
    const auto h = static_cast<double>(counts.weight_sum);
    const auto w = static_cast<double>(config.w_max);
    Scores s;
    s.precision = ratio(q, big_q);
    s.recall = ratio(q, big_p);
    s.f1 = harmonic(s.precision, s.recall);
    s.precision_w = ratio(h, big_q * w);
    s.recall_w = ratio(h, big_p * w);
    s.f1_20 = harmonic(s.precision_w, s.recall_w);
    return s;
}

ReportRow aggregate(std::span<const EvalCounts> per_instance, const MetricConfig& config) {
    config.validate();
    ReportRow row;
    row.aggregation = config.aggregation;
    EvalCounts total;
    for (const auto& c : per_instance) total += c;
    row.num_cw = total.pred_q;
    row.correct_cw = total.correct_cw;
    row.correct_simp = total.correct_simp;
    if (config.aggregation == Aggregation::micro) {
        row.scores = f1_scores(total, config);
        return row;
    }
    if (per_instance.empty()) return row;
    for (const auto& c : per_instance) {
        const auto s = f1_scores(c, config);
        row.scores.precision += s.precision;
        row.scores.recall += s.recall;
        row.scores.f1 += s.f1;
        row.scores.precision_w += s.precision_w;
        row.scores.recall_w += s.recall_w;
        row.scores.f1_20 += s.f1_20;
    }
    const auto n = static_cast<double>(per_instance.size());
    row.scores.precision /= n;
    row.scores.recall /= n;
    row.scores.f1 /= n;
    row.scores.precision_w /= n;
    row.scores.recall_w /= n;
    row.scores.f1_20 /= n;
    return row;
}

ReportFormat parse_format(std::string_view s) {
    if (s == "table") return ReportFormat::table;
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw InputError("unknown format '" + std::string(s) + "' (expected table, json or csv)");
}

namespace {

const std::vector<std::string> kHeader = {"Dataset", "Method", "Agg",       "NumCW",  "CorrectCW", "CorrectSimp",
                                          "F1",      "F1-20",  "Precision", "Recall", "Precision-20", "Recall-20"};

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::vector<std::string> cells(const ReportRow& r) {
    return {r.dataset,
            r.method,
            std::string(to_string(r.aggregation)),
            std::to_string(r.num_cw),
            std::to_string(r.correct_cw),
            std::to_string(r.correct_simp),
            fixed3(r.scores.f1),
            fixed3(r.scores.f1_20),
            fixed3(r.scores.precision),
            fixed3(r.scores.recall),
            fixed3(r.scores.precision_w),
            fixed3(r.scores.recall_w)};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

} // namespace

void write_report(const EvalReport& report, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::json) {
        out << Json(report).dump(2) << '\n';
        return;
    }
    std::vector<std::vector<std::string>> rows{kHeader};
    for (const auto& r : report) rows.push_back(cells(r));
    if (format == ReportFormat::csv) {
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
            out << '\n';
        }
        return;
    }
    std::vector<std::size_t> width(kHeader.size(), 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], text::char_length(row[i]));
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto pad = std::string(width[i] - text::char_length(row[i]), ' ');
            // Text columns are left-aligned, numbers right-aligned.
            line += i < 3 ? row[i] + pad : pad + row[i];
            if (i + 1 < row.size()) line += "  ";
        }
        out << text::trim(line) << '\n';
    }
}

void to_json(Json& j, const EvalCounts& c) {
    j = Json{{"gold_p", c.gold_p},
             {"pred_q", c.pred_q},
             {"correct_cw", c.correct_cw},
             {"correct_simp", c.correct_simp},
             {"weight_sum", c.weight_sum}};
}

void to_json(Json& j, const Scores& s) {
    j = Json{{"precision", s.precision}, {"recall", s.recall},     {"f1", s.f1},
             {"precision_w", s.precision_w}, {"recall_w", s.recall_w}, {"f1_20", s.f1_20}};
}

void to_json(Json& j, const ReportRow& r) {
    j = Json::object();
    j["dataset"] = r.dataset;
    j["method"] = r.method;
    j["aggregation"] = to_string(r.aggregation);
    j["num_cw"] = r.num_cw;
    j["correct_cw"] = r.correct_cw;
    j["correct_simp"] = r.correct_simp;
    const Json scores = r.scores;
    for (const auto& [k, v] : scores.items()) j[k] = v;
}

void from_json(const Json& j, ReportRow& r) {
    r.dataset = j.value("dataset", std::string());
    r.method = j.value("method", std::string());
    r.aggregation = parse_aggregation(j.value("aggregation", std::string("micro")));
    r.num_cw = j.value("num_cw", std::size_t{0});
    r.correct_cw = j.value("correct_cw", std::size_t{0});
    r.correct_simp = j.value("correct_simp", std::size_t{0});
    r.scores.precision = j.value("precision", 0.0);
    r.scores.recall = j.value("recall", 0.0);
    r.scores.f1 = j.value("f1", 0.0);
    r.scores.precision_w = j.value("precision_w", 0.0);
    r.scores.recall_w = j.value("recall_w", 0.0);
    r.scores.f1_20 = j.value("f1_20", 0.0);
}

} // namespace lexsimp::metrics
