// Acceptance suite: one PASS/FAIL line per primary criterion.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "lexsimp/annotation.hpp"
#include "lexsimp/cli.hpp"
#include "lexsimp/corpus.hpp"
#include "lexsimp/ensemble.hpp"
#include "lexsimp/metrics.hpp"
#include "lexsimp/pipeline.hpp"
#include "lexsimp/server.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace lexsimp;

constexpr double kMetricTolerance = 1e-12;
constexpr double kRuntimeLimitSeconds = 5.0;

/// Collects failure messages for one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        failed_ = failed_ || !ok;
    }
    bool failed() const { return failed_; }
    std::string summary() const {
        std::string out;
        for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
        return out;
    }

private:
    bool failed_ = false;
    std::vector<std::string> failures_;
};

int g_failures = 0;

void criterion(const std::string& name, const std::function<std::string(Check&)>& body) {
    Check check;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    try {
        detail = body(check);
    } catch (const std::exception& e) {
        check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (check.failed() ? "FAIL " : "PASS ") << name << " (" << detail << (detail.empty() ? "" : ", ");
    line.precision(3);
    line << std::fixed << secs << " s)";
    if (check.failed()) {
        line << ": " << check.summary();
        ++g_failures;
    }
    std::cout << line.str() << std::endl;
}

std::string within_limit(Check& check, std::chrono::steady_clock::time_point start) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(secs < kRuntimeLimitSeconds, "runtime limit exceeded");
    return "limit 5 s";
}

std::string combination_scoring(Check& check) {
    const auto start = std::chrono::steady_clock::now();
    oracle::Rng rng(20240601);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<ensemble::CandidateList> lists{oracle::random_list(rng), oracle::random_list(rng),
                                                         oracle::random_list(rng)};
        const auto got = ensemble::combine_score(lists, 12);
        const auto want = oracle::combine_score(lists, 12);
        bool same = got.size() == want.size();
        for (std::size_t i = 0; same && i < got.size(); ++i) {
            same = got[i].text == want[i].surface && got[i].score == want[i].score;
        }
        check.expect(same, "trial " + std::to_string(trial) + " differs from the oracle");
    }
    return "1000 triples, " + within_limit(check, start);
}

std::string majority_voting(Check& check) {
    const auto start = std::chrono::steady_clock::now();
    oracle::Rng rng(20240602);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = rng.between(1, 6);
        std::vector<ensemble::CandidateList> lists;
        for (std::size_t i = 0; i < n; ++i) lists.push_back(oracle::random_list(rng, 8, 10));
        std::size_t previous = SIZE_MAX;
        for (std::size_t m = 1; m <= n; ++m) {
            const auto maj = ensemble::majority_elements(lists, {n, m});
            check.expect(maj == oracle::majority_elements(lists, m), "majority differs at trial " + std::to_string(trial));
            check.expect(maj.size() <= previous, "majority grew with m at trial " + std::to_string(trial));
            previous = maj.size();

            const auto ranked = ensemble::vote_rank(lists, {n, m});
            const auto want = oracle::vote_rank(lists, m);
            bool same = ranked.size() == want.size();
            for (std::size_t i = 0; same && i < ranked.size(); ++i) {
                same = ranked[i].text == want[i].surface && ranked[i].votes == want[i].lists;
            }
            check.expect(same, "ranking differs at trial " + std::to_string(trial));
        }
    }
    return "1000 inputs, n in 1..6, " + within_limit(check, start);
}

std::string metric_formulas(Check& check) {
    oracle::Rng rng(20240603);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        metrics::MetricConfig cfg;
        cfg.w_max = static_cast<int>(rng.between(1, 30));
        const bool uniform = trial % 5 == 0;
        const auto c = oracle::random_counts(rng, cfg.w_max, uniform);
        const auto s = metrics::f1_scores(c, cfg);
        const auto o = oracle::f1(c, cfg.w_max);
        for (const auto& [got, want] : {std::pair{s.precision, o.p}, {s.recall, o.r}, {s.f1, o.f},
                                        {s.precision_w, o.pw}, {s.recall_w, o.rw}, {s.f1_20, o.fw}}) {
            worst = std::max(worst, std::abs(got - want));
        }
        if (uniform) check.expect(std::abs(s.f1_20 - s.f1) <= kMetricTolerance, "f1_20 != f1 with uniform weights");
        check.expect(s.precision_w <= s.precision + kMetricTolerance, "weighted precision exceeds precision");
        check.expect(s.recall_w <= s.recall + kMetricTolerance, "weighted recall exceeds recall");
    }
    check.expect(worst <= kMetricTolerance, "oracle deviation above tolerance");
    std::ostringstream d;
    d << "10000 counts, max deviation " << worst << ", tol 1e-12";
    return d.str();
}

std::string dataset_statistics(Check& check) {
    struct Row {
        const char* file;
        std::size_t noi, noc, min, max;
        const char* avg;
    };
    // Published marginals of the three constructed datasets.
    const Row rows[] = {{"stats_wikinews.jsonl", 100, 412, 2, 13, "6.1"},
                        {"stats_news.jsonl", 150, 621, 1, 12, "5.0"},
                        {"stats_wikipedia.jsonl", 150, 531, 1, 12, "5.4"}};
    for (const auto& r : rows) {
        const auto s = corpus::compute_stats(corpus::load_dataset_file(testing::data_path(r.file)));
        const bool ok = s.num_instances == r.noi && s.num_complex_words == r.noc && s.min_subs == r.min &&
                        s.max_subs == r.max && s.avg_display() == r.avg;
        check.expect(ok, std::string(r.file) + " marginals differ");
    }
    return "3 datasets";
}

std::string end_to_end(Check& check) {
    const auto run = [] {
        const std::string dataset = testing::data_path("casestudy_gold.jsonl");
        const std::string provider = testing::data_path("colls_provider.json");
        const char* argv[] = {"lexsimp", "run", "--dataset", dataset.c_str(), "--provider", provider.c_str(), "--mode", "colls"};
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::dispatch(8, argv, out, err);
        return std::pair{code, out.str()};
    };
    const auto [code1, first] = run();
    const auto [code2, second] = run();
    check.expect(code1 == 0 && code2 == 0, "run exited non-zero");
    check.expect(first == second, "repeated runs differ");
    check.expect(first == testing::read_file(testing::data_path("casestudy_colls.golden.jsonl")), "output differs from golden");

    std::size_t abandoned = 0;
    std::size_t rank_ties = 0;
    std::istringstream in(first);
    for (std::string line; std::getline(in, line);) {
        const auto o = Json::parse(line).get<pipeline::SimplificationOutcome>();
        abandoned += o.abandoned.size();
        check.expect(pipeline::apply_edits(o.original, o.edits) == o.simplified, o.id + " edits do not rebuild");
        for (const auto& e : o.edits) {
            const auto& tallies = e.stage_trace->validation_yes;
            const auto chosen = std::find_if(tallies.begin(), tallies.end(), [&](const auto& t) { return t.substitute == e.substitute; });
            // A tie: a lower-ranked candidate reached the same YES count as the chosen one.
            if (chosen == tallies.end()) continue;
            for (auto it = chosen + 1; it != tallies.end(); ++it) rank_ties += it->yes == chosen->yes;
        }
    }
    check.expect(abandoned == 1, "expected exactly one abandoned word");
    check.expect(rank_ties == 1, "expected exactly one tie settled by rank");
    return "5 sentences, " + std::to_string(abandoned) + " abandoned, " + std::to_string(rank_ties) + " rank tie";
}

std::string alignment(Check& check) {
    const auto cases = Json::parse(testing::read_file(testing::data_path("alignment_cases.json")));
    std::size_t preserved = 0;
    std::size_t flagged = 0;
    for (const auto& c : cases) {
        const auto name = c["name"].get<std::string>();
        const auto a = pipeline::align_edits(c["original"].get<std::string>(), c["simplified"].get<std::string>());
        if (c["structure_preserving"].get<bool>()) {
            std::vector<std::pair<std::string, std::string>> got;
            std::vector<std::pair<std::string, std::string>> want;
            for (const auto& e : a.edits) got.emplace_back(e.original_surface, e.substitute);
            for (const auto& e : c["edits"]) want.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
            check.expect(got == want && !a.flagged(), name + " substitutions differ");
            ++preserved;
        } else {
            check.expect(a.flagged(), name + " not flagged");
            ++flagged;
        }
    }
    return std::to_string(preserved) + " exact, " + std::to_string(flagged) + " flagged";
}

std::string annotation_service(Check& check) {
    annotation::AnnotationStore store;
    annotation::AnnotationTask task;
    task.task_id = "doc:4-8";
    task.instance_id = "doc";
    task.sentence = "The vast sea.";
    task.surface = "vast";
    task.span = {4, 8};
    task.pseudo_substitutes = {"big", "huge", "wide"};
    store.import_tasks(std::vector{task});

    server::ServerOptions opts;
    opts.port = 0;
    server::AnnotationServer srv(store, opts);
    httplib::Client client("127.0.0.1", srv.start());
    const httplib::Headers who{{"X-Annotator-Id", "ann"}};
    auto post = [&](const std::string& sub, const std::string& verdict) {
        auto res = client.Post("/tasks/doc:4-8/judgments", who, Json{{"substitute", sub}, {"verdict", verdict}}.dump(),
                               "application/json");
        return res && res->status == 201;
    };
    check.expect(post("big", "YES"), "POST judgment failed");
    auto res = client.Get("/tasks/doc:4-8", who);
    check.expect(res && Json::parse(res->body)["verdicts"]["big"] == "YES", "GET does not show the verdict");
    check.expect(post("big", "NO") && post("huge", "YES") && post("wide", "UNSURE"), "POST judgment failed");
    res = client.Get("/tasks/doc:4-8", who);
    check.expect(res && Json::parse(res->body)["verdicts"]["big"] == "NO", "latest verdict does not win");
    res = client.Get("/export");
    check.expect(res && res->status == 200, "export failed");
    if (res && res->status == 200) {
        const auto instances = Json::parse(res->body)["instances"];
        check.expect(instances.size() == 1 && instances[0]["complex_words"][0]["substitutes"] == Json::array({"huge"}),
                     "export content wrong");
    }
    srv.stop();

    oracle::Rng rng(20240604);
    const annotation::Signal signals[] = {annotation::Signal::yes, annotation::Signal::no, annotation::Signal::failed};
    const annotation::Verdict verdicts[] = {annotation::Verdict::YES, annotation::Verdict::NO, annotation::Verdict::UNSURE};
    std::size_t exports = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<annotation::AnnotationTask> tasks;
        std::vector<annotation::Judgment> judgments;
        std::uint64_t seq = 0;
        const auto n = rng.between(1, 5);
        for (std::size_t i = 0; i < n; ++i) {
            auto t = task;
            t.task_id = "t" + std::to_string(i);
            t.instance_id = "doc" + std::to_string(i);
            for (const auto& s : t.pseudo_substitutes) {
                t.recommendations.push_back({signals[rng.below(3)], signals[rng.below(3)], signals[rng.below(3)],
                                             signals[rng.below(3)]});
                for (std::size_t v = rng.below(3); v > 0; --v) {
                    judgments.push_back({t.task_id, s, "ann" + std::to_string(rng.below(2)), verdicts[rng.below(3)], 0, ++seq});
                }
            }
            tasks.push_back(t);
        }
        const auto k3 = annotation::consistency_report(tasks, judgments, 3);
        const auto k4 = annotation::consistency_report(tasks, judgments, 4);
        check.expect(k4.adopted <= k3.adopted, "adopted(k=4) > adopted(k=3)");
        annotation::ExportOptions force;
        force.force = true;
        for (const auto& inst : annotation::export_dataset(tasks, judgments, {}, force)) {
            corpus::validate(inst);
            ++exports;
        }
    }
    return "HTTP round trip, 500 random signal sets, " + std::to_string(exports) + " exported instances validated";
}

} // namespace

int main() {
    criterion("combination-scoring", combination_scoring);
    criterion("majority-voting", majority_voting);
    criterion("metric-formulas", metric_formulas);
    criterion("dataset-statistics", dataset_statistics);
    criterion("end-to-end-determinism", end_to_end);
    criterion("alignment", alignment);
    criterion("annotation-service", annotation_service);
    return g_failures == 0 ? 0 : 1;
}
