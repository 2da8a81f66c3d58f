#include <doctest.h>

#include <fstream>
#include <sstream>

#include "lexsimp/cli.hpp"
#include "test_support.hpp"

using Json = nlohmann::ordered_json;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result lexsimp_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "lexsimp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = lexsimp::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return testing::data_path(name); }

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("stats reproduces the corpus marginals") {
    const auto r = lexsimp_cli({"stats", "--dataset", data("stats_wikinews.jsonl"), "--dataset", data("stats_news.jsonl"),
                                "--dataset", data("stats_wikipedia.jsonl"), "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(lines_of(r.out) == std::vector<std::string>{"Dataset,NOI,NOC,min,max,avg",
                                                      "stats_wikinews,100,412,2,13,6.1",
                                                      "stats_news,150,621,1,12,5.0",
                                                      "stats_wikipedia,150,531,1,12,5.4"});
    const auto j = lexsimp_cli({"stats", "--dataset", data("stats_wikinews.jsonl"), "--format", "json"});
    REQUIRE(j.code == 0);
    const auto rows = Json::parse(j.out);
    CHECK(rows[0]["NOI"] == 100);
    CHECK(rows[0]["NOC"] == 412);
    CHECK(rows[0]["avg"] == "6.1");
}

TEST_CASE("colls run matches the golden outcomes and is byte-stable") {
    const std::vector<std::string> args{"run", "--dataset", data("casestudy_gold.jsonl"), "--provider",
                                        data("colls_provider.json"), "--mode", "colls"};
    const auto first = lexsimp_cli(args);
    REQUIRE(first.code == 0);
    CHECK(first.out == testing::read_file(data("casestudy_colls.golden.jsonl")));
    CHECK(lexsimp_cli(args).out == first.out);
    auto parallel = args;
    parallel.insert(parallel.end(), {"--jobs", "3"});
    CHECK(lexsimp_cli(parallel).out == first.out);
    CHECK(lines_of(first.out).size() == 5);
}

TEST_CASE("one-step runs align edits") {
    const auto r = lexsimp_cli({"run", "--dataset", data("casestudy_gold.jsonl"), "--provider",
                                data("direct_provider.json"), "--mode", "direct"});
    REQUIRE(r.code == 0);
    const auto outcomes = lines_of(r.out);
    REQUIRE(outcomes.size() == 5);
    for (const auto& line : outcomes) {
        const auto o = Json::parse(line);
        CHECK(o["mode"] == "direct");
        for (const auto& e : o["edits"]) CHECK_FALSE(e.contains("stage_trace"));
    }
    const auto cot = lexsimp_cli({"run", "--dataset", data("casestudy_gold.jsonl"), "--provider", data("cot_provider.json"),
                                  "--mode", "cot"});
    CHECK(cot.code == 0);
}

TEST_CASE("run writes to --out and evaluate scores the file") {
    testing::TempDir dir;
    const auto outcomes = (dir.path() / "colls.jsonl").string();
    REQUIRE(lexsimp_cli({"run", "--dataset", data("casestudy_gold.jsonl"), "--provider", data("colls_provider.json"),
                         "--mode", "colls", "--out", outcomes})
                .code == 0);
    const auto r = lexsimp_cli({"evaluate", "--dataset", data("casestudy_gold.jsonl"), "--outcomes", outcomes,
                                "--aggregation", "both", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("Dataset,Method,Agg,NumCW,CorrectCW,CorrectSimp,F1,F1-20", 0) == 0);
    CHECK(rows[1].rfind("casestudy_gold,colls,micro,", 0) == 0);
    CHECK(rows[2].rfind("casestudy_gold,colls,macro,", 0) == 0);

    const auto report_path = (dir.path() / "report.json").string();
    REQUIRE(lexsimp_cli({"evaluate", "--dataset", data("casestudy_gold.jsonl"), "--outcomes", outcomes, "--format",
                         "json", "--out", report_path})
                .code == 0);
    const auto again = lexsimp_cli({"report", "--in", report_path, "--format", "csv"});
    REQUIRE(again.code == 0);
    CHECK(lines_of(again.out).size() == 2);
}

TEST_CASE("ablate sweeps the validation stage from zero") {
    const auto r = lexsimp_cli({"ablate", "--dataset", data("casestudy_gold.jsonl"), "--provider",
                                data("colls_sticky_provider.json"), "--stage", "validation"});
    REQUIRE(r.code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].rfind("stage", 0) == 0);
    const auto j = Json::parse(lexsimp_cli({"ablate", "--dataset", data("casestudy_gold.jsonl"), "--provider",
                                            data("colls_sticky_provider.json"), "--stage", "validation", "--format",
                                            "json"})
                                   .out);
    REQUIRE(j.size() == 7);
    for (std::size_t n = 0; n < j.size(); ++n) {
        CHECK(j[n]["n"] == n);
        CHECK(j[n]["m"] == (n + 1) / 2);
    }
    const auto sg = Json::parse(lexsimp_cli({"ablate", "--dataset", data("casestudy_gold.jsonl"), "--provider",
                                             data("colls_sticky_provider.json"), "--stage", "sg", "--max-n", "3",
                                             "--format", "json"})
                                    .out);
    REQUIRE(sg.size() == 3);
    CHECK(sg[0]["n"] == 1);
}

TEST_CASE("candidates and preannotate build task files") {
    testing::TempDir dir;
    const auto tasks = (dir.path() / "tasks.jsonl").string();
    auto r = lexsimp_cli({"candidates", "--dataset", data("annotation_source.jsonl"), "--generators",
                          data("annotation_generators.jsonl"), "--out", tasks});
    REQUIRE(r.code == 0);
    const auto annotated = (dir.path() / "annotated.jsonl").string();
    r = lexsimp_cli({"preannotate", "--tasks", tasks, "--provider", data("annotator_a_provider.json"), "--provider",
                     data("annotator_b_provider.json"), "--out", annotated});
    REQUIRE(r.code == 0);
    const auto lines = lines_of(testing::read_file(annotated));
    REQUIRE(lines.size() == 3);
    const auto first = Json::parse(lines[0]);
    CHECK(first["recommendations"].size() == first["pseudo_substitutes"].size());
    CHECK(first["recommendations"][0]["A"]["direct"] == "yes");
    CHECK(first["recommendations"][0]["B"]["direct"] == "no");

    r = lexsimp_cli({"preannotate", "--tasks", tasks, "--provider", data("annotator_a_provider.json")});
    CHECK(r.code == 2);
}

TEST_CASE("exit codes") {
    CHECK(lexsimp_cli({"stats", "--bogus"}).code == 2);
    CHECK(lexsimp_cli({"stats", "--dataset", data("missing.jsonl")}).code == 2);
    CHECK(lexsimp_cli({"frobnicate"}).code == 2);
    CHECK(lexsimp_cli({"run", "--dataset", data("casestudy_gold.jsonl"), "--provider", data("colls_provider.json"),
                       "--mode", "fancy"})
              .code == 2);
    CHECK(lexsimp_cli({"--help"}).code == 0);

    // A runtime failure: the provider config is not a valid config.
    const auto bad = lexsimp_cli({"run", "--dataset", data("casestudy_gold.jsonl"), "--provider",
                                  data("casestudy_gold.jsonl"), "--mode", "colls"});
    CHECK(bad.code == 1);
    const auto err = Json::parse(bad.err);
    CHECK(err["error"]["kind"] == "ConfigError");
    CHECK(bad.out.empty());
}

}
