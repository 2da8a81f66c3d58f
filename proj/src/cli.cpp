#include "lexsimp/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <iostream>
#include <sstream>

#include "lexsimp/annotation.hpp"
#include "lexsimp/corpus.hpp"
#include "lexsimp/errors.hpp"
#include "lexsimp/metrics.hpp"
#include "lexsimp/pipeline.hpp"
#include "lexsimp/promptkit.hpp"
#include "lexsimp/providers.hpp"
#include "lexsimp/server.hpp"

namespace lexsimp::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Common {
    std::string format = "table";
    std::string out_path;
};

/// Writes to --out when given, else to the dispatcher's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw IoError("cannot open output file " + path);
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }
    void close() {
        stream_->flush();
        if (!*stream_) throw IoError("failed to write output");
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

std::string dataset_label(const std::string& path) { return fs::path(path).stem().string(); }

corpus::CorpusOptions lenient() {
    corpus::CorpusOptions o;
    o.require_substitutes = false;
    return o;
}

template <class T>
std::vector<T> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<T> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(Json::parse(line).get<T>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": " + e.what(), line_no);
        }
    }
    return out;
}

std::size_t ceil_half(std::size_t n) { return (n + 1) / 2; }

// --- stats ---------------------------------------------------------------------

void cmd_stats(const std::vector<std::string>& datasets, const Common& c, std::ostream& out) {
    Json rows = Json::array();
    std::vector<std::pair<std::string, corpus::DatasetStats>> stats;
    for (const auto& path : datasets) {
        const auto instances = corpus::load_dataset_file(path);
        stats.emplace_back(dataset_label(path), corpus::compute_stats(instances));
    }
    Sink sink(c.out_path, out);
    if (c.format == "json") {
        for (const auto& [label, s] : stats) {
            Json row = Json::object();
            row["dataset"] = label;
            const Json fields = s;
            for (const auto& [k, v] : fields.items()) row[k] = v;
            rows.push_back(std::move(row));
        }
        *sink << rows.dump(2) << '\n';
    } else {
        const char* sep = c.format == "csv" ? "," : "\t";
        *sink << "Dataset" << sep << "NOI" << sep << "NOC" << sep << "min" << sep << "max" << sep << "avg" << '\n';
        auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string("-"); };
        for (const auto& [label, s] : stats) {
            *sink << label << sep << s.num_instances << sep << s.num_complex_words << sep << opt(s.min_subs) << sep
                  << opt(s.max_subs) << sep << s.avg_display() << '\n';
        }
    }
    sink.close();
}

// --- candidates / preannotate / serve ------------------------------------------

void cmd_candidates(const std::string& dataset, const std::string& generators,
                    const std::optional<std::string>& adjudicator, const Common& c, std::ostream& out) {
    const auto instances = corpus::load_dataset_file(dataset, lenient());
    const auto outputs = read_jsonl<annotation::GeneratorOutputs>(generators);
    auto tasks = annotation::build_tasks(instances, outputs);
    for (auto& t : tasks) t.adjudicator = adjudicator;
    Sink sink(c.out_path, out);
    annotation::save_tasks(tasks, *sink);
    sink.close();
}

std::vector<annotation::AnnotationTask> read_tasks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return annotation::load_tasks(in);
}

void cmd_preannotate(const std::string& tasks_path, const std::vector<std::string>& provider_paths,
                     std::size_t shots, const Common& c, std::ostream& out) {
    if (provider_paths.size() != 2) throw InputError("preannotate needs exactly two --provider configs");
    auto tasks = read_tasks(tasks_path);
    auto a = providers::make_provider(providers::load_provider_config(provider_paths[0]));
    auto b = providers::make_provider(providers::load_provider_config(provider_paths[1]));
    annotation::PreannotateOptions opts;
    opts.shots = shots;
    annotation::preannotate(tasks, *a, *b, promptkit::PromptBank::builtin(), opts);
    Sink sink(c.out_path, out);
    annotation::save_tasks(tasks, *sink);
    sink.close();
}

void cmd_serve(const std::string& tasks_path, const std::string& store_dir, const std::string& host, int port,
               const std::string& static_dir, const std::optional<std::string>& adjudicator,
               const std::string& policy, std::ostream& out) {
    annotation::StoreOptions so;
    so.directory = store_dir;
    annotation::AnnotationStore store(so);
    if (!tasks_path.empty()) store.import_tasks(read_tasks(tasks_path));

    server::ServerOptions opts;
    opts.host = host;
    opts.port = port;
    opts.static_dir = static_dir;
    opts.export_options.adjudicator = adjudicator;
    opts.export_options.policy =
        policy == "majority" ? annotation::Adjudication::majority : annotation::Adjudication::designated;
    server::AnnotationServer srv(store, opts);
    const int bound = srv.start();
    out << Json{{"listening", host + ":" + std::to_string(bound)}}.dump() << std::endl;
    // Serve until the process is terminated.
    std::promise<void>().get_future().wait();
}

// --- run / evaluate / ablate ---------------------------------------------------

struct RunSettings {
    pipeline::Mode mode = pipeline::Mode::colls;
    pipeline::PipelineConfig config;
    std::size_t jobs = 1;
};

std::vector<pipeline::SimplificationOutcome> run_dataset(const std::vector<corpus::Instance>& instances,
                                                        providers::Provider& provider, const RunSettings& s) {
    const auto& bank = promptkit::PromptBank::builtin();
    std::optional<pipeline::CollsPipeline> colls;
    if (s.mode == pipeline::Mode::colls) colls.emplace(provider, bank, s.config);

    auto one = [&](const corpus::Instance& inst) {
        try {
            auto o = colls ? colls->run(inst.sentence)
                           : pipeline::simplify_single_prompt(inst.sentence, provider, bank, s.mode,
                                                              s.config.baseline_shots);
            o.id = inst.id;
            return o;
        } catch (const Error& e) {
            throw Error(e.kind(), "instance " + inst.id + ": " + e.what());
        }
    };

    std::vector<pipeline::SimplificationOutcome> out(instances.size());
    const std::size_t jobs = std::max<std::size_t>(1, s.jobs);
    for (std::size_t begin = 0; begin < instances.size(); begin += jobs) {
        const std::size_t end = std::min(instances.size(), begin + jobs);
        if (jobs == 1) {
            out[begin] = one(instances[begin]);
            continue;
        }
        std::vector<std::future<pipeline::SimplificationOutcome>> batch;
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, one, std::cref(instances[i])));
        }
        for (std::size_t i = begin; i < end; ++i) out[i] = batch[i - begin].get();
    }
    return out;
}

metrics::ReportRow score_run(const std::vector<corpus::Instance>& gold,
                             const std::vector<pipeline::SimplificationOutcome>& outcomes,
                             const metrics::MetricConfig& mc) {
    std::map<std::string, const corpus::Instance*> by_id;
    for (const auto& g : gold) by_id[g.id] = &g;
    std::vector<metrics::EvalCounts> counts;
    for (const auto& o : outcomes) {
        const auto it = by_id.find(o.id);
        if (it == by_id.end()) throw InputError("outcome '" + o.id + "' has no gold instance");
        counts.push_back(metrics::score_outcome(o, *it->second, mc));
    }
    return metrics::aggregate(counts, mc);
}

void cmd_run(const std::string& dataset, const std::string& provider_path, const RunSettings& s, const Common& c,
             std::ostream& out) {
    const auto instances = corpus::load_dataset_file(dataset, lenient());
    auto provider = providers::make_provider(providers::load_provider_config(provider_path));
    const auto outcomes = run_dataset(instances, *provider, s);
    Sink sink(c.out_path, out);
    for (const auto& o : outcomes) *sink << Json(o).dump() << '\n';
    sink.close();
}

void cmd_evaluate(const std::string& dataset, const std::vector<std::string>& outcome_paths,
                  const std::string& aggregation, int w_max, const Common& c, std::ostream& out) {
    const auto gold = corpus::load_dataset_file(dataset);
    metrics::EvalReport report;
    std::vector<metrics::Aggregation> modes;
    if (aggregation == "both") {
        modes = {metrics::Aggregation::micro, metrics::Aggregation::macro};
    } else {
        modes = {metrics::parse_aggregation(aggregation)};
    }
    for (const auto& path : outcome_paths) {
        const auto outcomes = read_jsonl<pipeline::SimplificationOutcome>(path);
        for (const auto mode : modes) {
            auto row = score_run(gold, outcomes, {w_max, mode});
            row.dataset = dataset_label(dataset);
            row.method = dataset_label(path);
            report.push_back(std::move(row));
        }
    }
    Sink sink(c.out_path, out);
    metrics::write_report(report, metrics::parse_format(c.format), *sink);
    sink.close();
}

struct AblationRow {
    std::string stage;
    std::size_t n = 0;
    std::size_t m = 0;
    metrics::ReportRow row;
};

void cmd_ablate(const std::string& dataset, const std::string& provider_path, const std::vector<std::string>& stages,
                std::size_t max_n, const RunSettings& base, const Common& c, std::ostream& out) {
    const auto gold = corpus::load_dataset_file(dataset);
    auto provider = providers::make_provider(providers::load_provider_config(provider_path));
    std::vector<AblationRow> rows;
    for (const auto& stage : stages) {
        const std::size_t first = stage == "validation" ? 0 : 1;
        for (std::size_t n = first; n <= max_n; ++n) {
            RunSettings s = base;
            s.mode = pipeline::Mode::colls;
            s.config.cwi_vote = {3, 2};
            s.config.sg_vote = {3, 2};
            s.config.val_vote = ensemble::VoteConfig{3, 2};
            const ensemble::VoteConfig vote{n, ceil_half(n)};
            if (stage == "cwi") {
                s.config.cwi_vote = vote;
            } else if (stage == "sg") {
                s.config.sg_vote = vote;
            } else if (n == 0) {
                s.config.val_vote.reset();
            } else {
                s.config.val_vote = vote;
            }
            auto row = score_run(gold, run_dataset(gold, *provider, s), {});
            row.dataset = dataset_label(dataset);
            row.method = "colls";
            rows.push_back({stage, n, ceil_half(n), std::move(row)});
        }
    }

    Sink sink(c.out_path, out);
    if (c.format == "json") {
        Json j = Json::array();
        for (const auto& r : rows) {
            j.push_back({{"stage", r.stage},
                         {"n", r.n},
                         {"m", r.m},
                         {"num_cw", r.row.num_cw},
                         {"correct_cw", r.row.correct_cw},
                         {"correct_simp", r.row.correct_simp},
                         {"f1", r.row.scores.f1},
                         {"f1_20", r.row.scores.f1_20}});
        }
        *sink << j.dump(2) << '\n';
    } else {
        const char* sep = c.format == "csv" ? "," : "\t";
        *sink << "stage" << sep << "N" << sep << "m" << sep << "NumCW" << sep << "CorrectCW" << sep << "CorrectSimp"
              << sep << "F1" << sep << "F1-20" << '\n';
        for (const auto& r : rows) {
            char f1[32];
            char f20[32];
            std::snprintf(f1, sizeof f1, "%.3f", r.row.scores.f1);
            std::snprintf(f20, sizeof f20, "%.3f", r.row.scores.f1_20);
            *sink << r.stage << sep << r.n << sep << r.m << sep << r.row.num_cw << sep << r.row.correct_cw << sep
                  << r.row.correct_simp << sep << f1 << sep << f20 << '\n';
        }
    }
    sink.close();
}

void cmd_report(const std::vector<std::string>& inputs, const Common& c, std::ostream& out) {
    metrics::EvalReport report;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        try {
            const auto j = Json::parse(in);
            for (const auto& row : j.is_array() ? j : Json::array({j})) report.push_back(row.get<metrics::ReportRow>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
    }
    Sink sink(c.out_path, out);
    metrics::write_report(report, metrics::parse_format(c.format), *sink);
    sink.close();
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << Json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lexical simplification toolkit"};
    app.name("lexsimp");
    app.require_subcommand(1);

    const std::vector<std::string> tabular{"table", "json", "csv"};
    Common common;
    std::optional<std::string> format;
    auto add_common = [&](CLI::App* sub, const std::vector<std::string>& formats) {
        sub->add_option("--format", format, "Output format (default " + formats.front() + ")")
            ->check(CLI::IsMember(formats));
        sub->add_option("--out", common.out_path, "Write output to this file");
    };

    std::vector<std::string> datasets;
    std::string dataset;
    std::string provider_path;
    std::vector<std::string> provider_paths;
    std::string mode = "colls";
    std::size_t n = 3;
    std::size_t m = 2;
    std::size_t shots = 4;
    std::optional<std::size_t> cap;
    std::size_t jobs = 1;
    std::optional<std::int64_t> seed;

    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("--dataset", datasets, "Dataset JSONL file(s)")->required()->check(CLI::ExistingFile);
    add_common(stats, tabular);

    std::string generators;
    std::optional<std::string> adjudicator;
    auto* candidates = app.add_subcommand("candidates", "Build annotation tasks from generator lists");
    candidates->add_option("--dataset", dataset, "Source instances")->required()->check(CLI::ExistingFile);
    candidates->add_option("--generators", generators, "JSONL with 3 lists per target")
        ->required()
        ->check(CLI::ExistingFile);
    candidates->add_option("--adjudicator", adjudicator, "Designated adjudicator for every task");
    add_common(candidates, {"json"});

    std::string tasks_path;
    std::size_t annotate_shots = 2;
    auto* preannotate = app.add_subcommand("preannotate", "Attach LLM recommendations to tasks");
    preannotate->add_option("--tasks", tasks_path, "Task JSONL")->required()->check(CLI::ExistingFile);
    preannotate->add_option("--provider", provider_paths, "Two provider configs (models A and B)")
        ->required()
        ->check(CLI::ExistingFile);
    preannotate->add_option("--shots", annotate_shots, "Demonstrations per prompt");
    add_common(preannotate, {"json"});

    std::string store_dir = "annotation-store";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    std::string policy = "designated";
    auto* serve = app.add_subcommand("serve", "Start the annotation service");
    serve->add_option("--tasks", tasks_path, "Task JSONL to import")->check(CLI::ExistingFile);
    serve->add_option("--store", store_dir, "State directory");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--static", static_dir, "UI bundle directory")->check(CLI::ExistingDirectory);
    serve->add_option("--adjudicator", adjudicator, "Default adjudicator");
    serve->add_option("--policy", policy, "Adjudication policy")->check(CLI::IsMember({"designated", "majority"}));
    add_common(serve, {"json"});

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--dataset", dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
        sub->add_option("--provider", provider_path, "Provider config JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--n", n, "Voters per stage");
        sub->add_option("--m", m, "Votes needed per stage");
        sub->add_option("--shots", shots, "Demonstrations for the one-step baselines");
        sub->add_option("--cap", cap, "Keep at most this many SG candidates");
        sub->add_option("--jobs", jobs, "Sentences processed concurrently")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Decoding seed forwarded to providers");
    };

    auto* run = app.add_subcommand("run", "Simplify every sentence of a dataset");
    add_run_flags(run);
    run->add_option("--mode", mode, "direct, cot or colls")->check(CLI::IsMember({"direct", "cot", "colls"}));
    add_common(run, {"json"});

    std::vector<std::string> outcome_paths;
    std::string aggregation = "micro";
    int w_max = 20;
    auto* evaluate = app.add_subcommand("evaluate", "Score outcomes against gold");
    evaluate->add_option("--dataset", dataset, "Gold dataset JSONL")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--outcomes", outcome_paths, "Outcome JSONL file(s) from `run`")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->add_option("--aggregation", aggregation, "micro, macro or both")
        ->check(CLI::IsMember({"micro", "macro", "both"}));
    evaluate->add_option("--w-max", w_max, "Annotators per word")->check(CLI::PositiveNumber);
    add_common(evaluate, tabular);

    std::vector<std::string> stages{"cwi", "sg", "validation"};
    std::size_t max_n = 6;
    auto* ablate = app.add_subcommand("ablate", "Sweep one stage's voter count with m = ceil(N/2)");
    add_run_flags(ablate);
    ablate->add_option("--stage", stages, "Stage(s) to sweep")->check(CLI::IsMember({"cwi", "sg", "validation"}));
    ablate->add_option("--max-n", max_n, "Largest N")->check(CLI::Range(1, 12));
    add_common(ablate, tabular);

    std::vector<std::string> report_inputs;
    auto* report = app.add_subcommand("report", "Re-render saved JSON reports");
    report->add_option("--in", report_inputs, "JSON report file(s)")->required()->check(CLI::ExistingFile);
    add_common(report, tabular);

    try {
        app.parse(argc, argv);
        if (*preannotate && provider_paths.size() != 2) {
            throw CLI::ValidationError("--provider", "preannotate needs exactly two provider configs");
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        auto* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << active->help();
        return 2;
    }

    try {
        const bool tabular_cmd = *stats || *evaluate || *ablate || *report;
        common.format = format.value_or(tabular_cmd ? "table" : "json");

        RunSettings settings;
        settings.mode = pipeline::parse_mode(mode);
        settings.config.cwi_vote = {n, m};
        settings.config.sg_vote = {n, m};
        settings.config.val_vote = ensemble::VoteConfig{n, m};
        settings.config.baseline_shots = shots;
        settings.config.candidate_cap = cap;
        settings.config.voter_decoding.seed = seed;
        settings.config.judge_decoding.seed = seed;
        settings.jobs = jobs;

        if (*stats) {
            cmd_stats(datasets, common, out);
        } else if (*candidates) {
            cmd_candidates(dataset, generators, adjudicator, common, out);
        } else if (*preannotate) {
            cmd_preannotate(tasks_path, provider_paths, annotate_shots, common, out);
        } else if (*serve) {
            cmd_serve(tasks_path, store_dir, host, port, static_dir, adjudicator, policy, out);
        } else if (*run) {
            settings.config.validate();
            cmd_run(dataset, provider_path, settings, common, out);
        } else if (*evaluate) {
            cmd_evaluate(dataset, outcome_paths, aggregation, w_max, common, out);
        } else if (*ablate) {
            cmd_ablate(dataset, provider_path, stages, max_n, settings, common, out);
        } else if (*report) {
            cmd_report(report_inputs, common, out);
        }
    } catch (const Error& e) {
        print_error(err, e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(err, "InternalError", e.what());
        return 1;
    }
    return 0;
}

} // namespace lexsimp::cli
