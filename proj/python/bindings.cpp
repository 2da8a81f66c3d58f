#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexsimp/cli.hpp"
#include "lexsimp/corpus.hpp"
#include "lexsimp/ensemble.hpp"
#include "lexsimp/errors.hpp"
#include "lexsimp/metrics.hpp"
#include "lexsimp/pipeline.hpp"
#include "lexsimp/promptkit.hpp"

namespace py = pybind11;
using namespace lexsimp;
using Json = nlohmann::ordered_json;

namespace {

ensemble::VoteConfig vote(std::size_t n, std::size_t m) { return {n, m}; }

py::dict edit_dict(const pipeline::Edit& e) {
    py::dict d;
    d["original_surface"] = e.original_surface;
    d["span"] = py::make_tuple(e.span.start, e.span.end);
    d["substitute"] = e.substitute;
    return d;
}

} // namespace

PYBIND11_MODULE(_lexsimp, m) {
    m.doc() = "Lexical simplification toolkit: voting, prompts, alignment, metrics and the CLI.";

    static py::exception<Error> error(m, "LexsimpError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
            exc.attr("kind") = e.kind();
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    m.def(
        "combine_score",
        [](const std::vector<ensemble::CandidateList>& lists, std::size_t k) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& c : ensemble::combine_score(lists, k)) out.emplace_back(c.text, c.score);
            return out;
        },
        py::arg("lists"), py::arg("k") = 12, "Positional fusion of candidate lists as (text, score) pairs.");

    m.def(
        "majority_elements",
        [](const std::vector<ensemble::CandidateList>& sets, std::size_t min_votes) {
            return ensemble::majority_elements(sets, vote(sets.size(), min_votes));
        },
        py::arg("sets"), py::arg("m"), "Elements present in at least m of the sets.");

    m.def(
        "vote_rank",
        [](const std::vector<ensemble::CandidateList>& lists, std::size_t min_votes) {
            std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
            for (const auto& c : ensemble::vote_rank(lists, vote(lists.size(), min_votes))) {
                out.emplace_back(c.text, c.votes, c.best_index);
            }
            return out;
        },
        py::arg("lists"), py::arg("m"), "Candidates in at least m lists as (text, votes, best_index).");

    m.def(
        "f1_scores",
        [](std::size_t gold_p, std::size_t pred_q, std::size_t correct_cw, std::size_t correct_simp,
           std::int64_t weight_sum, int w_max) {
            metrics::MetricConfig cfg;
            cfg.w_max = w_max;
            cfg.validate();
            const auto s = metrics::f1_scores({gold_p, pred_q, correct_cw, correct_simp, weight_sum}, cfg);
            py::dict d;
            d["precision"] = s.precision;
            d["recall"] = s.recall;
            d["f1"] = s.f1;
            d["precision_w"] = s.precision_w;
            d["recall_w"] = s.recall_w;
            d["f1_20"] = s.f1_20;
            return d;
        },
        py::arg("gold_p"), py::arg("pred_q"), py::arg("correct_cw"), py::arg("correct_simp"), py::arg("weight_sum"),
        py::arg("w_max") = 20);

    m.def("parse_word_list", &promptkit::parse_word_list, py::arg("response"));
    m.def("parse_yes_no", &promptkit::parse_yes_no, py::arg("response"));
    m.def(
        "mark_target",
        [](const std::string& sentence, std::size_t start, std::size_t end) {
            return promptkit::mark_target(sentence, {start, end});
        },
        py::arg("sentence"), py::arg("start"), py::arg("end"));

    m.def(
        "render_prompt",
        [](const std::string& role, const promptkit::Slots& slots, std::size_t k, std::size_t rotation) {
            const auto p = promptkit::render(promptkit::PromptBank::builtin(), promptkit::parse_role(role), slots, k, rotation);
            py::dict d;
            d["system_text"] = p.system_text;
            d["user_text"] = p.user_text;
            d["fingerprint"] = p.fingerprint;
            return d;
        },
        py::arg("role"), py::arg("slots"), py::arg("k") = 0, py::arg("rotation") = 0,
        "Render a role from the built-in prompt bank.");

    m.def(
        "align_edits",
        [](const std::string& original, const std::string& simplified) {
            const auto a = pipeline::align_edits(original, simplified);
            py::list edits;
            for (const auto& e : a.edits) edits.append(edit_dict(e));
            return py::make_tuple(edits, a.diagnostics);
        },
        py::arg("original"), py::arg("simplified"), "Token alignment as (edits, diagnostics).");

    m.def(
        "dataset_stats",
        [](const std::string& path) {
            const auto s = corpus::compute_stats(corpus::load_dataset_file(path));
            return Json(s).dump();
        },
        py::arg("path"), "Dataset statistics as a JSON string.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> full{"lexsimp"};
            full.insert(full.end(), args.begin(), args.end());
            std::vector<const char*> argv;
            for (const auto& a : full) argv.push_back(a.c_str());
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a CLI subcommand; returns (exit_code, stdout, stderr).");
}
