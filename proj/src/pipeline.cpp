#include "lexsimp/pipeline.hpp"

#include <algorithm>

#include "lexsimp/errors.hpp"

namespace lexsimp::pipeline {

using Json = nlohmann::ordered_json;
using promptkit::PromptRole;
using providers::ChatRequest;
using providers::ChatResponse;
using providers::SlotError;
using providers::SlotResult;

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::direct: return "direct";
    case Mode::cot: return "cot";
    case Mode::colls: return "colls";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    if (s == "direct") return Mode::direct;
    if (s == "cot") return Mode::cot;
    if (s == "colls") return Mode::colls;
    throw InputError("unknown mode '" + std::string(s) + "' (expected direct, cot or colls)");
}

void PipelineConfig::validate() const {
    cwi_vote.validate();
    sg_vote.validate();
    if (val_vote) val_vote->validate();
    if (demo_counts.empty()) throw ConfigError("demo_counts must not be empty");
}

VoterVariant voter_variant(const PipelineConfig& config, std::size_t voter, std::size_t available) {
    const auto& counts = config.demo_counts;
    VoterVariant v;
    if (voter < counts.size()) {
        v.demos = counts[voter];
    } else {
        const std::size_t extra = voter - counts.size() + 1;
        v.demos = counts.back() + 2 * extra;
        v.rotation = extra;
    }
    v.demos = std::min(v.demos, available);
    return v;
}

std::string apply_edits(std::string_view original, const std::vector<Edit>& edits) {
    std::vector<const Edit*> order;
    for (const auto& e : edits) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const Edit* a, const Edit* b) { return a->span.start > b->span.start; });
    std::string out(original);
    for (const auto* e : order) out = text::replace_chars(out, e->span, e->substitute);
    return out;
}

std::string extract_final_sentence(std::string_view response) {
    constexpr std::string_view kMarker = "ANSWER:";
    auto first_line = [](std::string_view s) -> std::string {
        std::size_t start = 0;
        while (start <= s.size()) {
            auto end = s.find('\n', start);
            if (end == std::string_view::npos) end = s.size();
            auto line = text::trim(s.substr(start, end - start));
            if (!line.empty()) return line;
            start = end + 1;
        }
        return {};
    };

    std::string result;
    if (const auto pos = response.rfind(kMarker); pos != std::string_view::npos) {
        result = first_line(response.substr(pos + kMarker.size()));
    } else {
        std::size_t end = response.size();
        while (result.empty()) {
            const auto nl = end == 0 ? std::string_view::npos : response.rfind('\n', end - 1);
            const std::size_t start = nl == std::string_view::npos ? 0 : nl + 1;
            result = text::trim(response.substr(start, end - start));
            if (nl == std::string_view::npos) break;
            end = nl;
        }
    }
    if (result.empty()) throw EmptyOutputError("provider returned no simplified sentence");
    return result;
}

SimplificationOutcome simplify_single_prompt(std::string_view sentence, providers::Provider& provider,
                                             const promptkit::PromptBank& bank, Mode mode, std::size_t shots) {
    if (mode == Mode::colls) throw InputError("simplify_single_prompt handles direct and cot only");
    const auto role = mode == Mode::direct ? PromptRole::OneStepDirect : PromptRole::OneStepCot;
    auto prompt = promptkit::render(bank, role, {{"Input_sentence", std::string(sentence)}}, shots);
    const auto response = provider.complete({std::move(prompt), providers::ensemble_decoding()});

    SimplificationOutcome out;
    out.mode = mode;
    out.original = std::string(sentence);
    out.simplified = extract_final_sentence(response.text);
    auto alignment = align_edits(out.original, out.simplified);
    out.edits = std::move(alignment.edits);
    out.diagnostics = std::move(alignment.diagnostics);
    return out;
}

// --- CoLLS ---------------------------------------------------------------------

CollsPipeline::CollsPipeline(providers::Provider& provider, const promptkit::PromptBank& bank, PipelineConfig config)
    : provider_(provider), bank_(bank), config_(std::move(config)) {
    config_.validate();
}

std::vector<SlotResult> CollsPipeline::ask_voters(const char* stage, PromptRole role, const promptkit::Slots& slots,
                                                  std::optional<Span> target, std::size_t n,
                                                  const providers::Decoding& decoding) const {
    const auto available = bank_.demo_count(role);
    std::vector<ChatRequest> requests;
    requests.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto variant = voter_variant(config_, i, available);
        auto dec = decoding;
        if (dec.seed) *dec.seed += static_cast<std::int64_t>(i);
        requests.push_back({promptkit::render(bank_, role, slots, variant.demos, variant.rotation, target), dec});
    }
    auto results = provider_.complete_many(requests);
    const bool any_ok = std::any_of(results.begin(), results.end(),
                                    [](const SlotResult& r) { return std::holds_alternative<ChatResponse>(r); });
    if (!any_ok && n > 0) {
        const auto& first = std::get<SlotError>(results.front());
        throw StageError(stage, "all " + std::to_string(n) + " voter calls failed (" + first.kind + ": " +
                                    first.message + ")");
    }
    return results;
}

std::vector<CwiWord> CollsPipeline::identify(std::string_view sentence) const {
    const auto& vote = config_.cwi_vote;
    const auto results = ask_voters("cwi", PromptRole::Cwi, {{"sentence", std::string(sentence)}}, std::nullopt,
                                    vote.n, config_.voter_decoding);
    std::vector<ensemble::CandidateList> sets;
    for (const auto& r : results) {
        ensemble::CandidateList kept;
        if (const auto* resp = std::get_if<ChatResponse>(&r)) {
            for (auto& word : promptkit::parse_word_list(resp->text)) {
                if (text::is_single_word(word) && !text::find_word(sentence, word).empty()) {
                    kept.push_back(std::move(word));
                }
            }
        }
        sets.push_back(std::move(kept));
    }

    std::vector<CwiWord> out;
    for (auto& word : ensemble::majority_elements(sets, vote)) {
        const auto key = text::normalize(word);
        std::size_t votes = 0;
        for (const auto& set : sets) {
            votes += std::any_of(set.begin(), set.end(), [&](const auto& w) { return text::normalize(w) == key; });
        }
        out.push_back({std::move(word), votes});
    }
    return out;
}

RankedCandidates CollsPipeline::generate(std::string_view sentence, Span target) const {
    const auto& vote = config_.sg_vote;
    const auto target_text = text::substr_chars(sentence, target);
    const auto results = ask_voters("sg", PromptRole::Sg,
                                    {{"sentence", std::string(sentence)}, {"target", target_text}}, target, vote.n,
                                    config_.voter_decoding);
    const auto target_key = text::normalize(target_text);
    std::vector<ensemble::CandidateList> lists;
    for (const auto& r : results) {
        ensemble::CandidateList kept;
        if (const auto* resp = std::get_if<ChatResponse>(&r)) {
            for (auto& cand : promptkit::parse_word_list(resp->text)) {
                if (text::normalize(cand) != target_key) kept.push_back(std::move(cand));
            }
        }
        lists.push_back(std::move(kept));
    }
    auto ranked = ensemble::vote_rank(lists, vote);
    if (config_.candidate_cap && ranked.size() > *config_.candidate_cap) ranked.resize(*config_.candidate_cap);
    return ranked;
}

ValidationResult CollsPipeline::validate(std::string_view sentence, Span target,
                                         const RankedCandidates& candidates) const {
    ValidationResult out;
    if (!config_.val_vote) {
        if (!candidates.empty()) out.chosen = candidates.front().text;
        return out;
    }
    const auto& vote = *config_.val_vote;
    const auto original_word = text::substr_chars(sentence, target);
    std::optional<std::size_t> best;
    for (const auto& cand : candidates) {
        const auto updated = text::replace_chars(sentence, target, text::match_leading_case(original_word, cand.text));
        const auto results = ask_voters("validation", PromptRole::Validate,
                                        {{"sentence1", std::string(sentence)}, {"sentence2", updated}}, std::nullopt,
                                        vote.n, config_.judge_decoding);
        ValidationTally tally{cand.text, 0, 0};
        for (const auto& r : results) {
            const auto* resp = std::get_if<ChatResponse>(&r);
            if (resp == nullptr) {
                ++tally.abstained;
                continue;
            }
            try {
                if (promptkit::parse_yes_no(resp->text)) ++tally.yes;
            } catch (const ParseError&) {
                ++tally.abstained;
            }
        }
        // Strict comparison keeps the higher SG rank on ties.
        if (tally.yes >= vote.m && (!best || tally.yes > out.tallies[*best].yes)) best = out.tallies.size();
        out.tallies.push_back(std::move(tally));
    }
    if (best) out.chosen = out.tallies[*best].substitute;
    return out;
}

SimplificationOutcome CollsPipeline::run(std::string_view sentence) const {
    SimplificationOutcome out;
    out.mode = Mode::colls;
    out.original = std::string(sentence);

    struct Target {
        Span span;
        std::size_t votes;
    };
    std::vector<Target> targets;
    for (const auto& word : identify(sentence)) {
        for (const auto& span : text::find_word(sentence, word.surface)) targets.push_back({span, word.votes});
    }
    std::sort(targets.begin(), targets.end(), [](const Target& a, const Target& b) { return a.span.start < b.span.start; });

    for (const auto& target : targets) {
        const auto surface = text::substr_chars(sentence, target.span);
        StageTrace trace;
        trace.cwi_votes = target.votes;
        trace.sg = generate(sentence, target.span);
        auto verdict = validate(sentence, target.span, trace.sg);
        trace.validation_yes = std::move(verdict.tallies);
        if (verdict.chosen) {
            out.edits.push_back({surface, target.span, text::match_leading_case(surface, *verdict.chosen), std::move(trace)});
        } else {
            out.abandoned.push_back({surface, target.span, std::move(trace)});
        }
    }
    out.simplified = apply_edits(out.original, out.edits);
    return out;
}

// --- JSON ------------------------------------------------------------------------

void to_json(Json& j, const StageTrace& t) {
    j = Json::object();
    j["cwi_votes"] = t.cwi_votes;
    j["sg"] = t.sg;
    Json yes = Json::object();
    for (const auto& v : t.validation_yes) yes[v.substitute] = v.yes;
    j["validation_yes"] = std::move(yes);
    Json abstained = Json::object();
    for (const auto& v : t.validation_yes) {
        if (v.abstained > 0) abstained[v.substitute] = v.abstained;
    }
    if (!abstained.empty()) j["validation_abstained"] = std::move(abstained);
}

void from_json(const Json& j, StageTrace& t) {
    t.cwi_votes = j.value("cwi_votes", std::size_t{0});
    t.sg = j.value("sg", RankedCandidates{});
    t.validation_yes.clear();
    const auto abstained = j.value("validation_abstained", Json::object());
    const auto yes = j.value("validation_yes", Json::object());
    for (const auto& [sub, count] : yes.items()) {
        t.validation_yes.push_back({sub, count.get<std::size_t>(), abstained.value(sub, std::size_t{0})});
    }
}

void to_json(Json& j, const Edit& e) {
    j = Json::object();
    j["original_surface"] = e.original_surface;
    j["span"] = Json::array({e.span.start, e.span.end});
    j["substitute"] = e.substitute;
    if (e.stage_trace) j["stage_trace"] = *e.stage_trace;
}

void from_json(const Json& j, Edit& e) {
    e.original_surface = j.at("original_surface").get<std::string>();
    const auto& span = j.at("span");
    e.span = {span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()};
    e.substitute = j.at("substitute").get<std::string>();
    e.stage_trace = j.contains("stage_trace") ? std::optional(j.at("stage_trace").get<StageTrace>()) : std::nullopt;
}

void to_json(Json& j, const SimplificationOutcome& o) {
    j = Json::object();
    j["id"] = o.id;
    j["mode"] = to_string(o.mode);
    j["original"] = o.original;
    j["simplified"] = o.simplified;
    j["edits"] = o.edits;
    Json abandoned = Json::array();
    for (const auto& a : o.abandoned) {
        abandoned.push_back({{"surface", a.surface}, {"span", Json::array({a.span.start, a.span.end})}, {"stage_trace", a.trace}});
    }
    j["abandoned"] = std::move(abandoned);
    j["diagnostics"] = o.diagnostics;
}

void from_json(const Json& j, SimplificationOutcome& o) {
    o.id = j.value("id", std::string());
    o.mode = parse_mode(j.value("mode", std::string("direct")));
    o.original = j.at("original").get<std::string>();
    o.simplified = j.at("simplified").get<std::string>();
    o.edits = j.value("edits", std::vector<Edit>{});
    o.abandoned.clear();
    for (const auto& a : j.value("abandoned", Json::array())) {
        const auto& span = a.at("span");
        o.abandoned.push_back({a.at("surface").get<std::string>(),
                               {span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()},
                               a.value("stage_trace", Json::object()).get<StageTrace>()});
    }
    o.diagnostics = j.value("diagnostics", std::vector<std::string>{});
}

} // namespace lexsimp::pipeline
