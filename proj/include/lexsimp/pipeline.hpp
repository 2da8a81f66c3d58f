#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexsimp/ensemble.hpp"
#include "lexsimp/promptkit.hpp"
#include "lexsimp/providers.hpp"
#include "lexsimp/text.hpp"

namespace lexsimp::pipeline {

using ensemble::RankedCandidates;
using ensemble::VoteConfig;
using text::Span;

struct ValidationTally {
    std::string substitute;
    std::size_t yes = 0;
    std::size_t abstained = 0;

    friend bool operator==(const ValidationTally&, const ValidationTally&) = default;
};

/// What each CoLLS stage decided for one target occurrence.
struct StageTrace {
    std::size_t cwi_votes = 0;
    RankedCandidates sg;
    /// In SG order; empty when validation was skipped.
    std::vector<ValidationTally> validation_yes;

    friend bool operator==(const StageTrace&, const StageTrace&) = default;
};

struct Edit {
    std::string original_surface;
    Span span;
    std::string substitute;
    std::optional<StageTrace> stage_trace;

    friend bool operator==(const Edit&, const Edit&) = default;
};

enum class Mode { direct, cot, colls };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view s);  // throws InputError

struct AbandonedWord {
    std::string surface;
    Span span;
    StageTrace trace;

    friend bool operator==(const AbandonedWord&, const AbandonedWord&) = default;
};

struct SimplificationOutcome {
    std::string id;
    Mode mode = Mode::direct;
    std::string original;
    std::string simplified;
    std::vector<Edit> edits;
    std::vector<AbandonedWord> abandoned;
    /// Non-empty when alignment had to guess; never fatal.
    std::vector<std::string> diagnostics;

    friend bool operator==(const SimplificationOutcome&, const SimplificationOutcome&) = default;
};

struct PipelineConfig {
    VoteConfig cwi_vote{3, 2};
    VoteConfig sg_vote{3, 2};
    /// nullopt skips validation and takes the top SG candidate.
    std::optional<VoteConfig> val_vote = VoteConfig{3, 2};
    /// Demonstrations shown to voter i; voters past the end continue
    /// with +2 steps and a rotated demo order.
    std::vector<std::size_t> demo_counts{2, 4, 6};
    std::optional<std::size_t> candidate_cap;
    std::size_t baseline_shots = 4;
    providers::Decoding voter_decoding = providers::ensemble_decoding();
    providers::Decoding judge_decoding = providers::judgement_decoding();

    void validate() const;
};

struct VoterVariant {
    std::size_t demos = 0;
    std::size_t rotation = 0;
};

/// Prompt variant for voter `voter` given `available` bank demonstrations.
VoterVariant voter_variant(const PipelineConfig& config, std::size_t voter, std::size_t available);

struct Alignment {
    std::vector<Edit> edits;
    std::vector<std::string> diagnostics;

    bool flagged() const { return !diagnostics.empty(); }
};

/// Token-level LCS alignment of a free-text simplification against its
/// source. One-token regions become direct pairs, equal-length regions pair
/// positionally, a single source token replaced by several becomes one
/// phrase edit; every other region yields one flagged edit keyed on its
/// first source token.
Alignment align_edits(std::string_view original, std::string_view simplified);

/// Text after the last "ANSWER:" marker (first non-empty line of it), else
/// the last non-empty line. Empty result -> EmptyOutputError.
std::string extract_final_sentence(std::string_view response);

/// One-step baseline: a single prompt (direct or chain-of-thought).
SimplificationOutcome simplify_single_prompt(std::string_view sentence, providers::Provider& provider,
                                             const promptkit::PromptBank& bank, Mode mode, std::size_t shots);

struct CwiWord {
    std::string surface;
    std::size_t votes = 0;
};

struct ValidationResult {
    std::optional<std::string> chosen;  // nullopt: abandon the word
    std::vector<ValidationTally> tallies;
};

/// Multi-voter complex word identification, substitute generation and
/// sentence-level validation.
class CollsPipeline {
public:
    CollsPipeline(providers::Provider& provider, const promptkit::PromptBank& bank, PipelineConfig config);

    std::vector<CwiWord> identify(std::string_view sentence) const;
    RankedCandidates generate(std::string_view sentence, Span target) const;
    ValidationResult validate(std::string_view sentence, Span target, const RankedCandidates& candidates) const;
    SimplificationOutcome run(std::string_view sentence) const;

    const PipelineConfig& config() const { return config_; }

private:
    /// n voter calls for one stage; throws StageError when every call fails.
    std::vector<providers::SlotResult> ask_voters(const char* stage, promptkit::PromptRole role,
                                                  const promptkit::Slots& slots, std::optional<Span> target,
                                                  std::size_t n, const providers::Decoding& decoding) const;

    providers::Provider& provider_;
    const promptkit::PromptBank& bank_;
    PipelineConfig config_;
};

/// Applies non-overlapping edits (any order) to `original`.
std::string apply_edits(std::string_view original, const std::vector<Edit>& edits);

void to_json(nlohmann::ordered_json& j, const StageTrace& t);
void from_json(const nlohmann::ordered_json& j, StageTrace& t);
void to_json(nlohmann::ordered_json& j, const Edit& e);
void from_json(const nlohmann::ordered_json& j, Edit& e);
void to_json(nlohmann::ordered_json& j, const SimplificationOutcome& o);
void from_json(const nlohmann::ordered_json& j, SimplificationOutcome& o);

} // namespace lexsimp::pipeline
