#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

// Candidate-list fusion and majority voting. Candidates are compared after
// trimming and case folding; the surface form of the first occurrence is
// kept. Lists are de-duplicated (first occurrence wins) and blank entries
// dropped before positions are counted.
namespace lexsimp::ensemble {

using CandidateList = std::vector<std::string>;

struct ScoredCandidate {
    std::string text;
    double score = 0.0;

    friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

/// N voters, item accepted when at least m of them agree.
struct VoteConfig {
    std::size_t n = 3;
    std::size_t m = 2;

    /// Throws ConfigError unless 1 <= m <= n.
    void validate() const;
    friend bool operator==(const VoteConfig&, const VoteConfig&) = default;
};

struct RankedCandidate {
    std::string text;
    std::size_t votes = 0;
    /// Lowest position of the candidate across the lists that contain it.
    std::size_t best_index = 0;

    friend bool operator==(const RankedCandidate&, const RankedCandidate&) = default;
};

using RankedCandidates = std::vector<RankedCandidate>;

/// Positional score of a candidate in one generator list: 5 - 0.5 * index,
/// floored at zero for index > 10.
double position_score(std::size_t index);

/// Sums position scores across lists and keeps the best `k`, ordered by
/// score, then best index, then normalized text. Candidates absent from
/// every list never appear.
std::vector<ScoredCandidate> combine_score(std::span<const CandidateList> lists, std::size_t k = 12);

/// Elements occurring in at least `config.m` of the sets, in order of first
/// appearance. Throws ArityError when |sets| != config.n.
std::vector<std::string> majority_elements(std::span<const CandidateList> sets, const VoteConfig& config);

/// Candidates present in at least `config.m` lists, ordered by vote count,
/// then best index, then normalized text.
RankedCandidates vote_rank(std::span<const CandidateList> lists, const VoteConfig& config);

void to_json(nlohmann::ordered_json& j, const RankedCandidate& c);
void from_json(const nlohmann::ordered_json& j, RankedCandidate& c);
void to_json(nlohmann::ordered_json& j, const ScoredCandidate& c);

} // namespace lexsimp::ensemble
