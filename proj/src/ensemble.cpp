#include "lexsimp/ensemble.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "lexsimp/errors.hpp"
#include "lexsimp/text.hpp"

namespace lexsimp::ensemble {

namespace {

struct Tally {
    std::string surface;
    std::string key;
    std::size_t lists = 0;       // number of lists containing it
    std::size_t best_index = 0;
    double score = 0.0;
};

/// One pass over all lists with within-list de-duplication.
std::vector<Tally> tally(std::span<const CandidateList> lists) {
    std::vector<Tally> out;
    std::unordered_map<std::string, std::size_t> slot;
    for (const auto& list : lists) {
        std::unordered_set<std::string> seen_here;
        std::size_t index = 0;
        for (const auto& raw : list) {
            auto key = text::normalize(raw);
            if (key.empty()) continue;
            if (!seen_here.insert(key).second) continue;
            auto [it, inserted] = slot.try_emplace(key, out.size());
            if (inserted) out.push_back({text::trim(raw), key, 0, index, 0.0});
            auto& t = out[it->second];
            ++t.lists;
            t.best_index = std::min(t.best_index, index);
            t.score += position_score(index);
            ++index;
        }
    }
    return out;
}

void check_arity(std::size_t got, const VoteConfig& config) {
    config.validate();
    if (got != config.n) {
        throw ArityError("expected " + std::to_string(config.n) + " voter outputs, got " + std::to_string(got));
    }
}

} // namespace

void VoteConfig::validate() const {
    if (m < 1 || m > n) {
        throw ConfigError("vote config requires 1 <= m <= n (got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
    }
}

double position_score(std::size_t index) { return std::max(0.0, 5.0 - 0.5 * static_cast<double>(index)); }

std::vector<ScoredCandidate> combine_score(std::span<const CandidateList> lists, std::size_t k) {
    auto tallies = tally(lists);
    std::sort(tallies.begin(), tallies.end(), [](const Tally& a, const Tally& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.best_index != b.best_index) return a.best_index < b.best_index;
        return a.key < b.key;
    });
    std::vector<ScoredCandidate> out;
    for (const auto& t : tallies) {
        if (out.size() >= k) break;
        out.push_back({t.surface, t.score});
    }
    return out;
}

std::vector<std::string> majority_elements(std::span<const CandidateList> sets, const VoteConfig& config) {
    check_arity(sets.size(), config);
    std::vector<std::string> out;
    for (const auto& t : tally(sets)) {
        if (t.lists >= config.m) out.push_back(t.surface);
    }
    return out;
}

RankedCandidates vote_rank(std::span<const CandidateList> lists, const VoteConfig& config) {
    check_arity(lists.size(), config);
    auto tallies = tally(lists);
    std::erase_if(tallies, [&](const Tally& t) { return t.lists < config.m; });
    std::sort(tallies.begin(), tallies.end(), [](const Tally& a, const Tally& b) {
        if (a.lists != b.lists) return a.lists > b.lists;
        if (a.best_index != b.best_index) return a.best_index < b.best_index;
        return a.key < b.key;
    });
    RankedCandidates out;
    out.reserve(tallies.size());
    for (const auto& t : tallies) out.push_back({t.surface, t.lists, t.best_index});
    return out;
}

void to_json(nlohmann::ordered_json& j, const RankedCandidate& c) {
    j = nlohmann::ordered_json{{"text", c.text}, {"votes", c.votes}, {"best_index", c.best_index}};
}

void from_json(const nlohmann::ordered_json& j, RankedCandidate& c) {
    c.text = j.at("text").get<std::string>();
    c.votes = j.at("votes").get<std::size_t>();
    c.best_index = j.value("best_index", std::size_t{0});
}

void to_json(nlohmann::ordered_json& j, const ScoredCandidate& c) {
    j = nlohmann::ordered_json{{"text", c.text}, {"score", c.score}};
}

} // namespace lexsimp::ensemble
