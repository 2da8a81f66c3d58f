#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexsimp/text.hpp"

namespace lexsimp::corpus {

using text::Span;

enum class Genre { news, wikinews, wikipedia, other };

std::string_view to_string(Genre g);
Genre parse_genre(std::string_view s);  // throws ParseError

/// One complex word of a sentence together with its accepted substitutes,
/// best first. `weight` is the number of annotators who marked the word.
struct GoldComplexWord {
    std::string surface;
    Span span;
    int weight = 1;
    std::vector<std::string> substitutes;

    friend bool operator==(const GoldComplexWord&, const GoldComplexWord&) = default;
};

struct Instance {
    std::string id;
    Genre genre = Genre::other;
    std::string sentence;
    std::vector<GoldComplexWord> complex_words;

    friend bool operator==(const Instance&, const Instance&) = default;
};

struct CorpusOptions {
    int w_max = 20;
    /// Source data for annotation carries complex words without substitutes.
    bool require_substitutes = true;
};

/// Throws ValidationError naming the instance id and the offending field.
void validate(const Instance& instance, const CorpusOptions& options = {});

/// Reads newline-delimited JSON. Blank lines are skipped; line numbers in
/// errors count every physical line.
std::vector<Instance> load_dataset(std::istream& source, const CorpusOptions& options = {});
std::vector<Instance> load_dataset_file(const std::string& path, const CorpusOptions& options = {});

void save_dataset(std::span<const Instance> instances, std::ostream& sink);
void save_dataset_file(std::span<const Instance> instances, const std::string& path);

/// Single JSONL record with keys in canonical order.
std::string to_json_line(const Instance& instance);

struct DatasetStats {
    std::size_t num_instances = 0;
    std::size_t num_complex_words = 0;
    std::size_t total_substitutes = 0;
    std::optional<std::size_t> min_subs;  // absent when there are no complex words
    std::optional<std::size_t> max_subs;

    /// total_substitutes / num_complex_words, 0 when empty.
    double avg_subs() const;
    /// Average rounded half-up to one decimal, as displayed.
    std::string avg_display() const;
};

DatasetStats compute_stats(std::span<const Instance> instances);

void to_json(nlohmann::ordered_json& j, const GoldComplexWord& w);
void from_json(const nlohmann::ordered_json& j, GoldComplexWord& w);
void to_json(nlohmann::ordered_json& j, const Instance& inst);
void from_json(const nlohmann::ordered_json& j, Instance& inst);
void to_json(nlohmann::ordered_json& j, const DatasetStats& s);

} // namespace lexsimp::corpus
