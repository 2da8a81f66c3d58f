#include "lexsimp/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "lexsimp/errors.hpp"

namespace lexsimp::corpus {

using Json = nlohmann::ordered_json;

std::string_view to_string(Genre g) {
    switch (g) {
    case Genre::news: return "news";
    case Genre::wikinews: return "wikinews";
    case Genre::wikipedia: return "wikipedia";
    case Genre::other: return "other";
    }
    return "other";
}

Genre parse_genre(std::string_view s) {
    if (s == "news") return Genre::news;
    if (s == "wikinews") return Genre::wikinews;
    if (s == "wikipedia") return Genre::wikipedia;
    if (s == "other") return Genre::other;
    throw ParseError("unknown genre '" + std::string(s) + "'");
}

void validate(const Instance& inst, const CorpusOptions& options) {
    const std::string subject = inst.id.empty() ? "<no id>" : inst.id;
    if (inst.id.empty()) throw ValidationError(subject, "id", "must be non-empty");
    if (inst.sentence.empty()) throw ValidationError(subject, "sentence", "must be non-empty");

    const auto sentence = text::decode(inst.sentence);
    for (std::size_t i = 0; i < inst.complex_words.size(); ++i) {
        const auto& w = inst.complex_words[i];
        const std::string field = "complex_words[" + std::to_string(i) + "]";
        if (w.span.start >= w.span.end || w.span.end > sentence.size()) {
            throw ValidationError(subject, field + ".span", "out of range");
        }
        const auto covered = text::encode(std::u32string_view(sentence).substr(w.span.start, w.span.length()));
        if (covered != w.surface) {
            throw ValidationError(subject, field + ".span",
                                  "covers '" + covered + "' but surface is '" + w.surface + "'");
        }
        if (w.weight < 1 || w.weight > options.w_max) {
            throw ValidationError(subject, field + ".weight",
                                  "must be in [1, " + std::to_string(options.w_max) + "]");
        }
        if (options.require_substitutes && w.substitutes.empty()) {
            throw ValidationError(subject, field + ".substitutes", "must be non-empty");
        }
        const auto surface_key = text::normalize(w.surface);
        std::set<std::string> seen;
        for (const auto& sub : w.substitutes) {
            const auto key = text::normalize(sub);
            if (key.empty()) throw ValidationError(subject, field + ".substitutes", "empty substitute");
            if (key == surface_key) {
                throw ValidationError(subject, field + ".substitutes", "'" + sub + "' equals the surface");
            }
            if (!seen.insert(key).second) {
                throw ValidationError(subject, field + ".substitutes", "duplicate '" + sub + "'");
            }
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (inst.complex_words[j].span.overlaps(w.span)) {
                throw ValidationError(subject, field + ".span",
                                      "overlaps complex_words[" + std::to_string(j) + "]");
            }
        }
    }
}

void to_json(Json& j, const GoldComplexWord& w) {
    j = Json::object();
    j["surface"] = w.surface;
    j["span"] = Json::array({w.span.start, w.span.end});
    j["weight"] = w.weight;
    j["substitutes"] = w.substitutes;
}

void from_json(const Json& j, GoldComplexWord& w) {
    w.surface = j.at("surface").get<std::string>();
    const auto& span = j.at("span");
    if (!span.is_array() || span.size() != 2) throw ParseError("span must be [start, end]");
    w.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    w.weight = j.at("weight").get<int>();
    w.substitutes = j.value("substitutes", std::vector<std::string>{});
}

void to_json(Json& j, const Instance& inst) {
    j = Json::object();
    j["id"] = inst.id;
    j["genre"] = to_string(inst.genre);
    j["sentence"] = inst.sentence;
    j["complex_words"] = inst.complex_words;
}

void from_json(const Json& j, Instance& inst) {
    inst.id = j.at("id").get<std::string>();
    inst.genre = parse_genre(j.value("genre", std::string("other")));
    inst.sentence = j.at("sentence").get<std::string>();
    inst.complex_words = j.value("complex_words", std::vector<GoldComplexWord>{});
}

std::vector<Instance> load_dataset(std::istream& source, const CorpusOptions& options) {
    std::vector<Instance> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(source, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        Instance inst;
        try {
            inst = Json::parse(line).get<Instance>();
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), lineno);
        }
        validate(inst, options);
        if (!ids.insert(inst.id).second) throw ValidationError(inst.id, "id", "duplicate id");
        out.push_back(std::move(inst));
    }
    if (source.bad()) throw IoError("read failure after line " + std::to_string(lineno));
    return out;
}

std::vector<Instance> load_dataset_file(const std::string& path, const CorpusOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path + "'");
    return load_dataset(in, options);
}

std::string to_json_line(const Instance& instance) { return Json(instance).dump(); }

void save_dataset(std::span<const Instance> instances, std::ostream& sink) {
    for (const auto& inst : instances) sink << to_json_line(inst) << '\n';
    sink.flush();
    if (!sink) throw IoError("write failure while saving dataset");
}

void save_dataset_file(std::span<const Instance> instances, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    save_dataset(instances, out);
}

double DatasetStats::avg_subs() const {
    return num_complex_words == 0 ? 0.0
                                  : static_cast<double>(total_substitutes) / static_cast<double>(num_complex_words);
}

std::string DatasetStats::avg_display() const {
    if (num_complex_words == 0) return "0.0";
    const std::size_t tenths = (20 * total_substitutes + num_complex_words) / (2 * num_complex_words);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

DatasetStats compute_stats(std::span<const Instance> instances) {
    DatasetStats s;
    s.num_instances = instances.size();
    for (const auto& inst : instances) {
        for (const auto& w : inst.complex_words) {
            const auto n = w.substitutes.size();
            ++s.num_complex_words;
            s.total_substitutes += n;
            s.min_subs = s.min_subs ? std::min(*s.min_subs, n) : n;
            s.max_subs = s.max_subs ? std::max(*s.max_subs, n) : n;
        }
    }
    return s;
}

void to_json(Json& j, const DatasetStats& s) {
    j = Json::object();
    j["NOI"] = s.num_instances;
    j["NOC"] = s.num_complex_words;
    j["min"] = s.min_subs ? Json(*s.min_subs) : Json(nullptr);
    j["max"] = s.max_subs ? Json(*s.max_subs) : Json(nullptr);
    j["avg"] = s.avg_display();
    j["avg_exact"] = s.avg_subs();
}

} // namespace lexsimp::corpus
