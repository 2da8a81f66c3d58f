#include "lexsimp/promptkit.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "lexsimp/errors.hpp"
#include "prompt_bank_data.hpp"

namespace lexsimp::promptkit {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kExamplesToken = "[(examples)]";
constexpr std::string_view kOpenMark = "<<";
constexpr std::string_view kCloseMark = ">>";

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

/// Length of a `[name]` placeholder starting at `pos`, or 0.
std::size_t placeholder_at(std::string_view s, std::size_t pos) {
    if (s[pos] != '[' || pos + 2 >= s.size() || !is_name_start(s[pos + 1])) return 0;
    std::size_t i = pos + 2;
    while (i < s.size() && is_name_char(s[i])) ++i;
    return (i < s.size() && s[i] == ']') ? i - pos + 1 : 0;
}

std::string substitute(std::string_view tmpl, const Slots& slots, std::string_view what) {
    std::string out;
    out.reserve(tmpl.size() * 2);
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (const auto len = placeholder_at(tmpl, i); len > 0) {
            const std::string name(tmpl.substr(i + 1, len - 2));
            const auto it = slots.find(name);
            if (it == slots.end()) {
                throw TemplateError("missing placeholder [" + name + "] in " + std::string(what));
            }
            out += it->second;
            i += len;
        } else {
            out.push_back(tmpl[i++]);
        }
    }
    return out;
}

std::string with_examples(std::string_view tmpl, const std::string& block) {
    const auto pos = tmpl.find(kExamplesToken);
    if (pos == std::string_view::npos) return std::string(tmpl);
    std::string out(tmpl.substr(0, pos));
    auto rest = tmpl.substr(pos + kExamplesToken.size());
    if (block.empty()) {
        if (!rest.empty() && rest.front() == '\n') rest.remove_prefix(1);
    } else {
        out += block;
    }
    out += rest;
    return out;
}

} // namespace

std::string_view to_string(PromptRole role) {
    switch (role) {
    case PromptRole::OneStepDirect: return "OneStepDirect";
    case PromptRole::OneStepCot: return "OneStepCot";
    case PromptRole::Cwi: return "Cwi";
    case PromptRole::Sg: return "Sg";
    case PromptRole::Validate: return "Validate";
    case PromptRole::AnnotateDirect: return "AnnotateDirect";
    case PromptRole::AnnotateCot: return "AnnotateCot";
    }
    return "?";
}

PromptRole parse_role(std::string_view s) {
    for (auto role : kAllRoles) {
        if (to_string(role) == s) return role;
    }
    throw TemplateError("unknown prompt role '" + std::string(s) + "'");
}

std::vector<std::string> placeholders(std::string_view template_text) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < template_text.size(); ++i) {
        if (const auto len = placeholder_at(template_text, i); len > 0) {
            std::string name(template_text.substr(i + 1, len - 2));
            if (seen.insert(name).second) names.push_back(std::move(name));
            i += len - 1;
        }
    }
    return names;
}

bool requires_marking(PromptRole role) {
    return role == PromptRole::Sg || role == PromptRole::AnnotateDirect || role == PromptRole::AnnotateCot;
}

std::string fingerprint(std::string_view system_text, std::string_view user_text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    mix(system_text);
    mix(std::string_view("\x1f", 1));
    mix(user_text);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string mark_target(std::string_view sentence, Span span) {
    const auto cps = text::decode(sentence);
    if (span.start >= span.end || span.end > cps.size()) {
        throw SpanError("cannot mark [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                        ") in a sentence of " + std::to_string(cps.size()) + " characters");
    }
    const std::u32string_view view(cps);
    std::string out = text::encode(view.substr(0, span.start));
    out += kOpenMark;
    out += text::encode(view.substr(span.start, span.length()));
    out += kCloseMark;
    out += text::encode(view.substr(span.end));
    return out;
}

std::string strip_markers(std::string_view marked) {
    std::string out(marked);
    for (auto mark : {kOpenMark, kCloseMark}) {
        if (const auto pos = out.find(mark); pos != std::string::npos) out.erase(pos, mark.size());
    }
    return out;
}

RenderedPrompt render(const RoleTemplate& tmpl, PromptRole role, const Slots& slots,
                      std::span<const Demonstration> demos, std::size_t k, std::optional<Span> target_span) {
    if (k > demos.size()) {
        throw TemplateError("requested " + std::to_string(k) + " demonstrations for " +
                            std::string(to_string(role)) + " but only " + std::to_string(demos.size()) +
                            " are available");
    }

    Slots filled = slots;
    if (requires_marking(role)) {
        auto it = filled.find("sentence");
        if (it == filled.end()) throw TemplateError("missing placeholder [sentence]");
        if (target_span) {
            it->second = mark_target(it->second, *target_span);
        } else if (it->second.find(kOpenMark) == std::string::npos ||
                   it->second.find(kCloseMark) == std::string::npos) {
            const auto target = filled.find("target");
            if (target == filled.end()) {
                throw TemplateError(std::string(to_string(role)) + " needs a target span or [target] slot");
            }
            const auto spans = text::find_word(it->second, target->second);
            if (spans.empty()) {
                throw TemplateError("target '" + target->second + "' does not occur in the sentence");
            }
            it->second = mark_target(it->second, spans.front());
        }
    }

    std::string block;
    for (std::size_t i = 0; i < k; ++i) {
        if (!block.empty()) block += '\n';
        block += "####Example " + std::to_string(i + 1) + "####\n";
        block += substitute(tmpl.example, demos[i].slots, "demonstration " + std::to_string(i + 1));
    }

    RenderedPrompt out;
    out.system_text = tmpl.system_text;
    // Examples are spliced in after slot substitution so demo text is never
    // re-scanned for placeholders.
    const auto body = with_examples(tmpl.text, block.empty() ? std::string() : std::string("\x01"));
    out.user_text = substitute(body, filled, std::string(to_string(role)) + " template");
    if (const auto pos = out.user_text.find('\x01'); pos != std::string::npos) {
        out.user_text.replace(pos, 1, block);
    }
    out.fingerprint = fingerprint(out.system_text, out.user_text);
    return out;
}

RenderedPrompt render(const PromptBank& bank, PromptRole role, const Slots& slots, std::size_t k,
                      std::size_t rotation, std::optional<Span> target_span) {
    const auto& tmpl = bank.at(role);
    if (rotation == 0 || tmpl.demos.empty()) {
        return render(tmpl, role, slots, tmpl.demos, k, target_span);
    }
    std::vector<Demonstration> rotated;
    rotated.reserve(tmpl.demos.size());
    for (std::size_t i = 0; i < tmpl.demos.size(); ++i) {
        rotated.push_back(tmpl.demos[(i + rotation) % tmpl.demos.size()]);
    }
    return render(tmpl, role, slots, rotated, k, target_span);
}

std::vector<std::string> parse_word_list(std::string_view response) {
    std::string body = text::trim(response);
    constexpr std::string_view kAnswer = "ANSWER:";
    if (std::string_view(body).starts_with(kAnswer)) body.erase(0, kAnswer.size());

    std::vector<std::string> out;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= body.size()) {
        auto end = body.find(';', start);
        if (end == std::string::npos) end = body.size();
        auto item = text::trim(std::string_view(body).substr(start, end - start));
        if (!item.empty() && seen.insert(text::casefold(item)).second) out.push_back(std::move(item));
        start = end + 1;
    }
    return out;
}

bool parse_yes_no(std::string_view response) {
    const bool yes = response.find("##YES##") != std::string_view::npos;
    const bool no = response.find("##NO##") != std::string_view::npos;
    if (yes && !no) return true;
    if (no && !yes) return false;
    throw ParseError(yes ? "response contains both ##YES## and ##NO##"
                         : "response contains neither ##YES## nor ##NO##");
}

const RoleTemplate& PromptBank::at(PromptRole role) const {
    const auto it = roles_.find(role);
    if (it == roles_.end()) throw TemplateError("prompt bank has no template for " + std::string(to_string(role)));
    return it->second;
}

PromptBank PromptBank::from_json(const Json& j) {
    PromptBank bank;
    try {
        for (const auto& [name, entry] : j.items()) {
            const auto role = parse_role(name);
            RoleTemplate tmpl;
            tmpl.text = entry.at("template").get<std::string>();
            tmpl.example = entry.value("example", std::string("SENTENCE: [sentence]\nANSWER: [answer]"));
            tmpl.system_text = entry.value("system", std::string());
            for (const auto& d : entry.value("demos", Json::array())) {
                Demonstration demo;
                demo.role = role;
                for (const auto& [key, value] : d.items()) {
                    if (key == "_source") demo.source = value.get<std::string>();
                    else demo.slots[key] = value.get<std::string>();
                }
                for (const auto& ph : placeholders(tmpl.example)) {
                    if (!demo.slots.contains(ph)) {
                        throw TemplateError(std::string(to_string(role)) + " demonstration lacks [" + ph + "]");
                    }
                }
                tmpl.demos.push_back(std::move(demo));
            }
            bank.roles_[role] = std::move(tmpl);
        }
    } catch (const nlohmann::json::exception& e) {
        throw TemplateError(std::string("malformed prompt bank: ") + e.what());
    }
    return bank;
}

PromptBank PromptBank::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open prompt bank '" + path + "'");
    try {
        return from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw TemplateError("prompt bank '" + path + "': " + e.what());
    }
}

const PromptBank& PromptBank::builtin() {
    static const PromptBank bank = from_json(Json::parse(detail::kBuiltinPromptBank));
    return bank;
}

Json PromptBank::to_json() const {
    Json j = Json::object();
    for (const auto& [role, tmpl] : roles_) {
        Json entry = Json::object();
        entry["system"] = tmpl.system_text;
        entry["template"] = tmpl.text;
        entry["example"] = tmpl.example;
        Json demos = Json::array();
        for (const auto& d : tmpl.demos) {
            Json dj = Json::object();
            for (const auto& [k, v] : d.slots) dj[k] = v;
            if (!d.source.empty()) dj["_source"] = d.source;
            demos.push_back(std::move(dj));
        }
        entry["demos"] = std::move(demos);
        j[std::string(to_string(role))] = std::move(entry);
    }
    return j;
}

} // namespace lexsimp::promptkit
