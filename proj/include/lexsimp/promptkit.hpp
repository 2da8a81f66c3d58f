#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexsimp/text.hpp"

namespace lexsimp::promptkit {

using text::Span;

enum class PromptRole { OneStepDirect, OneStepCot, Cwi, Sg, Validate, AnnotateDirect, AnnotateCot };

inline constexpr PromptRole kAllRoles[] = {
    PromptRole::OneStepDirect, PromptRole::OneStepCot, PromptRole::Cwi, PromptRole::Sg,
    PromptRole::Validate, PromptRole::AnnotateDirect, PromptRole::AnnotateCot,
};

std::string_view to_string(PromptRole role);
PromptRole parse_role(std::string_view s);  // throws TemplateError

/// Placeholder name -> value, without the surrounding brackets.
using Slots = std::map<std::string, std::string>;

struct Demonstration {
    PromptRole role = PromptRole::OneStepDirect;
    Slots slots;
    /// Where the exemplar came from ("figure" or "authored"); not rendered.
    std::string source;
};

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
    std::string fingerprint;
};

/// Template for one role. `text` holds `[name]` placeholders and at most
/// one `[(examples)]` line; `example` is the per-demonstration block.
struct RoleTemplate {
    std::string text;
    std::string example;
    std::string system_text;
    std::vector<Demonstration> demos;
};

/// Placeholders in the task part of a role's template, e.g. {"sentence", "target"}.
std::vector<std::string> placeholders(std::string_view template_text);

/// Roles whose `sentence` slot must show the target inside `<<` `>>`.
bool requires_marking(PromptRole role);

/// Stable 64-bit FNV-1a over system and user text, hex encoded.
std::string fingerprint(std::string_view system_text, std::string_view user_text);

class PromptBank {
public:
    /// Bank compiled from data/prompt_bank.json.
    static const PromptBank& builtin();
    static PromptBank from_json(const nlohmann::ordered_json& j);
    static PromptBank load(const std::string& path);

    const RoleTemplate& at(PromptRole role) const;
    std::size_t demo_count(PromptRole role) const { return at(role).demos.size(); }

    nlohmann::ordered_json to_json() const;

private:
    std::map<PromptRole, RoleTemplate> roles_;
};

/// Renders `role` from the bank template with the first `k` of `demos`.
///
/// For roles that require marking, the `sentence` slot is marked at
/// `target_span` when given; otherwise it must already contain `<<`/`>>`,
/// or the first whole-word occurrence of the `target` slot is marked.
RenderedPrompt render(const RoleTemplate& tmpl, PromptRole role, const Slots& slots,
                      std::span<const Demonstration> demos, std::size_t k,
                      std::optional<Span> target_span = std::nullopt);

/// Convenience over the bank's own template and demonstrations.
RenderedPrompt render(const PromptBank& bank, PromptRole role, const Slots& slots, std::size_t k,
                      std::size_t rotation = 0, std::optional<Span> target_span = std::nullopt);

std::string mark_target(std::string_view sentence, Span span);
std::string strip_markers(std::string_view marked);

/// Splits on ';', trims, drops empties, dedupes case-insensitively keeping
/// the first spelling. A leading "ANSWER:" is removed.
std::vector<std::string> parse_word_list(std::string_view response);

/// `##YES##` -> true, `##NO##` -> false; neither or both -> ParseError.
bool parse_yes_no(std::string_view response);

} // namespace lexsimp::promptkit
