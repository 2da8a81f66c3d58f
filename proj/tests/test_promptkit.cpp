#include <doctest.h>

#include "lexsimp/errors.hpp"
#include "lexsimp/promptkit.hpp"
#include "oracles.hpp"

using namespace lexsimp;
using namespace lexsimp::promptkit;

TEST_SUITE("promptkit") {

TEST_CASE("one-step direct with no demonstrations reproduces the figure text") {
    const auto p = render(PromptBank::builtin(), PromptRole::OneStepDirect,
                          {{"Input_sentence", "John composed these verses."}}, 0);
    const std::string expected =
        "####Instruction####\n"
        "Your task is to simplify the complex words of the input sentence which aims at making it easier for "
        "children to read and understand.\n"
        "Don't rewrite the sentence, you MUST ensure that the structure of the simplified sentence matches the "
        "structure of the original sentence.\n"
        "####Task####\n"
        "SENTENCE: John composed these verses.\n"
        "ANSWER:";
    CHECK(p.user_text == expected);
    CHECK(p.system_text.empty());
    CHECK(p.user_text.find('[') == std::string::npos);
}

TEST_CASE("substitute generator marks the target") {
    const auto p = render(PromptBank::builtin(), PromptRole::Sg,
                          {{"sentence", "John composed these verses."}, {"target", "composed"}}, 0);
    CHECK(p.user_text.find("SENTENCE: John <<composed>> these verses.\nTARGET: composed\nANSWER:") !=
          std::string::npos);
    CHECK(p.user_text.find("a target word is surrounded by \"<<>>\"") != std::string::npos);

    const auto by_span = render(PromptBank::builtin(), PromptRole::Sg,
                                {{"sentence", "the cat and the cat"}, {"target", "cat"}}, 0, 0, Span{16, 19});
    CHECK(by_span.user_text.find("the cat and the <<cat>>") != std::string::npos);
}

TEST_CASE("rendering is deterministic and sensitive to its inputs") {
    const Slots slots{{"sentence", "A sentence with words."}};
    const auto a = render(PromptBank::builtin(), PromptRole::Cwi, slots, 4);
    const auto b = render(PromptBank::builtin(), PromptRole::Cwi, slots, 4);
    CHECK(a.fingerprint == b.fingerprint);
    CHECK(a.user_text == b.user_text);
    CHECK(render(PromptBank::builtin(), PromptRole::Cwi, slots, 2).fingerprint != a.fingerprint);
    CHECK(render(PromptBank::builtin(), PromptRole::Cwi, slots, 4, 1).fingerprint != a.fingerprint);
    CHECK(fingerprint("", "x") == fingerprint("", "x"));
    CHECK(fingerprint("a", "b") != fingerprint("ab", ""));
}

TEST_CASE("demonstrations are inserted in order at the examples position") {
    const auto& bank = PromptBank::builtin();
    const auto& tmpl = bank.at(PromptRole::Cwi);
    REQUIRE(tmpl.demos.size() >= 2);
    const auto p = render(bank, PromptRole::Cwi, {{"sentence", "Plain words here."}}, 2);
    const auto first = p.user_text.find("####Example 1####\nSENTENCE: " + tmpl.demos[0].slots.at("sentence"));
    const auto second = p.user_text.find("####Example 2####\nSENTENCE: " + tmpl.demos[1].slots.at("sentence"));
    const auto task = p.user_text.find("####Task####");
    CHECK(first != std::string::npos);
    CHECK(second != std::string::npos);
    CHECK(first < second);
    CHECK(second < task);
    CHECK(p.user_text.find("####Example 3####") == std::string::npos);
    // Demo text holding brackets is never re-scanned as a placeholder.
    CHECK(p.user_text.find("[sentence]") == std::string::npos);
}

TEST_CASE("every role renders with every available demonstration") {
    const auto& bank = PromptBank::builtin();
    for (const auto role : kAllRoles) {
        Slots slots;
        for (const auto& name : placeholders(bank.at(role).text)) slots[name] = "word";
        if (slots.count("sentence")) slots["sentence"] = requires_marking(role) ? "a <<word>> here" : "a word here";
        if (slots.count("Input_sentence")) slots["Input_sentence"] = "a word here";
        const auto p = render(bank, role, slots, bank.demo_count(role));
        CHECK_MESSAGE(p.user_text.find("[(examples)]") == std::string::npos, to_string(role));
        CHECK(parse_role(to_string(role)) == role);
    }
}

TEST_CASE("template errors") {
    const auto& bank = PromptBank::builtin();
    try {
        render(bank, PromptRole::Validate, {{"sentence1", "a"}}, 0);
        FAIL("expected TemplateError");
    } catch (const TemplateError& e) {
        CHECK(std::string(e.what()).find("sentence2") != std::string::npos);
    }
    CHECK_THROWS_AS(render(bank, PromptRole::Cwi, {{"sentence", "x"}}, bank.demo_count(PromptRole::Cwi) + 1),
                    TemplateError);
    CHECK_THROWS_AS(parse_role("Nope"), TemplateError);
    CHECK_THROWS_AS(render(bank, PromptRole::Sg, {{"sentence", "a b"}, {"target", "zzz"}}, 0), TemplateError);
}

TEST_CASE("bank round-trips through json") {
    const auto& bank = PromptBank::builtin();
    const auto again = PromptBank::from_json(bank.to_json());
    for (const auto role : kAllRoles) {
        CHECK(again.at(role).text == bank.at(role).text);
        CHECK(again.demo_count(role) == bank.demo_count(role));
    }
    // Paper exemplars are flagged as such.
    CHECK(bank.at(PromptRole::AnnotateDirect).demos[0].source == "figure");
}

TEST_CASE("mark_target") {
    CHECK(mark_target("abc", {0, 1}) == "<<a>>bc");
    CHECK(mark_target("The text is an indication that it was premeditated, Goodyear said.", {15, 25}) ==
          "The text is an <<indication>> that it was premeditated, Goodyear said.");
    CHECK(mark_target("né là", {3, 5}) == "né <<là>>");
    CHECK_THROWS_AS(mark_target("abc", {2, 9}), SpanError);
    CHECK_THROWS_AS(mark_target("abc", {1, 1}), SpanError);
}

TEST_CASE("property: marking then stripping is the identity") {
    oracle::Rng rng(3);
    const std::string alphabet[] = {"a", "b", " ", "é", "ß", ",", "漢"};
    for (int i = 0; i < 500; ++i) {
        std::string s;
        const auto len = rng.between(1, 20);
        for (std::size_t c = 0; c < len; ++c) s += alphabet[rng.below(7)];
        const auto start = rng.between(0, len - 1);
        const auto end = rng.between(start + 1, len);
        const auto marked = mark_target(s, {start, end});
        CHECK(text::char_length(marked) == len + 4);
        CHECK(strip_markers(marked) == s);
    }
}

TEST_CASE("parse_word_list") {
    CHECK(parse_word_list("fatalities;obvious;connection") ==
          std::vector<std::string>{"fatalities", "obvious", "connection"});
    CHECK(parse_word_list("").empty());
    CHECK(parse_word_list("a; a ;B;b") == std::vector<std::string>{"a", "B"});
    CHECK(parse_word_list("ANSWER: look into; examine") == std::vector<std::string>{"look into", "examine"});
    CHECK(parse_word_list(" ; ;").empty());
}

TEST_CASE("property: joining a list and parsing it back recovers the list") {
    oracle::Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto keys = oracle::distinct_keys(oracle::random_list(rng));
        std::string joined;
        for (std::size_t k = 0; k < keys.size(); ++k) joined += (k ? ";" : "") + keys[k];
        CHECK(parse_word_list(joined) == keys);
        CHECK(parse_word_list("ANSWER: " + joined) == keys);
    }
}

TEST_CASE("parse_yes_no") {
    CHECK(parse_yes_no("##YES##"));
    CHECK_FALSE(parse_yes_no("##NO##"));
    CHECK(parse_yes_no("Analysis... the answer is ##YES##."));
    CHECK_THROWS_AS(parse_yes_no("##YES## ... ##NO##"), ParseError);
    CHECK_THROWS_AS(parse_yes_no("yes"), ParseError);
    CHECK_THROWS_AS(parse_yes_no("##yes##"), ParseError);
    CHECK_THROWS_AS(parse_yes_no(""), ParseError);
}

}
