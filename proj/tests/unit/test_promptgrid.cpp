#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <replikk/errors.hpp>
#include <replikk/promptgrid.hpp>
#include <replikk/text.hpp>

using namespace replikk;

namespace {

std::vector<prompt_spec> default_specs() { return expand_grid(default_grid_config()); }

const prompt_spec& spec_by_code(const std::vector<prompt_spec>& specs,
                                const std::string& code) {
    for (const prompt_spec& spec : specs) {
        if (spec.code_string == code) return spec;
    }
    REQUIRE_MESSAGE(false, ("missing spec " + code));
    return specs.front();
}

} // namespace

TEST_SUITE("promptgrid") {

TEST_CASE("default grid has 48 prompts, 16 replies each, 30 distinct strings") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    CHECK(specs.size() == 48);

    std::set<std::string> codes;
    std::set<std::string> distinct_replies;
    std::set<int> base_ids;
    for (const prompt_spec& spec : specs) {
        CHECK(codes.insert(spec.code_string).second);
        base_ids.insert(spec.base_id);
        std::vector<reply_candidate> replies = generate_replies(spec, config);
        CHECK(replies.size() == 16);
        std::map<sentiment_label, int> per_class;
        for (const reply_candidate& reply : replies) {
            ++per_class[reply.label];
            distinct_replies.insert(reply.text);
        }
        for (sentiment_label label : canonical_labels) CHECK(per_class[label] == 4);
        // The map over the candidate set is total and unambiguous.
        reply_class_map(replies);
    }
    CHECK(distinct_replies.size() == 30);
    CHECK(base_ids == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("grid composition: bases 1-4 give 2 variants, 5-9 give 8") {
    std::vector<prompt_spec> specs = default_specs();
    std::map<int, int> per_base;
    for (const prompt_spec& spec : specs) ++per_base[spec.base_id];
    for (int base = 1; base <= 4; ++base) CHECK(per_base[base] == 2);
    for (int base = 5; base <= 9; ++base) CHECK(per_base[base] == 8);
}

TEST_CASE("prompt code parsing and canonical form") {
    CHECK(to_string(parse_prompt_code("8-2-4-2")) == "8-2-4");
    CHECK(to_string(parse_prompt_code("6-1-2-2")) == "6-1-2");
    CHECK(to_string(parse_prompt_code("5-1-2-1")) == "5-1-2-1");
    CHECK(to_string(parse_prompt_code("1-1-0")) == "1-1-0");
    CHECK(parse_prompt_code("7-2-2").order == 2);
    CHECK(parse_prompt_code("7-2-2-1").order == 1);
    CHECK(parse_prompt_code("1-1-0").order == 0);

    CHECK_THROWS_AS(parse_prompt_code("1-2-0-1"), config_error); // order with mentions 0
    CHECK_THROWS_AS(parse_prompt_code("5-3-2"), config_error);   // placement out of range
    CHECK_THROWS_AS(parse_prompt_code("5-1-3"), config_error);   // mentions out of range
    CHECK_THROWS_AS(parse_prompt_code("5-1-2-4"), config_error); // order out of range
    CHECK_THROWS_AS(parse_prompt_code("0-1-0"), config_error);
    CHECK_THROWS_AS(parse_prompt_code("5-1"), config_error);
    CHECK_THROWS_AS(parse_prompt_code("abc"), config_error);
    CHECK_THROWS_AS(parse_prompt_code(""), config_error);
}

TEST_CASE("sentence-before placement renders sentence, newline, question") {
    std::vector<prompt_spec> specs = default_specs();
    const prompt_spec& spec = spec_by_code(specs, "8-2-4");
    std::string rendered = render_prompt(spec, "Dette var en ujevn opplevelse .");
    CHECK(rendered ==
          "Dette var en ujevn opplevelse .\n"
          "Oppfatter du denne setningen som positiv, negativ, blandet eller "
          "nøytral?");
}

TEST_CASE("sentence-after placement renders question, newline, sentence") {
    std::vector<prompt_spec> specs = default_specs();
    const prompt_spec& spec = spec_by_code(specs, "1-1-0");
    std::string rendered = render_prompt(spec, "Ingen ventetid denne gangen .");
    CHECK(rendered ==
          "Hvordan er sentimentet til denne setningen?\n"
          "Ingen ventetid denne gangen .");
}

TEST_CASE("order digit controls whether positive is named first") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    for (const prompt_spec& spec : specs) {
        if (spec.code.mentions == 0) continue;
        const class_words& words = config.words(spec.gender);
        std::size_t pos_at = spec.question.find(words.pos);
        std::size_t neg_at = spec.question.find(words.neg);
        REQUIRE(pos_at != std::string::npos);
        REQUIRE(neg_at != std::string::npos);
        if (spec.code.order == 1) {
            CHECK(neg_at < pos_at);
        } else {
            CHECK(pos_at < neg_at);
        }
        bool has_four = spec.code.mentions == 4;
        CHECK((spec.question.find(words.mix) != std::string::npos) == has_four);
        CHECK((spec.question.find(words.neut) != std::string::npos) == has_four);
    }
}

TEST_CASE("two-mention and reversed phrases read naturally") {
    std::vector<prompt_spec> specs = default_specs();
    CHECK(spec_by_code(specs, "5-1-2").question ==
          "Ville du sagt at denne setningen er positiv eller negativ?");
    CHECK(spec_by_code(specs, "5-1-2-1").question ==
          "Ville du sagt at denne setningen er negativ eller positiv?");
    CHECK(spec_by_code(specs, "8-2-4-1").question ==
          "Oppfatter du denne setningen som negativ, positiv, blandet eller "
          "nøytral?");
    // Neuter base uses the neuter inflections.
    CHECK(spec_by_code(specs, "7-1-2").question ==
          "Er sentimentet i denne setningen positivt eller negativt?");
}

TEST_CASE("render embeds the sentence exactly once and is injective") {
    std::vector<prompt_spec> specs = default_specs();
    const prompt_spec& spec = spec_by_code(specs, "3-1-0");
    std::string first = render_prompt(spec, "Svaret kom etter tre uker .");
    std::string second = render_prompt(spec, "Svaret kom aldri .");
    CHECK(first != second);
    CHECK(count_occurrences(first, "Svaret kom etter tre uker .") == 1);
    CHECK_THROWS_AS(render_prompt(spec, "   "), data_error);
    CHECK_THROWS_AS(render_prompt(spec, ""), data_error);
}

TEST_CASE("reply candidates come in canonical order with gender agreement") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);

    // Base 5 is masculine: "setningen er positiv".
    std::vector<reply_candidate> masc = generate_replies(spec_by_code(specs, "5-1-2"), config);
    REQUIRE(masc.size() == 16);
    CHECK(masc[0].text == "Setningen er positiv .");
    CHECK(masc[0].label == sentiment_label::pos);
    CHECK(masc[1].text == "Setningen er negativ .");
    CHECK(masc[2].text == "Setningen er nøytral .");
    CHECK(masc[3].text == "Setningen er blandet .");
    CHECK(masc[4].text == "Den er positiv .");
    CHECK(masc[8].text == "Positiv .");
    CHECK(masc[12].text == "Positiv");
    for (const reply_candidate& reply : masc) {
        CHECK(reply.gender == grammatical_gender::masculine);
        CHECK(reply.text.find("positivt") == std::string::npos);
    }

    // Base 1 is neuter: "sentimentet er positivt".
    std::vector<reply_candidate> neut = generate_replies(spec_by_code(specs, "1-1-0"), config);
    CHECK(neut[0].text == "Sentimentet er positivt .");
    CHECK(neut[4].text == "Det er positivt .");
    CHECK(neut[8].text == "Positivt .");
    CHECK(neut[11].text == "Blandet .");
    CHECK(neut[15].text == "Blandet");

    // The class map is total and covers all four classes.
    std::map<std::string, sentiment_label> mapping = reply_class_map(masc);
    CHECK(mapping.size() == 16);
    CHECK(mapping.at("Positiv .") == sentiment_label::pos);
    CHECK(mapping.at("Setningen er blandet .") == sentiment_label::mix);
}

TEST_CASE("the two genders share only the mixed-class bare forms") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    std::set<std::string> masc, neut;
    for (const reply_candidate& reply :
         generate_replies(spec_by_code(specs, "5-1-2"), config)) {
        masc.insert(reply.text);
    }
    for (const reply_candidate& reply :
         generate_replies(spec_by_code(specs, "1-1-0"), config)) {
        neut.insert(reply.text);
    }
    std::set<std::string> shared;
    std::set_intersection(masc.begin(), masc.end(), neut.begin(), neut.end(),
                          std::inserter(shared, shared.begin()));
    CHECK(shared == std::set<std::string>{"Blandet .", "Blandet"});
}

TEST_CASE("ambiguous reply texts are rejected") {
    grid_config config = default_grid_config();
    config.masculine_words.neg = config.masculine_words.pos; // "positiv" twice
    std::vector<prompt_spec> specs = expand_grid(config);
    std::vector<reply_candidate> replies =
        generate_replies(spec_by_code(specs, "5-1-2"), config);
    CHECK_THROWS_AS(reply_class_map(replies), config_error);
}

TEST_CASE("detokenized replies drop the space before punctuation") {
    grid_config config = default_grid_config();
    config.detokenize_replies = true;
    std::vector<prompt_spec> specs = expand_grid(config);
    std::vector<reply_candidate> replies =
        generate_replies(spec_by_code(specs, "5-1-2"), config);
    CHECK(replies[0].text == "Setningen er positiv.");
    CHECK(replies[8].text == "Positiv.");
    CHECK(replies[12].text == "Positiv");
}

TEST_CASE("separator and trailing separator are honored") {
    grid_config config = default_grid_config();
    config.separator = "\n\n";
    config.trailing_separator = true;
    std::vector<prompt_spec> specs = expand_grid(config);
    const prompt_spec& spec = spec_by_code(specs, "2-2-0");
    std::string rendered = render_prompt(spec, "Kort beskjed .");
    CHECK(rendered == "Kort beskjed .\n\nHva er sentimentet til denne setningen?\n\n");
}

TEST_CASE("config JSON round-trips") {
    grid_config config = default_grid_config();
    std::string json_text = grid_config_to_json(config);
    grid_config parsed = parse_grid_config(json_text);
    CHECK(grid_config_to_json(parsed) == json_text);

    std::vector<prompt_spec> a = expand_grid(config);
    std::vector<prompt_spec> b = expand_grid(parsed);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].code_string == b[i].code_string);
        CHECK(a[i].template_text == b[i].template_text);
    }
    validate_grid_config(parsed);
}

TEST_CASE("explicit variant tuples restrict the expansion") {
    grid_config config = default_grid_config();
    for (base_prompt& base : config.base_prompts) {
        if (base.id == 5) base.variants = {{1, 2, 2}, {2, 4, 1}};
    }
    std::vector<prompt_spec> specs = expand_grid(config);
    std::vector<std::string> five;
    for (const prompt_spec& spec : specs) {
        if (spec.base_id == 5) five.push_back(spec.code_string);
    }
    CHECK(five == std::vector<std::string>{"5-1-2", "5-2-4-1"});
}

TEST_CASE("invalid configurations are config errors") {
    {
        grid_config config = default_grid_config();
        config.separator.clear();
        CHECK_THROWS_AS(validate_grid_config(config), config_error);
    }
    {
        grid_config config = default_grid_config();
        config.base_prompts.push_back(config.base_prompts.front());
        CHECK_THROWS_AS(validate_grid_config(config), config_error);
    }
    {
        grid_config config = default_grid_config();
        config.reply_forms[0].masculine_template = "uten plassholder";
        CHECK_THROWS_AS(validate_grid_config(config), config_error);
    }
    {
        grid_config config = default_grid_config();
        config.reply_forms.clear();
        CHECK_THROWS_AS(validate_grid_config(config), config_error);
    }
    {
        // Mentions on a base whose template has no {classes} slot.
        grid_config config = default_grid_config();
        for (base_prompt& base : config.base_prompts) {
            if (base.id == 1) base.mentions = {2};
        }
        CHECK_THROWS_AS(expand_grid(config), config_error);
    }
    {
        // Order digit forced onto a mentions-0 variant.
        grid_config config = default_grid_config();
        for (base_prompt& base : config.base_prompts) {
            if (base.id == 1) base.variants = {{1, 0, 1}};
        }
        CHECK_THROWS_AS(expand_grid(config), config_error);
    }
    CHECK_THROWS_AS(parse_grid_config("ikke json"), config_error);
    CHECK_THROWS_AS(load_grid_config("/nonexistent/grid.json"), config_error);
}

TEST_CASE("expansion order is placement-major, then mentions, then order") {
    std::vector<prompt_spec> specs = default_specs();
    std::vector<std::string> five;
    for (const prompt_spec& spec : specs) {
        if (spec.base_id == 5) five.push_back(spec.code_string);
    }
    CHECK(five == std::vector<std::string>{"5-1-2", "5-1-2-1", "5-1-4", "5-1-4-1",
                                           "5-2-2", "5-2-2-1", "5-2-4", "5-2-4-1"});
}

} // TEST_SUITE("promptgrid")
