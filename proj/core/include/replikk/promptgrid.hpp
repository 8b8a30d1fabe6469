#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "replikk/labels.hpp"

namespace replikk {

// Prompt variant code, written base-placement-mentions[-order].
//   placement: 1 = sentence after the prompt, 2 = sentence before it
//   mentions:  0 = no class names in the prompt, 2 = pos/neg, 4 = all four
//   order:     2 = positive named first, 1 = positive named last;
//              0 means no order digit (only valid with mentions 0)
// Positive-first is the inherent order, so the canonical string drops the
// order digit unless it is 1. Parsing accepts the redundant explicit form
// (e.g. "8-2-4-2" normalizes to "8-2-4").
struct prompt_code {
    int base = 0;
    int placement = 0;
    int mentions = 0;
    int order = 0;

    bool operator==(const prompt_code&) const = default;
};

prompt_code parse_prompt_code(const std::string& text);
std::string to_string(const prompt_code& code);

struct class_words {
    std::string pos;
    std::string neg;
    std::string neut;
    std::string mix;

    const std::string& word(sentiment_label label) const;
};

// One reply surface pattern, e.g. "Setningen er {word} .". {word} is the
// class word as-is, {Word} with its first letter capitalized.
struct reply_form {
    std::string form; // short name: noun, pronoun, bare, minimal
    std::string masculine_template;
    std::string neuter_template;
};

struct base_prompt {
    int id = 0;
    grammatical_gender gender = grammatical_gender::masculine;
    // Question text. Must contain exactly one {classes} slot iff the base
    // admits mentions > 0.
    std::string template_text;
    std::vector<int> mentions; // admissible mention counts, e.g. {0} or {2, 4}
    // Optional explicit (placement, mentions, order) triples. When empty the
    // full combination set is generated from `mentions`.
    std::vector<std::array<int, 3>> variants;
};

struct grid_config {
    std::string separator = "\n";
    bool detokenize_replies = false;
    bool trailing_separator = false;
    class_words masculine_words;
    class_words neuter_words;
    std::vector<reply_form> reply_forms;
    std::vector<base_prompt> base_prompts;

    const class_words& words(grammatical_gender gender) const {
        return gender == grammatical_gender::masculine ? masculine_words : neuter_words;
    }
};

// The shipped grid: 9 bases, 48 prompt variants, 16 replies each, 30
// distinct reply strings grid-wide.
grid_config default_grid_config();

grid_config parse_grid_config(const std::string& json_text);
grid_config load_grid_config(const std::string& path);
std::string grid_config_to_json(const grid_config& config);

void validate_grid_config(const grid_config& config);

// A fully resolved prompt variant.
struct prompt_spec {
    prompt_code code;
    std::string code_string;
    int base_id = 0;
    grammatical_gender gender = grammatical_gender::masculine;
    std::string question;      // class mentions substituted
    std::string template_text; // question and separator around one {sentence} slot
};

// Expands every base into its admissible variants, in config order
// (placement, then mentions, then order). Codes are unique; invalid
// combinations (mentions without a {classes} slot, an order digit with
// mentions 0, out-of-range digits) raise config_error naming the code.
std::vector<prompt_spec> expand_grid(const grid_config& config);

// Substitutes the sentence into the spec's template. The sentence must be
// non-empty after trimming; the result contains it exactly once.
std::string render_prompt(const prompt_spec& spec, const std::string& sentence_text);

struct reply_candidate {
    std::string text;
    std::string form;
    grammatical_gender gender = grammatical_gender::masculine;
    sentiment_label label = sentiment_label::pos;
};

// Reply candidates for one prompt, in canonical order: reply forms in config
// order, classes in canonical order within each form. Every candidate uses
// the prompt's grammatical gender.
std::vector<reply_candidate> generate_replies(const prompt_spec& spec,
                                              const grid_config& config);

// Total map reply text -> class. Throws config_error if two candidates with
// different labels share a text.
std::map<std::string, sentiment_label> reply_class_map(
    const std::vector<reply_candidate>& replies);

} // namespace replikk
