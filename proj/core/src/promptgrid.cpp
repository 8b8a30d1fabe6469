#include "replikk/promptgrid.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "replikk/errors.hpp"
#include "replikk/text.hpp"

namespace replikk {

using nlohmann::json;

const std::string& class_words::word(sentiment_label label) const {
    switch (label) {
        case sentiment_label::pos: return pos;
        case sentiment_label::neg: return neg;
        case sentiment_label::neut: return neut;
        case sentiment_label::mix: return mix;
    }
    throw config_error("invalid sentiment_label value");
}

prompt_code parse_prompt_code(const std::string& text) {
    std::vector<int> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dash = text.find('-', pos);
        std::string piece =
            dash == std::string::npos ? text.substr(pos) : text.substr(pos, dash - pos);
        if (piece.empty() || piece.size() > 2 ||
            !std::all_of(piece.begin(), piece.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            throw config_error("malformed prompt code '" + text + "'");
        }
        parts.push_back(std::stoi(piece));
        if (dash == std::string::npos) break;
        pos = dash + 1;
    }
    if (parts.size() != 3 && parts.size() != 4) {
        throw config_error("prompt code '" + text + "' must have 3 or 4 digits");
    }

    prompt_code code;
    code.base = parts[0];
    code.placement = parts[1];
    code.mentions = parts[2];
    if (code.base < 1) throw config_error("prompt code '" + text + "': base must be >= 1");
    if (code.placement != 1 && code.placement != 2) {
        throw config_error("prompt code '" + text + "': placement must be 1 or 2");
    }
    if (code.mentions != 0 && code.mentions != 2 && code.mentions != 4) {
        throw config_error("prompt code '" + text + "': mentions must be 0, 2 or 4");
    }
    if (parts.size() == 4) {
        if (code.mentions == 0) {
            throw config_error("prompt code '" + text +
                               "': order digit is invalid with mentions 0");
        }
        if (parts[3] != 1 && parts[3] != 2) {
            throw config_error("prompt code '" + text + "': order must be 1 or 2");
        }
        code.order = parts[3];
    } else {
        code.order = code.mentions == 0 ? 0 : 2;
    }
    return code;
}

std::string to_string(const prompt_code& code) {
    std::ostringstream out;
    out << code.base << '-' << code.placement << '-' << code.mentions;
    if (code.order == 1) out << "-1";
    return out.str();
}

namespace {

std::string capitalize_first(std::string word) {
    if (!word.empty()) {
        word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    }
    return word;
}

std::string mention_phrase(const class_words& words, int mentions, int order) {
    const std::string& first = order == 1 ? words.neg : words.pos;
    const std::string& second = order == 1 ? words.pos : words.neg;
    if (mentions == 2) return first + " eller " + second;
    return first + ", " + second + ", " + words.mix + " eller " + words.neut;
}

// Removes the space before sentence-final punctuation in tokenized text.
std::string detokenize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == ' ' && i + 1 < text.size()) {
            char next = text[i + 1];
            if (next == '.' || next == ',' || next == '!' || next == '?' ||
                next == ':' || next == ';') {
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

void validate_reply_form(const reply_form& row) {
    if (row.form.empty()) throw config_error("reply form with empty name");
    for (const std::string& tpl : {row.masculine_template, row.neuter_template}) {
        std::size_t slots =
            count_occurrences(tpl, "{word}") + count_occurrences(tpl, "{Word}");
        if (slots != 1) {
            throw config_error("reply form '" + row.form + "' template '" + tpl +
                               "' must contain exactly one {word} or {Word} slot");
        }
    }
}

std::string render_reply_text(const std::string& tpl, const std::string& word,
                              bool detok) {
    std::string out = replace_all(tpl, "{word}", word);
    out = replace_all(out, "{Word}", capitalize_first(word));
    return detok ? detokenize(out) : out;
}

void validate_words(const class_words& words, const char* gender_name) {
    if (words.pos.empty() || words.neg.empty() || words.neut.empty() || words.mix.empty()) {
        throw config_error(std::string("empty class word for gender ") + gender_name);
    }
}

std::vector<std::array<int, 3>> variant_tuples(const base_prompt& base) {
    if (!base.variants.empty()) return base.variants;
    std::vector<std::array<int, 3>> out;
    for (int placement : {1, 2}) {
        for (int mentions : base.mentions) {
            if (mentions == 0) {
                out.push_back({placement, 0, 0});
            } else {
                out.push_back({placement, mentions, 2});
                out.push_back({placement, mentions, 1});
            }
        }
    }
    return out;
}

prompt_spec make_spec(const grid_config& config, const base_prompt& base,
                      const prompt_code& code) {
    std::string code_str = to_string(code);
    std::size_t class_slots = count_occurrences(base.template_text, "{classes}");
    if (code.mentions == 0 && class_slots != 0) {
        throw config_error("prompt " + code_str +
                           ": mentions 0 but the base template has a {classes} slot");
    }
    if (code.mentions != 0 && class_slots != 1) {
        throw config_error("prompt " + code_str +
                           ": base template needs exactly one {classes} slot");
    }
    if (count_occurrences(base.template_text, "{sentence}") != 0) {
        throw config_error("prompt " + code_str +
                           ": base template must not contain {sentence}; placement "
                           "decides where the sentence goes");
    }

    prompt_spec spec;
    spec.code = code;
    spec.code_string = code_str;
    spec.base_id = base.id;
    spec.gender = base.gender;
    spec.question =
        code.mentions == 0
            ? base.template_text
            : replace_all(base.template_text, "{classes}",
                          mention_phrase(config.words(base.gender), code.mentions,
                                         code.order));
    if (code.placement == 1) {
        spec.template_text = spec.question + config.separator + "{sentence}";
    } else {
        spec.template_text = "{sentence}" + config.separator + spec.question;
    }
    if (config.trailing_separator) spec.template_text += config.separator;
    return spec;
}

} // namespace

grid_config default_grid_config() {
    grid_config config;
    config.separator = "\n";
    config.detokenize_replies = false;
    config.trailing_separator = false;
    config.masculine_words = {"positiv", "negativ", "nøytral", "blandet"};
    config.neuter_words = {"positivt", "negativt", "nøytralt", "blandet"};
    config.reply_forms = {
        {"noun", "Setningen er {word} .", "Sentimentet er {word} ."},
        {"pronoun", "Den er {word} .", "Det er {word} ."},
        {"bare", "{Word} .", "{Word} ."},
        {"minimal", "{Word}", "{Word}"},
    };
    config.base_prompts = {
        {1, grammatical_gender::neuter,
         "Hvordan er sentimentet til denne setningen?", {0}, {}},
        {2, grammatical_gender::neuter,
         "Hva er sentimentet til denne setningen?", {0}, {}},
        {3, grammatical_gender::neuter,
         "Hvordan vil du beskrive sentimentet til denne setningen?", {0}, {}},
        {4, grammatical_gender::neuter,
         "Beskriv sentimentet i denne setningen.", {0}, {}},
        {5, grammatical_gender::masculine,
         "Ville du sagt at denne setningen er {classes}?", {2, 4}, {}},
        {6, grammatical_gender::masculine,
         "Vil du si at denne setningen er {classes}?", {2, 4}, {}},
        {7, grammatical_gender::neuter,
         "Er sentimentet i denne setningen {classes}?", {2, 4}, {}},
        {8, grammatical_gender::masculine,
         "Oppfatter du denne setningen som {classes}?", {2, 4}, {}},
        {9, grammatical_gender::masculine,
         "Er denne setningen {classes}?", {2, 4}, {}},
    };
    return config;
}

void validate_grid_config(const grid_config& config) {
    if (config.separator.empty()) throw config_error("separator must be non-empty");
    validate_words(config.masculine_words, "masculine");
    validate_words(config.neuter_words, "neuter");
    if (config.reply_forms.empty()) throw config_error("no reply forms configured");
    std::set<std::string> form_names;
    for (const reply_form& row : config.reply_forms) {
        validate_reply_form(row);
        if (!form_names.insert(row.form).second) {
            throw config_error("duplicate reply form name '" + row.form + "'");
        }
    }
    if (config.base_prompts.empty()) throw config_error("no base prompts configured");
    std::set<int> base_ids;
    for (const base_prompt& base : config.base_prompts) {
        if (base.id < 1) throw config_error("base prompt ids must be >= 1");
        if (!base_ids.insert(base.id).second) {
            std::ostringstream msg;
            msg << "duplicate base prompt id " << base.id;
            throw config_error(msg.str());
        }
        if (base.mentions.empty() && base.variants.empty()) {
            std::ostringstream msg;
            msg << "base prompt " << base.id << " admits no variants";
            throw config_error(msg.str());
        }
    }
    expand_grid(config); // full per-code validation
}

std::vector<prompt_spec> expand_grid(const grid_config& config) {
    std::vector<prompt_spec> specs;
    std::set<std::string> seen_codes;
    for (const base_prompt& base : config.base_prompts) {
        for (const std::array<int, 3>& tuple : variant_tuples(base)) {
            prompt_code code;
            code.base = base.id;
            code.placement = tuple[0];
            code.mentions = tuple[1];
            code.order = tuple[2];
            // Round-trip through the parser so explicit variant tuples get
            // the same range checks as parsed codes.
            code = parse_prompt_code(to_string(code));
            prompt_spec spec = make_spec(config, base, code);
            if (!seen_codes.insert(spec.code_string).second) {
                throw config_error("duplicate prompt code " + spec.code_string);
            }
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

std::string render_prompt(const prompt_spec& spec, const std::string& sentence_text) {
    if (trim(sentence_text).empty()) {
        throw data_error("cannot render prompt " + spec.code_string + ": empty sentence");
    }
    return replace_all(spec.template_text, "{sentence}", sentence_text);
}

std::vector<reply_candidate> generate_replies(const prompt_spec& spec,
                                              const grid_config& config) {
    const class_words& words = config.words(spec.gender);
    std::vector<reply_candidate> replies;
    replies.reserve(config.reply_forms.size() * canonical_labels.size());
    for (const reply_form& row : config.reply_forms) {
        const std::string& tpl = spec.gender == grammatical_gender::masculine
                                     ? row.masculine_template
                                     : row.neuter_template;
        for (sentiment_label label : canonical_labels) {
            reply_candidate candidate;
            candidate.text =
                render_reply_text(tpl, words.word(label), config.detokenize_replies);
            candidate.form = row.form;
            candidate.gender = spec.gender;
            candidate.label = label;
            replies.push_back(std::move(candidate));
        }
    }
    return replies;
}

std::map<std::string, sentiment_label> reply_class_map(
    const std::vector<reply_candidate>& replies) {
    std::map<std::string, sentiment_label> map;
    for (const reply_candidate& reply : replies) {
        auto [it, inserted] = map.emplace(reply.text, reply.label);
        if (!inserted && it->second != reply.label) {
            throw config_error("reply text '" + reply.text +
                               "' is ambiguous between classes " +
                               std::string(to_string(it->second)) + " and " +
                               std::string(to_string(reply.label)));
        }
    }
    return map;
}

namespace {

class_words words_from_json(const json& node) {
    class_words words;
    words.pos = node.at("pos").get<std::string>();
    words.neg = node.at("neg").get<std::string>();
    words.neut = node.at("neut").get<std::string>();
    words.mix = node.at("mix").get<std::string>();
    return words;
}

json words_to_json(const class_words& words) {
    return json{{"pos", words.pos}, {"neg", words.neg},
                {"neut", words.neut}, {"mix", words.mix}};
}

} // namespace

grid_config parse_grid_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("grid config parse error: ") + e.what());
    }
    grid_config config;
    try {
        config.separator = root.value("separator", std::string("\n"));
        config.detokenize_replies = root.value("detokenize_replies", false);
        config.trailing_separator = root.value("trailing_separator", false);
        config.masculine_words = words_from_json(root.at("class_words").at("masculine"));
        config.neuter_words = words_from_json(root.at("class_words").at("neuter"));
        config.reply_forms.clear();
        for (const json& row : root.at("reply_forms")) {
            reply_form form;
            form.form = row.at("form").get<std::string>();
            form.masculine_template = row.at("masculine").get<std::string>();
            form.neuter_template = row.at("neuter").get<std::string>();
            config.reply_forms.push_back(std::move(form));
        }
        config.base_prompts.clear();
        for (const json& node : root.at("base_prompts")) {
            base_prompt base;
            base.id = node.at("id").get<int>();
            base.gender = parse_gender(node.at("gender").get<std::string>());
            base.template_text = node.at("template").get<std::string>();
            if (node.contains("mentions")) {
                base.mentions = node["mentions"].get<std::vector<int>>();
            }
            if (node.contains("variants")) {
                for (const json& tuple : node["variants"]) {
                    if (!tuple.is_array() || tuple.size() != 3) {
                        throw config_error("variant tuples must be [placement, mentions, order]");
                    }
                    base.variants.push_back(
                        {tuple[0].get<int>(), tuple[1].get<int>(), tuple[2].get<int>()});
                }
            }
            config.base_prompts.push_back(std::move(base));
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("grid config field error: ") + e.what());
    }
    validate_grid_config(config);
    return config;
}

grid_config load_grid_config(const std::string& path) {
    std::ifstream input(path);
    if (!input) throw config_error("cannot open grid config: " + path);
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return parse_grid_config(buffer.str());
}

std::string grid_config_to_json(const grid_config& config) {
    json root;
    root["separator"] = config.separator;
    root["detokenize_replies"] = config.detokenize_replies;
    root["trailing_separator"] = config.trailing_separator;
    root["class_words"] = {{"masculine", words_to_json(config.masculine_words)},
                           {"neuter", words_to_json(config.neuter_words)}};
    json forms = json::array();
    for (const reply_form& row : config.reply_forms) {
        forms.push_back({{"form", row.form},
                         {"masculine", row.masculine_template},
                         {"neuter", row.neuter_template}});
    }
    root["reply_forms"] = forms;
    json bases = json::array();
    for (const base_prompt& base : config.base_prompts) {
        json node;
        node["id"] = base.id;
        node["gender"] = std::string(to_string(base.gender));
        node["template"] = base.template_text;
        node["mentions"] = base.mentions;
        if (!base.variants.empty()) {
            json variants = json::array();
            for (const std::array<int, 3>& tuple : base.variants) {
                variants.push_back({tuple[0], tuple[1], tuple[2]});
            }
            node["variants"] = variants;
        }
        bases.push_back(std::move(node));
    }
    root["base_prompts"] = bases;
    return root.dump(2) + "\n";
}

} // namespace replikk
