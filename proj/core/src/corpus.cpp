#include "replikk/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "replikk/errors.hpp"
#include "replikk/rng.hpp"
#include "replikk/text.hpp"

namespace replikk {

using nlohmann::json;

std::string_view to_string(split_tag tag) {
    return tag == split_tag::train ? "train" : "test";
}

split_tag parse_split_tag(std::string_view text) {
    if (text == "train") return split_tag::train;
    if (text == "test") return split_tag::test;
    throw data_error("unknown split tag '" + std::string(text) +
                     "' (expected train or test)");
}

std::vector<labeled_sentence> corpus::subset(split_tag tag) const {
    if (!has_split()) throw data_error("corpus has no split assignment");
    std::vector<labeled_sentence> out;
    for (const auto& sentence : sentences) {
        auto it = split_assignment.find(sentence.id);
        if (it == split_assignment.end()) {
            throw data_error("sentence '" + sentence.id + "' missing from split assignment");
        }
        if (it->second == tag) out.push_back(sentence);
    }
    return out;
}

namespace {

labeled_sentence parse_record(const json& record, std::size_t line_no,
                              std::optional<split_tag>& split_out) {
    auto fail = [line_no](const std::string& what) -> data_error {
        std::ostringstream msg;
        msg << "line " << line_no << ": " << what;
        return data_error(msg.str());
    };

    if (!record.is_object()) throw fail("record is not a JSON object");

    labeled_sentence sentence;
    try {
        sentence.id = record.at("id").get<std::string>();
        sentence.text = record.at("text").get<std::string>();
        sentence.gold = parse_label(record.at("gold").get<std::string>());
    } catch (const json::exception& e) {
        throw fail(std::string("missing or malformed required field: ") + e.what());
    } catch (const data_error& e) {
        throw fail(e.what());
    }
    if (sentence.id.empty()) throw fail("empty id");
    if (trim(sentence.text).empty()) throw fail("empty text");

    try {
        if (record.contains("intensity") && !record["intensity"].is_null()) {
            sentence.intensity = parse_intensity(record["intensity"].get<std::string>());
        }
        if (record.contains("annotator_labels")) {
            const json& labels = record["annotator_labels"];
            if (!labels.is_object()) throw fail("annotator_labels is not an object");
            for (auto it = labels.begin(); it != labels.end(); ++it) {
                sentence.annotator_labels[it.key()] =
                    parse_label(it.value().get<std::string>());
            }
        }
        if (record.contains("comment_id") && !record["comment_id"].is_null()) {
            sentence.comment_id = record["comment_id"].get<std::string>();
        }
        if (record.contains("split") && !record["split"].is_null()) {
            split_out = parse_split_tag(record["split"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw fail(std::string("malformed optional field: ") + e.what());
    } catch (const data_error& e) {
        throw fail(e.what());
    }
    return sentence;
}

} // namespace

corpus load_corpus(const std::string& path) {
    std::ifstream input(path);
    if (!input) throw data_error("cannot open corpus file: " + path);

    corpus out;
    std::set<std::string> seen_ids;
    std::size_t with_split = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            std::ostringstream msg;
            msg << "line " << line_no << ": JSON parse error: " << e.what();
            throw data_error(msg.str());
        }
        std::optional<split_tag> split;
        labeled_sentence sentence = parse_record(record, line_no, split);
        if (!seen_ids.insert(sentence.id).second) {
            std::ostringstream msg;
            msg << "line " << line_no << ": duplicate sentence id '" << sentence.id << "'";
            throw data_error(msg.str());
        }
        if (split) {
            out.split_assignment[sentence.id] = *split;
            ++with_split;
        }
        out.sentences.push_back(std::move(sentence));
    }
    if (with_split != 0 && with_split != out.sentences.size()) {
        throw data_error("split field present on some records but not all in " + path);
    }
    return out;
}

void save_corpus(const std::string& path, const corpus& corpus_data, bool with_split) {
    std::ostringstream out;
    for (const auto& sentence : corpus_data.sentences) {
        json record;
        record["id"] = sentence.id;
        record["text"] = sentence.text;
        record["gold"] = std::string(to_string(sentence.gold));
        if (sentence.intensity) {
            record["intensity"] = std::string(to_string(*sentence.intensity));
        }
        if (!sentence.annotator_labels.empty()) {
            json labels = json::object();
            for (const auto& [rater, label] : sentence.annotator_labels) {
                labels[rater] = std::string(to_string(label));
            }
            record["annotator_labels"] = labels;
        }
        if (!sentence.comment_id.empty()) record["comment_id"] = sentence.comment_id;
        if (with_split) {
            auto it = corpus_data.split_assignment.find(sentence.id);
            if (it == corpus_data.split_assignment.end()) {
                throw data_error("sentence '" + sentence.id + "' missing from split assignment");
            }
            record["split"] = std::string(to_string(it->second));
        }
        out << record.dump() << "\n";
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw data_error("cannot open file for writing: " + path);
    file << out.str();
    if (!file) throw data_error("write failed: " + path);
}

class_distribution distribution_of(const std::vector<labeled_sentence>& sentences) {
    class_distribution dist;
    for (sentiment_label label : canonical_labels) dist[label] = 0;
    for (const auto& sentence : sentences) ++dist[sentence.gold];
    return dist;
}

corpus stratified_split(const corpus& corpus_data, std::uint64_t seed) {
    corpus out = corpus_data;
    out.split_assignment.clear();

    std::map<sentiment_label, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < out.sentences.size(); ++i) {
        by_class[out.sentences[i].gold].push_back(i);
    }

    // Independent stream per class so adding sentences of one class never
    // perturbs the other classes' assignments.
    for (sentiment_label label : canonical_labels) {
        auto it = by_class.find(label);
        if (it == by_class.end()) continue;
        std::vector<std::size_t>& indices = it->second;
        seeded_rng rng(derive_seed({seed, static_cast<std::uint64_t>(label)}));
        rng.shuffle(indices);
        // First half goes to train; the odd leftover lands in test.
        std::size_t train_count = indices.size() / 2;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            const std::string& id = out.sentences[indices[k]].id;
            out.split_assignment[id] = k < train_count ? split_tag::train : split_tag::test;
        }
    }
    return out;
}

void validate_split(const corpus& corpus_data, std::size_t tolerance) {
    if (!corpus_data.has_split()) throw data_error("corpus has no split assignment");

    std::set<std::string> ids;
    for (const auto& sentence : corpus_data.sentences) ids.insert(sentence.id);
    for (const auto& [id, tag] : corpus_data.split_assignment) {
        (void)tag;
        if (!ids.count(id)) {
            throw data_error("split assignment names unknown sentence id '" + id + "'");
        }
    }
    for (const auto& sentence : corpus_data.sentences) {
        if (!corpus_data.split_assignment.count(sentence.id)) {
            throw data_error("sentence '" + sentence.id + "' missing from split assignment");
        }
    }

    class_distribution train_dist = distribution_of(corpus_data.subset(split_tag::train));
    class_distribution test_dist = distribution_of(corpus_data.subset(split_tag::test));
    for (sentiment_label label : canonical_labels) {
        std::size_t a = train_dist[label];
        std::size_t b = test_dist[label];
        std::size_t diff = a > b ? a - b : b - a;
        if (diff > tolerance) {
            std::ostringstream msg;
            msg << "split imbalance for class " << to_string(label) << ": train=" << a
                << " test=" << b << " exceeds tolerance " << tolerance;
            throw data_error(msg.str());
        }
    }
}

std::vector<labeled_sentence> binary_subset(const std::vector<labeled_sentence>& sentences) {
    std::vector<labeled_sentence> out;
    for (const auto& sentence : sentences) {
        if (sentence.gold == sentiment_label::pos || sentence.gold == sentiment_label::neg) {
            out.push_back(sentence);
        }
    }
    return out;
}

} // namespace replikk
