#include "replikk/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "replikk/errors.hpp"
#include "replikk/rng.hpp"
#include "replikk/text.hpp"

namespace replikk {

using nlohmann::json;

namespace {

std::vector<std::string> tokenize_text(const std::string& text, bool fold) {
    return whitespace_tokenize(fold ? fold_case(text) : text);
}

} // namespace

vocabulary build_vocab(const std::vector<labeled_sentence>& train, std::size_t top_k,
                       bool fold) {
    if (train.empty()) throw data_error("cannot build a vocabulary from an empty corpus");

    std::map<std::string, std::size_t> counts;
    for (const labeled_sentence& sentence : train) {
        for (const std::string& token : tokenize_text(sentence.text, fold)) {
            ++counts[token];
        }
    }

    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    vocabulary vocab;
    std::size_t removed = std::min(top_k, ranked.size());
    vocab.removed_top.reserve(removed);
    for (std::size_t i = 0; i < removed; ++i) vocab.removed_top.push_back(ranked[i].first);
    vocab.tokens.reserve(ranked.size() - removed);
    for (std::size_t i = removed; i < ranked.size(); ++i) {
        vocab.tokens.push_back(ranked[i].first);
    }
    std::sort(vocab.tokens.begin(), vocab.tokens.end());
    return vocab;
}

nb_model train_nb(const std::vector<labeled_sentence>& train, double smoothing,
                  std::size_t top_k, bool fold) {
    if (smoothing <= 0.0) throw config_error("nb smoothing must be > 0");
    nb_model model;
    model.smoothing = smoothing;
    model.fold_case = fold;
    model.vocab = build_vocab(train, top_k, fold);

    std::map<sentiment_label, std::size_t> class_sentences;
    std::map<sentiment_label, std::unordered_map<std::string, std::size_t>> class_counts;
    std::map<sentiment_label, std::size_t> class_totals;

    std::unordered_map<std::string, bool> in_vocab;
    in_vocab.reserve(model.vocab.tokens.size() * 2);
    for (const std::string& token : model.vocab.tokens) in_vocab[token] = true;

    for (const labeled_sentence& sentence : train) {
        ++class_sentences[sentence.gold];
        for (const std::string& token : tokenize_text(sentence.text, fold)) {
            if (!in_vocab.count(token)) continue;
            ++class_counts[sentence.gold][token];
            ++class_totals[sentence.gold];
        }
    }

    double total_sentences = static_cast<double>(train.size());
    double vocab_size = static_cast<double>(model.vocab.tokens.size());
    for (sentiment_label label : canonical_labels) {
        auto it = class_sentences.find(label);
        if (it == class_sentences.end()) continue;
        model.classes.push_back(label);
        model.class_log_priors[label] =
            std::log(static_cast<double>(it->second) / total_sentences);
        double denom = static_cast<double>(class_totals[label]) + smoothing * vocab_size;
        std::unordered_map<std::string, double>& likelihood =
            model.token_log_likelihood[label];
        likelihood.reserve(model.vocab.tokens.size() * 2);
        const auto& counts = class_counts[label];
        for (const std::string& token : model.vocab.tokens) {
            auto count_it = counts.find(token);
            double count = count_it == counts.end()
                               ? 0.0
                               : static_cast<double>(count_it->second);
            likelihood[token] = std::log((count + smoothing) / denom);
        }
    }
    return model;
}

std::vector<std::pair<sentiment_label, double>> nb_log_posteriors(const nb_model& model,
                                                                  const std::string& text) {
    std::vector<std::string> tokens = tokenize_text(text, model.fold_case);
    std::vector<std::pair<sentiment_label, double>> scores;
    scores.reserve(model.classes.size());
    for (sentiment_label label : model.classes) {
        double score = model.class_log_priors.at(label);
        const auto& likelihood = model.token_log_likelihood.at(label);
        for (const std::string& token : tokens) {
            auto it = likelihood.find(token);
            if (it != likelihood.end()) score += it->second;
        }
        scores.emplace_back(label, score);
    }
    return scores;
}

sentiment_label predict_nb(const nb_model& model, const std::string& text,
                           const std::vector<sentiment_label>& allowed) {
    auto admitted = [&allowed](sentiment_label label) {
        if (allowed.empty()) return true;
        return std::find(allowed.begin(), allowed.end(), label) != allowed.end();
    };
    std::vector<std::pair<sentiment_label, double>> scores = nb_log_posteriors(model, text);
    bool found = false;
    sentiment_label best = sentiment_label::pos;
    double best_score = 0.0;
    for (const auto& [label, score] : scores) {
        if (!admitted(label)) continue;
        if (!found || score > best_score) {
            found = true;
            best = label;
            best_score = score;
        }
    }
    if (!found) throw data_error("nb prediction: no admissible class");
    return best;
}

nb_eval evaluate_nb(const nb_model& model, const std::vector<labeled_sentence>& test,
                    bool binary) {
    std::vector<labeled_sentence> subset = binary ? binary_subset(test) : test;
    if (subset.empty()) throw data_error("nb evaluation: empty test set");
    std::vector<sentiment_label> allowed;
    nb_eval eval;
    if (binary) {
        allowed = {binary_labels.begin(), binary_labels.end()};
        eval.matrix = confusion_matrix::binary();
    }
    for (const labeled_sentence& sentence : subset) {
        eval.matrix.add(sentence.gold, predict_nb(model, sentence.text, allowed));
    }
    eval.macro_f1 = eval.matrix.macro_f1();
    eval.accuracy = eval.matrix.accuracy();
    return eval;
}

namespace {

constexpr int nb_format_version = 1;

} // namespace

void save_nb(const nb_model& model, const std::string& path) {
    json root;
    root["format_version"] = nb_format_version;
    root["smoothing"] = model.smoothing;
    root["fold_case"] = model.fold_case;
    root["vocabulary"] = {{"tokens", model.vocab.tokens},
                          {"removed_top", model.vocab.removed_top}};
    json classes = json::array();
    for (sentiment_label label : model.classes) {
        json node;
        node["label"] = std::string(to_string(label));
        node["log_prior"] = model.class_log_priors.at(label);
        json likelihood = json::object();
        // Emit in vocabulary order for stable files.
        const auto& table = model.token_log_likelihood.at(label);
        for (const std::string& token : model.vocab.tokens) {
            likelihood[token] = table.at(token);
        }
        node["token_log_likelihood"] = std::move(likelihood);
        classes.push_back(std::move(node));
    }
    root["classes"] = classes;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open model file for writing: " + path);
    out << root.dump(2) << "\n";
    if (!out) throw data_error("write failed: " + path);
}

nb_model load_nb(const std::string& path) {
    std::ifstream input(path, std::ios::binary);
    if (!input) throw data_error("cannot open model file: " + path);
    json root;
    try {
        input >> root;
    } catch (const json::parse_error& e) {
        throw data_error("model file " + path + ": " + e.what());
    }
    if (root.value("format_version", -1) != nb_format_version) {
        throw data_error("model file " + path + ": unsupported format_version");
    }
    nb_model model;
    try {
        model.smoothing = root.at("smoothing").get<double>();
        model.fold_case = root.at("fold_case").get<bool>();
        model.vocab.tokens = root.at("vocabulary").at("tokens").get<std::vector<std::string>>();
        model.vocab.removed_top =
            root.at("vocabulary").at("removed_top").get<std::vector<std::string>>();
        for (const json& node : root.at("classes")) {
            sentiment_label label = parse_label(node.at("label").get<std::string>());
            model.classes.push_back(label);
            model.class_log_priors[label] = node.at("log_prior").get<double>();
            std::unordered_map<std::string, double>& table =
                model.token_log_likelihood[label];
            for (auto it = node.at("token_log_likelihood").begin();
                 it != node.at("token_log_likelihood").end(); ++it) {
                table[it.key()] = it.value().get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw data_error("model file " + path + ": " + e.what());
    }
    return model;
}

mean_std mc_random_baseline(const std::map<sentiment_label, std::size_t>& gold_counts,
                            const std::vector<sentiment_label>& label_set,
                            std::size_t repetitions, std::uint64_t seed) {
    if (repetitions == 0) throw config_error("monte carlo needs repetitions >= 1");
    std::vector<sentiment_label> gold;
    for (sentiment_label label : label_set) {
        auto it = gold_counts.find(label);
        if (it == gold_counts.end()) continue;
        gold.insert(gold.end(), it->second, label);
    }
    if (gold.empty()) throw data_error("monte carlo needs at least one instance");

    seeded_rng rng(seed);
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        confusion_matrix matrix{label_set};
        for (sentiment_label g : gold) {
            sentiment_label predicted =
                label_set[static_cast<std::size_t>(rng.bounded(label_set.size()))];
            matrix.add(g, predicted);
        }
        samples.push_back(matrix.macro_f1());
    }
    return compute_mean_std(samples);
}

} // namespace replikk
