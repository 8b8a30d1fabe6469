#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "replikk/corpus.hpp"
#include "replikk/labels.hpp"
#include "replikk/metrics.hpp"

namespace replikk {

struct vocabulary {
    // Kept tokens, lexicographically sorted.
    std::vector<std::string> tokens;
    // The removed most-frequent tokens, in removal order (count descending,
    // ties broken toward the lexicographically smaller token).
    std::vector<std::string> removed_top;
};

// Case-folds (optional), whitespace-tokenizes, counts, and drops the top_k
// most frequent tokens. top_k larger than the distinct count removes
// everything.
vocabulary build_vocab(const std::vector<labeled_sentence>& train, std::size_t top_k = 20,
                       bool fold = true);

// Multinomial naive Bayes with add-alpha smoothing. Token log-likelihoods
// are defined for every vocabulary token in every class present in train:
// log((count + alpha) / (class_total + alpha * |V|)).
struct nb_model {
    double smoothing = 1.0;
    bool fold_case = true;
    vocabulary vocab;
    std::vector<sentiment_label> classes; // canonical order, classes seen in train
    std::map<sentiment_label, double> class_log_priors;
    std::map<sentiment_label, std::unordered_map<std::string, double>> token_log_likelihood;
};

nb_model train_nb(const std::vector<labeled_sentence>& train, double smoothing = 1.0,
                  std::size_t top_k = 20, bool fold = true);

// Log-posterior (up to the shared evidence term) per class, canonical order.
// Tokens outside the vocabulary are ignored.
std::vector<std::pair<sentiment_label, double>> nb_log_posteriors(const nb_model& model,
                                                                  const std::string& text);

// Argmax prediction; allowed (when non-empty) restricts the candidate
// classes. Ties resolve to the earliest class in canonical order.
sentiment_label predict_nb(const nb_model& model, const std::string& text,
                           const std::vector<sentiment_label>& allowed = {});

struct nb_eval {
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    confusion_matrix matrix = confusion_matrix::four_class();
};

// Evaluates a trained model. Binary mode keeps only pos/neg test sentences
// and restricts predictions to those classes.
nb_eval evaluate_nb(const nb_model& model, const std::vector<labeled_sentence>& test,
                    bool binary);

// Versioned JSON round-trip.
void save_nb(const nb_model& model, const std::string& path);
nb_model load_nb(const std::string& path);

// Monte Carlo estimate of the uniform random baseline: repetitions
// independent passes over the gold labels, each item assigned a uniform
// class from label_set; returns mean and population std of the per-pass
// macro-F1. The closed form is random_baseline_macro_f1 in metrics.
mean_std mc_random_baseline(const std::map<sentiment_label, std::size_t>& gold_counts,
                            const std::vector<sentiment_label>& label_set,
                            std::size_t repetitions, std::uint64_t seed);

} // namespace replikk
