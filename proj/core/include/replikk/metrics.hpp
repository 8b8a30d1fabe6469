#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "replikk/labels.hpp"

namespace replikk {

// Confusion counts over a fixed label set. The label set is part of the
// matrix identity: four-class and binary evaluations never mix.
class confusion_matrix {
  public:
    explicit confusion_matrix(std::vector<sentiment_label> label_set);

    static confusion_matrix four_class();
    static confusion_matrix binary();

    void add(sentiment_label gold, sentiment_label predicted);

    const std::vector<sentiment_label>& label_set() const { return labels_; }
    std::size_t total() const { return total_; }
    std::size_t count(sentiment_label gold, sentiment_label predicted) const;
    std::size_t gold_count(sentiment_label label) const;
    std::size_t predicted_count(sentiment_label label) const;

    // Percentages in [0, 100]. Classes with an undefined F1 (zero
    // denominator) contribute 0 and stay in the average.
    double per_class_f1(sentiment_label label) const;
    double macro_f1() const;
    double accuracy() const;

  private:
    std::size_t index_of(sentiment_label label) const;

    std::vector<sentiment_label> labels_;
    std::vector<std::size_t> counts_; // row-major, gold x predicted
    std::size_t total_ = 0;
};

// Closed-form macro-F1 of a uniform random classifier against gold counts.
// For class c with n_c instances out of N, K classes in the label set:
// precision = n_c / N, recall = 1 / K, so F1_c = 2 n_c / (K n_c + N).
// Classes in the label set with n_c = 0 contribute 0. Returns a percentage.
double random_baseline_macro_f1(const std::map<sentiment_label, std::size_t>& gold_counts,
                                const std::vector<sentiment_label>& label_set);

// Unweighted Cohen's kappa between two equal-length ratings sequences.
// Degenerate case: expected agreement 1 returns 1.0 when the ratings agree
// everywhere and 0.0 otherwise.
double cohens_kappa(std::span<const sentiment_label> a, std::span<const sentiment_label> b);

struct kappa_cell {
    double value = 0.0;
    std::size_t overlap = 0; // items both raters labeled
};

// Pairwise kappa over raters; entries are absent (not zero) when two raters
// share no items. Symmetric with a unit diagonal.
struct kappa_matrix {
    std::vector<std::string> raters;
    std::vector<std::vector<std::optional<kappa_cell>>> cells;

    const std::optional<kappa_cell>& at(std::size_t row, std::size_t col) const {
        return cells[row][col];
    }
};

using rating_map = std::map<std::string, sentiment_label>; // item id -> label

kappa_matrix build_kappa_matrix(const std::map<std::string, rating_map>& raters);

// Model-vs-annotator agreement: one row per model configuration, one column
// per annotator, kappa computed on the items that annotator labeled and the
// model predicted. Labels outside allowed_labels (e.g. a four-class
// annotation in a binary comparison) drop the item from the overlap.
struct agreement_table {
    std::vector<std::string> annotators;
    std::vector<std::string> configs;
    // configs x annotators; absent when overlap is empty.
    std::vector<std::vector<std::optional<kappa_cell>>> cells;
};

agreement_table model_vs_annotators(
    const std::vector<std::pair<std::string, rating_map>>& model_runs,
    const std::map<std::string, rating_map>& annotators,
    const std::vector<sentiment_label>& allowed_labels);

struct mean_std {
    double mean = 0.0;
    double std_pop = 0.0; // population standard deviation
};

mean_std compute_mean_std(std::span<const double> values);

} // namespace replikk
