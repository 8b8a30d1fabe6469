#include "replikk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "replikk/errors.hpp"

namespace replikk {

confusion_matrix::confusion_matrix(std::vector<sentiment_label> label_set)
    : labels_(std::move(label_set)) {
    if (labels_.empty()) throw data_error("confusion matrix needs a non-empty label set");
    std::set<sentiment_label> unique(labels_.begin(), labels_.end());
    if (unique.size() != labels_.size()) {
        throw data_error("confusion matrix label set has duplicates");
    }
    counts_.assign(labels_.size() * labels_.size(), 0);
}

confusion_matrix confusion_matrix::four_class() {
    return confusion_matrix({canonical_labels.begin(), canonical_labels.end()});
}

confusion_matrix confusion_matrix::binary() {
    return confusion_matrix({binary_labels.begin(), binary_labels.end()});
}

std::size_t confusion_matrix::index_of(sentiment_label label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) return i;
    }
    std::ostringstream msg;
    msg << "label " << to_string(label) << " is outside this matrix's label set";
    throw data_error(msg.str());
}

void confusion_matrix::add(sentiment_label gold, sentiment_label predicted) {
    ++counts_[index_of(gold) * labels_.size() + index_of(predicted)];
    ++total_;
}

std::size_t confusion_matrix::count(sentiment_label gold, sentiment_label predicted) const {
    return counts_[index_of(gold) * labels_.size() + index_of(predicted)];
}

std::size_t confusion_matrix::gold_count(sentiment_label label) const {
    std::size_t row = index_of(label);
    std::size_t sum = 0;
    for (std::size_t col = 0; col < labels_.size(); ++col) {
        sum += counts_[row * labels_.size() + col];
    }
    return sum;
}

std::size_t confusion_matrix::predicted_count(sentiment_label label) const {
    std::size_t col = index_of(label);
    std::size_t sum = 0;
    for (std::size_t row = 0; row < labels_.size(); ++row) {
        sum += counts_[row * labels_.size() + col];
    }
    return sum;
}

double confusion_matrix::per_class_f1(sentiment_label label) const {
    std::size_t tp = count(label, label);
    std::size_t denom = gold_count(label) + predicted_count(label);
    if (denom == 0) return 0.0;
    return 100.0 * 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double confusion_matrix::macro_f1() const {
    double sum = 0.0;
    for (sentiment_label label : labels_) sum += per_class_f1(label);
    return sum / static_cast<double>(labels_.size());
}

double confusion_matrix::accuracy() const {
    if (total_ == 0) return 0.0;
    std::size_t correct = 0;
    for (sentiment_label label : labels_) correct += count(label, label);
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total_);
}

double random_baseline_macro_f1(const std::map<sentiment_label, std::size_t>& gold_counts,
                                const std::vector<sentiment_label>& label_set) {
    if (label_set.empty()) throw data_error("random baseline needs a non-empty label set");
    std::size_t n = 0;
    for (sentiment_label label : label_set) {
        auto it = gold_counts.find(label);
        if (it != gold_counts.end()) n += it->second;
    }
    if (n == 0) throw data_error("random baseline needs at least one instance");
    double k = static_cast<double>(label_set.size());
    double sum = 0.0;
    for (sentiment_label label : label_set) {
        auto it = gold_counts.find(label);
        double n_c = it == gold_counts.end() ? 0.0 : static_cast<double>(it->second);
        if (n_c > 0.0) {
            sum += 2.0 * n_c / (k * n_c + static_cast<double>(n));
        }
    }
    return 100.0 * sum / k;
}

double cohens_kappa(std::span<const sentiment_label> a, std::span<const sentiment_label> b) {
    if (a.size() != b.size()) throw data_error("kappa: rating sequences differ in length");
    if (a.empty()) throw data_error("kappa: empty rating sequences");

    double n = static_cast<double>(a.size());
    std::map<sentiment_label, std::size_t> marg_a;
    std::map<sentiment_label, std::size_t> marg_b;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++marg_a[a[i]];
        ++marg_b[b[i]];
        if (a[i] == b[i]) ++agree;
    }
    double p_o = static_cast<double>(agree) / n;
    double p_e = 0.0;
    for (const auto& [label, count_a] : marg_a) {
        auto it = marg_b.find(label);
        if (it == marg_b.end()) continue;
        p_e += (static_cast<double>(count_a) / n) * (static_cast<double>(it->second) / n);
    }
    if (p_e >= 1.0) {
        // Both raters constant on the same label: perfect agreement by
        // convention; constant but different would have p_e < 1.
        return p_o >= 1.0 ? 1.0 : 0.0;
    }
    return (p_o - p_e) / (1.0 - p_e);
}

namespace {

std::optional<kappa_cell> paired_kappa(const rating_map& a, const rating_map& b) {
    std::vector<sentiment_label> left;
    std::vector<sentiment_label> right;
    for (const auto& [item, label] : a) {
        auto it = b.find(item);
        if (it == b.end()) continue;
        left.push_back(label);
        right.push_back(it->second);
    }
    if (left.empty()) return std::nullopt;
    return kappa_cell{cohens_kappa(left, right), left.size()};
}

} // namespace

kappa_matrix build_kappa_matrix(const std::map<std::string, rating_map>& raters) {
    kappa_matrix out;
    for (const auto& [name, ratings] : raters) {
        (void)ratings;
        out.raters.push_back(name);
    }
    std::size_t n = out.raters.size();
    out.cells.assign(n, std::vector<std::optional<kappa_cell>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const rating_map& a = raters.at(out.raters[i]);
        out.cells[i][i] = kappa_cell{1.0, a.size()};
        for (std::size_t j = i + 1; j < n; ++j) {
            const rating_map& b = raters.at(out.raters[j]);
            std::optional<kappa_cell> cell = paired_kappa(a, b);
            out.cells[i][j] = cell;
            out.cells[j][i] = cell;
        }
    }
    return out;
}

agreement_table model_vs_annotators(
    const std::vector<std::pair<std::string, rating_map>>& model_runs,
    const std::map<std::string, rating_map>& annotators,
    const std::vector<sentiment_label>& allowed_labels) {
    auto allowed = [&allowed_labels](sentiment_label label) {
        return std::find(allowed_labels.begin(), allowed_labels.end(), label) !=
               allowed_labels.end();
    };

    agreement_table out;
    for (const auto& [name, ratings] : annotators) {
        (void)ratings;
        out.annotators.push_back(name);
    }
    for (const auto& [config, predictions] : model_runs) {
        out.configs.push_back(config);
        std::vector<std::optional<kappa_cell>> row;
        for (const std::string& annotator : out.annotators) {
            const rating_map& human = annotators.at(annotator);
            std::vector<sentiment_label> left;
            std::vector<sentiment_label> right;
            for (const auto& [item, human_label] : human) {
                auto it = predictions.find(item);
                if (it == predictions.end()) continue;
                if (!allowed(human_label) || !allowed(it->second)) continue;
                left.push_back(it->second);
                right.push_back(human_label);
            }
            if (left.empty()) {
                row.emplace_back(std::nullopt);
            } else {
                row.emplace_back(kappa_cell{cohens_kappa(left, right), left.size()});
            }
        }
        out.cells.push_back(std::move(row));
    }
    return out;
}

mean_std compute_mean_std(std::span<const double> values) {
    if (values.empty()) throw data_error("mean/std of empty sequence");
    double sum = 0.0;
    for (double v : values) sum += v;
    double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return mean_std{mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

} // namespace replikk
