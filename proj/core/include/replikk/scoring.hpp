#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "replikk/backend.hpp"
#include "replikk/corpus.hpp"
#include "replikk/labels.hpp"
#include "replikk/metrics.hpp"
#include "replikk/promptgrid.hpp"

namespace replikk {

enum class likelihood_method { l1_sum, l2_per_token, l3_per_char };

inline constexpr std::array<likelihood_method, 3> all_methods = {
    likelihood_method::l1_sum,
    likelihood_method::l2_per_token,
    likelihood_method::l3_per_char,
};

std::string_view to_string(likelihood_method method);
likelihood_method parse_method(std::string_view text);

// A scored completion. n is the backend's token count; n_char counts the
// Unicode scalars of the completion text itself (separators inserted by the
// harness are not part of the completion and never counted).
struct completion_score {
    std::string completion;
    std::vector<token_logprob> tokens;
    std::size_t n = 0;
    std::size_t n_char = 0;
};

completion_score make_completion_score(const std::string& completion,
                                       std::vector<token_logprob> tokens);

// l1 = sum of token logprobs; l2 = l1 / n; l3 = l1 / n_char.
double l1(const completion_score& score);
double l2(const completion_score& score);
double l3(const completion_score& score);
double likelihood(const completion_score& score, likelihood_method method);

struct prediction {
    std::string sentence_id;
    std::string prompt_code;
    likelihood_method method = likelihood_method::l1_sum;
    std::string chosen_reply;
    sentiment_label label = sentiment_label::pos;
    // Reply text -> method score, in candidate order.
    std::vector<std::pair<std::string, double>> scores;
};

// Scores every candidate against the context in one backend batch.
std::vector<completion_score> score_candidates(const std::string& context,
                                               const std::vector<reply_candidate>& candidates,
                                               scorer_backend& backend);

// Argmax over candidates under the given method. class_filter restricts the
// search to candidates of those classes (empty = all). Ties go to the
// earliest candidate in generation order.
prediction select_prediction(const std::string& sentence_id, const std::string& prompt_code,
                             const std::vector<reply_candidate>& candidates,
                             const std::vector<completion_score>& scored,
                             likelihood_method method,
                             const std::vector<sentiment_label>& class_filter);

// Zero-shot classification of one sentence under one prompt spec.
prediction classify(const labeled_sentence& sentence, const prompt_spec& spec,
                    const std::vector<reply_candidate>& candidates, scorer_backend& backend,
                    likelihood_method method,
                    const std::vector<sentiment_label>& class_filter = {});

enum class eval_mode { four_class, binary };

std::string_view to_string(eval_mode mode);
eval_mode parse_eval_mode(std::string_view text);

struct cell_result {
    std::string prompt_code;
    likelihood_method method = likelihood_method::l1_sum;
    double macro_f1 = 0.0; // percent
    double accuracy = 0.0; // percent
    std::map<sentiment_label, std::size_t> predicted_counts;
    confusion_matrix matrix = confusion_matrix::four_class();
};

struct run_report {
    eval_mode mode = eval_mode::four_class;
    std::size_t sentence_count = 0;
    std::vector<cell_result> cells; // specs x methods, spec-major
    std::size_t best_cell = 0;      // index into cells, by macro-F1 then order
    // Predictions of the best cell, in sentence order.
    std::vector<prediction> best_predictions;
};

// Full zero-shot evaluation: every (prompt spec, method) pair becomes one
// cell. Each (sentence, spec) pair is scored once; the three methods reuse
// the same completion scores. Binary mode requires every gold label to be
// pos or neg and restricts candidates to those classes. jobs > 1 parallelizes
// over sentences without changing any result.
run_report evaluate_run(const std::vector<labeled_sentence>& sentences,
                        const std::vector<prompt_spec>& specs, const grid_config& config,
                        const std::vector<likelihood_method>& methods,
                        scorer_backend& backend, eval_mode mode, std::size_t jobs = 1);

} // namespace replikk
