#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "replikk/backend.hpp"
#include "replikk/corpus.hpp"
#include "replikk/metrics.hpp"
#include "replikk/promptgrid.hpp"
#include "replikk/scoring.hpp"

namespace replikk {

struct few_shot_example {
    std::string sentence_id;
    std::string query;    // rendered prompt for the example sentence
    std::string response; // reply text for the example's gold class
    sentiment_label label = sentiment_label::pos;
};

// Always exactly four demonstrations, one per class, in canonical order.
struct few_shot_context {
    std::array<few_shot_example, 4> examples;
    std::string target_query;
    std::string serialized; // demonstrations and target joined by the separator
};

struct few_shot_options {
    std::size_t runs = 5;
    std::uint64_t base_seed = 1;
    // Reply form used as the demonstration response.
    std::string response_form = "bare";
    std::size_t jobs = 1;
};

// Draws one train example per class for the given target sentence. The draw
// depends only on (seed, sentence_index) and train order: every prompt spec
// sees the same example ids. A class with no train sentences is a data
// error naming that class.
std::array<few_shot_example, 4> sample_examples(
    const std::vector<labeled_sentence>& train, std::uint64_t seed,
    std::size_t sentence_index, const prompt_spec& spec, const grid_config& config,
    const std::string& response_form);

few_shot_context build_context(const std::array<few_shot_example, 4>& examples,
                               const prompt_spec& spec, const grid_config& config,
                               const std::string& target_text);

struct few_shot_manifest_entry {
    std::string sentence_id;
    std::array<std::string, 4> example_ids; // canonical class order
    // prompt code -> hex hash of the serialized context
    std::map<std::string, std::string> context_hashes;
};

struct few_shot_run_manifest {
    std::uint64_t seed = 0;
    std::vector<few_shot_manifest_entry> entries; // test sentence order
};

struct few_shot_cell {
    std::string prompt_code;
    likelihood_method method = likelihood_method::l1_sum;
    std::vector<double> per_run_macro_f1;
    std::vector<double> per_run_accuracy;
    mean_std macro_f1_stats; // population std over runs
    mean_std accuracy_stats;
};

struct few_shot_report {
    eval_mode mode = eval_mode::four_class;
    std::size_t runs = 0;
    std::uint64_t base_seed = 0;
    std::size_t sentence_count = 0;
    std::vector<few_shot_cell> cells;
    std::size_t best_cell = 0; // by mean macro-F1, earliest on ties
    std::vector<few_shot_run_manifest> manifests;
};

// Multi-seed few-shot evaluation. Run r draws with seed base_seed + r.
// Demonstrations always cover all four classes (so train must contain each)
// even in binary mode, where only the candidate set is restricted.
few_shot_report run_fewshot(const std::vector<labeled_sentence>& test,
                            const std::vector<labeled_sentence>& train,
                            const std::vector<prompt_spec>& specs, const grid_config& config,
                            const std::vector<likelihood_method>& methods,
                            scorer_backend& backend, eval_mode mode,
                            const few_shot_options& options);

} // namespace replikk
