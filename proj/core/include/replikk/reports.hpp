#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "replikk/baseline.hpp"
#include "replikk/corpus.hpp"
#include "replikk/fewshot.hpp"
#include "replikk/metrics.hpp"
#include "replikk/scoring.hpp"

namespace replikk {

// Writes via a sibling temp file and rename, so readers never observe a
// partial file and interrupted runs leave no torn output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Display rounding only: one decimal, e.g. 66.7. Stored values keep full
// precision.
std::string format_percent(double value);

// Everything a rerun needs to identify the run. No timestamps: outputs are
// byte-identical across reruns by design.
struct run_metadata {
    std::string command;
    std::string tool_version;
    std::string backend_id;  // empty when no backend involved
    std::string config_hash; // hex hash of the effective grid config
    // Ordered extras: seeds, counters, flag values.
    std::vector<std::pair<std::string, std::string>> fields;
};

std::string run_metadata_to_json(const run_metadata& meta);

// Zero-shot report serializations.
std::string run_report_to_json(const run_report& report);
std::string run_report_to_text(const run_report& report);

// Few-shot report and per-run audit manifests.
std::string few_shot_report_to_json(const few_shot_report& report);
std::string few_shot_report_to_text(const few_shot_report& report);
std::string few_shot_manifest_to_json(const few_shot_run_manifest& manifest);

// Predictions, one JSON object per line.
std::string predictions_to_jsonl(const std::vector<prediction>& predictions,
                                 eval_mode mode);

// A predictions file regrouped by (prompt, method, mode).
struct prediction_group {
    std::string prompt_code;
    std::string method;
    std::string mode;
    rating_map labels; // sentence id -> predicted label
};

std::vector<prediction_group> load_predictions(const std::string& path);

// Agreement serializations.
std::string kappa_matrix_to_json(const kappa_matrix& matrix);
std::string kappa_matrix_to_text(const kappa_matrix& matrix);
std::string agreement_table_to_json(const agreement_table& table);
std::string agreement_table_to_text(const agreement_table& table);

// Split distribution table (rows train/test/total).
std::string distribution_to_json(const class_distribution& train,
                                 const class_distribution& test);
std::string distribution_to_text(const class_distribution& train,
                                 const class_distribution& test);

// Baseline report.
struct baseline_report {
    nb_eval four_class;
    nb_eval binary{0.0, 0.0, confusion_matrix::binary()};
    double random_four_class = 0.0; // closed form, percent
    double random_binary = 0.0;
    std::size_t vocab_size = 0;
    std::vector<std::string> removed_top;
};

std::string baseline_report_to_json(const baseline_report& report);
std::string baseline_report_to_text(const baseline_report& report);

// Re-renders any of the JSON report artifacts above as its text table,
// recognizing the artifact kind by shape. Throws data_error on unknown
// shapes.
std::string render_text_from_json(const std::string& json_text);

} // namespace replikk
