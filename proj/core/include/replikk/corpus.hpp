#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "replikk/labels.hpp"

namespace replikk {

enum class split_tag { train, test };

std::string_view to_string(split_tag tag);
split_tag parse_split_tag(std::string_view text);

struct labeled_sentence {
    std::string id;
    std::string text;
    sentiment_label gold = sentiment_label::pos;
    std::optional<intensity_level> intensity;
    // annotator id -> that annotator's label for this sentence. Empty for
    // sentences only one person saw.
    std::map<std::string, sentiment_label> annotator_labels;
    std::string comment_id;
};

struct corpus {
    std::vector<labeled_sentence> sentences;
    // Present only after a split was made or loaded. When present it covers
    // every sentence id exactly once.
    std::map<std::string, split_tag> split_assignment;

    bool has_split() const { return !split_assignment.empty(); }
    std::vector<labeled_sentence> subset(split_tag tag) const;
};

// One JSON object per line. Required fields: id, text, gold. Optional:
// intensity, annotator_labels, comment_id, split. Errors carry the 1-based
// line number. Duplicate ids and unknown labels are data errors. If any
// record carries a split field, all records must.
corpus load_corpus(const std::string& path);

// Inverse of load_corpus for the given subset of fields; writes records in
// sentence order, one per line. with_split controls whether the assignment
// (if any) is embedded in each record.
void save_corpus(const std::string& path, const corpus& corpus_data, bool with_split);

using class_distribution = std::map<sentiment_label, std::size_t>;

class_distribution distribution_of(const std::vector<labeled_sentence>& sentences);

// Seeded, deterministic, stratified 50/50 split. Within each class the
// per-side difference is at most 1 (odd counts put the extra sentence in
// TEST). Returns a copy of the input corpus with split_assignment filled.
corpus stratified_split(const corpus& corpus_data, std::uint64_t seed);

// Checks an externally provided assignment: total partition, and per-class
// |train - test| <= tolerance. Throws data_error with the offending class
// otherwise. The default tolerance of 2 accepts hand-adjusted splits that
// moved one sentence across.
void validate_split(const corpus& corpus_data, std::size_t tolerance = 2);

// Sentences whose gold label is pos or neg, order preserved.
std::vector<labeled_sentence> binary_subset(const std::vector<labeled_sentence>& sentences);

} // namespace replikk
