#pragma once

// Shared fixtures for the test binaries: synthetic corpora with controlled
// class distributions, a separable two-class corpus for the naive Bayes
// checks, a controlled-disagreement rater fixture, scratch directories, and
// a small subprocess runner for driving the CLI.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <replikk/corpus.hpp>
#include <replikk/labels.hpp>
#include <replikk/metrics.hpp>

namespace replikk::testsupport {

// Deterministic corpus with the requested per-class counts, classes
// interleaved round-robin. Texts are unique and terminated so no text is a
// substring of any other (the oracle backend relies on that).
corpus make_corpus(const std::map<sentiment_label, std::size_t>& counts,
                   std::uint64_t variant = 0);

// Convenience: n sentences per class, all four classes.
corpus make_balanced_corpus(std::size_t per_class, std::uint64_t variant = 0);

// A corpus shaped like the published split: train 1396/1753/476/220 and
// test 1396/1755/477/220 for pos/neg/neut/mix, with the split assignment
// embedded. Note the negative class differs by 2 across the sides.
corpus published_distribution_corpus();

// Two-class corpus whose class vocabularies stay disjoint after top-20
// removal. Every sentence carries its class's ten common filler tokens
// (exactly the 20 removed grid-wide) plus three rare tokens shared only
// between one train sentence and its held-out counterpart, so a multinomial
// NB classifies the held-out half perfectly.
struct disjoint_corpus {
    std::vector<labeled_sentence> train;
    std::vector<labeled_sentence> test;
};
disjoint_corpus make_disjoint_vocab_corpus(std::size_t pairs_per_class = 20);

// Six raters over a 150-item pool with uniform 3-class marginals. Raters
// a2..a4 disagree with a1 on 3/6/9 items via label rotation (which keeps
// marginals uniform), a6 duplicates a1, and a5 labels a disjoint 10-item
// pool. With uniform marginals kappa = (p_o - 1/3)/(2/3), so the designed
// pairwise values are a1-a2 0.97, a1-a3 0.94, a1-a4 0.91, a1-a6 1.0.
std::map<std::string, rating_map> make_rater_fixture();

// The same fixture embedded in a corpus: one sentence per rated item, gold =
// a1's label, annotator_labels holding every rater's vote for that item.
corpus make_annotated_corpus();

// Scratch directory under the system temp root; removed on destruction.
class temp_dir {
  public:
    explicit temp_dir(const std::string& hint);
    ~temp_dir();
    temp_dir(const temp_dir&) = delete;
    temp_dir& operator=(const temp_dir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const;

  private:
    std::filesystem::path path_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

struct command_result {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs a shell command with stdout/stderr captured. POSIX only.
command_result run_command(const std::string& command);

} // namespace replikk::testsupport
