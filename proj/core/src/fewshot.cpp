#include "replikk/fewshot.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "replikk/errors.hpp"
#include "replikk/rng.hpp"
#include "replikk/text.hpp"

namespace replikk {

namespace {

using class_index = std::map<sentiment_label, std::vector<std::size_t>>;

class_index build_class_index(const std::vector<labeled_sentence>& train) {
    class_index index;
    for (std::size_t i = 0; i < train.size(); ++i) {
        index[train[i].gold].push_back(i);
    }
    for (sentiment_label label : canonical_labels) {
        if (!index.count(label) || index[label].empty()) {
            throw data_error("few-shot sampling: train split has no sentences of class " +
                             std::string(to_string(label)));
        }
    }
    return index;
}

const std::string& response_text(const std::vector<reply_candidate>& candidates,
                                 const std::string& form, sentiment_label label) {
    for (const reply_candidate& candidate : candidates) {
        if (candidate.form == form && candidate.label == label) return candidate.text;
    }
    throw config_error("few-shot response form '" + form + "' has no candidate for class " +
                       std::string(to_string(label)));
}

// Same draw for every spec: one bounded draw per class, canonical order.
std::array<std::size_t, 4> draw_indices(const class_index& index, std::uint64_t seed,
                                        std::size_t sentence_index) {
    seeded_rng rng(derive_seed({seed, sentence_index}));
    std::array<std::size_t, 4> out{};
    for (std::size_t c = 0; c < canonical_labels.size(); ++c) {
        const std::vector<std::size_t>& pool = index.at(canonical_labels[c]);
        out[c] = pool[static_cast<std::size_t>(rng.bounded(pool.size()))];
    }
    return out;
}

std::array<few_shot_example, 4> make_examples(
    const std::vector<labeled_sentence>& train, const std::array<std::size_t, 4>& picks,
    const prompt_spec& spec, const std::vector<reply_candidate>& candidates,
    const std::string& response_form) {
    std::array<few_shot_example, 4> out;
    for (std::size_t c = 0; c < canonical_labels.size(); ++c) {
        const labeled_sentence& sentence = train[picks[c]];
        few_shot_example example;
        example.sentence_id = sentence.id;
        example.label = canonical_labels[c];
        example.query = render_prompt(spec, sentence.text);
        example.response = response_text(candidates, response_form, canonical_labels[c]);
        out[c] = std::move(example);
    }
    return out;
}

} // namespace

std::array<few_shot_example, 4> sample_examples(
    const std::vector<labeled_sentence>& train, std::uint64_t seed,
    std::size_t sentence_index, const prompt_spec& spec, const grid_config& config,
    const std::string& response_form) {
    class_index index = build_class_index(train);
    std::array<std::size_t, 4> picks = draw_indices(index, seed, sentence_index);
    std::vector<reply_candidate> candidates = generate_replies(spec, config);
    return make_examples(train, picks, spec, candidates, response_form);
}

few_shot_context build_context(const std::array<few_shot_example, 4>& examples,
                               const prompt_spec& spec, const grid_config& config,
                               const std::string& target_text) {
    few_shot_context context;
    context.examples = examples;
    context.target_query = render_prompt(spec, target_text);
    std::string serialized;
    for (const few_shot_example& example : examples) {
        serialized += example.query;
        serialized += config.separator;
        serialized += example.response;
        serialized += config.separator;
    }
    serialized += context.target_query;
    if (config.trailing_separator) serialized += config.separator;
    context.serialized = std::move(serialized);
    return context;
}

few_shot_report run_fewshot(const std::vector<labeled_sentence>& test,
                            const std::vector<labeled_sentence>& train,
                            const std::vector<prompt_spec>& specs, const grid_config& config,
                            const std::vector<likelihood_method>& methods,
                            scorer_backend& backend, eval_mode mode,
                            const few_shot_options& options) {
    if (test.empty()) throw data_error("few-shot evaluation needs test sentences");
    if (specs.empty()) throw config_error("few-shot evaluation needs prompt specs");
    if (methods.empty()) throw config_error("few-shot evaluation needs methods");
    if (options.runs == 0) throw config_error("few-shot evaluation needs runs >= 1");

    std::vector<sentiment_label> class_filter;
    std::vector<sentiment_label> label_set;
    if (mode == eval_mode::binary) {
        for (const labeled_sentence& sentence : test) {
            if (sentence.gold != sentiment_label::pos &&
                sentence.gold != sentiment_label::neg) {
                throw data_error("binary evaluation: sentence '" + sentence.id +
                                 "' has gold label " +
                                 std::string(to_string(sentence.gold)));
            }
        }
        class_filter = {binary_labels.begin(), binary_labels.end()};
        label_set = class_filter;
    } else {
        label_set = {canonical_labels.begin(), canonical_labels.end()};
    }

    class_index index = build_class_index(train);
    std::vector<std::vector<reply_candidate>> candidates_per_spec;
    candidates_per_spec.reserve(specs.size());
    for (const prompt_spec& spec : specs) {
        candidates_per_spec.push_back(generate_replies(spec, config));
        // Fail before any backend traffic if the response form is missing.
        response_text(candidates_per_spec.back(), options.response_form,
                      sentiment_label::pos);
    }

    few_shot_report report;
    report.mode = mode;
    report.runs = options.runs;
    report.base_seed = options.base_seed;
    report.sentence_count = test.size();
    for (const prompt_spec& spec : specs) {
        for (likelihood_method method : methods) {
            few_shot_cell cell;
            cell.prompt_code = spec.code_string;
            cell.method = method;
            report.cells.push_back(std::move(cell));
        }
    }

    for (std::size_t run = 0; run < options.runs; ++run) {
        std::uint64_t seed = options.base_seed + run;

        // preds[sentence][spec][method], plus one manifest entry per sentence
        std::vector<std::vector<std::vector<prediction>>> preds(
            test.size(), std::vector<std::vector<prediction>>(specs.size()));
        std::vector<few_shot_manifest_entry> entries(test.size());

        auto process_sentence = [&](std::size_t si) {
            const labeled_sentence& sentence = test[si];
            std::array<std::size_t, 4> picks = draw_indices(index, seed, si);
            few_shot_manifest_entry& entry = entries[si];
            entry.sentence_id = sentence.id;
            for (std::size_t c = 0; c < picks.size(); ++c) {
                entry.example_ids[c] = train[picks[c]].id;
            }
            for (std::size_t pi = 0; pi < specs.size(); ++pi) {
                std::array<few_shot_example, 4> examples = make_examples(
                    train, picks, specs[pi], candidates_per_spec[pi],
                    options.response_form);
                few_shot_context context =
                    build_context(examples, specs[pi], config, sentence.text);
                entry.context_hashes[specs[pi].code_string] =
                    to_hex(fnv1a64(context.serialized));
                std::vector<completion_score> scored = score_candidates(
                    context.serialized, candidates_per_spec[pi], backend);
                std::vector<prediction>& slot = preds[si][pi];
                slot.reserve(methods.size());
                for (likelihood_method method : methods) {
                    slot.push_back(select_prediction(sentence.id, specs[pi].code_string,
                                                     candidates_per_spec[pi], scored,
                                                     method, class_filter));
                }
            }
        };

        if (options.jobs <= 1 || test.size() < 2) {
            for (std::size_t si = 0; si < test.size(); ++si) process_sentence(si);
        } else {
            std::size_t worker_count = std::min(options.jobs, test.size());
            std::atomic<std::size_t> next{0};
            std::vector<std::exception_ptr> errors(worker_count);
            std::vector<std::thread> workers;
            workers.reserve(worker_count);
            for (std::size_t w = 0; w < worker_count; ++w) {
                workers.emplace_back([&, w] {
                    try {
                        while (true) {
                            std::size_t si = next.fetch_add(1);
                            if (si >= test.size()) break;
                            process_sentence(si);
                        }
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
            for (std::thread& worker : workers) worker.join();
            for (const std::exception_ptr& error : errors) {
                if (error) std::rethrow_exception(error);
            }
        }

        for (std::size_t pi = 0; pi < specs.size(); ++pi) {
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                confusion_matrix matrix{label_set};
                for (std::size_t si = 0; si < test.size(); ++si) {
                    matrix.add(test[si].gold, preds[si][pi][mi].label);
                }
                few_shot_cell& cell = report.cells[pi * methods.size() + mi];
                cell.per_run_macro_f1.push_back(matrix.macro_f1());
                cell.per_run_accuracy.push_back(matrix.accuracy());
            }
        }

        few_shot_run_manifest manifest;
        manifest.seed = seed;
        manifest.entries = std::move(entries);
        report.manifests.push_back(std::move(manifest));
    }

    for (few_shot_cell& cell : report.cells) {
        cell.macro_f1_stats = compute_mean_std(cell.per_run_macro_f1);
        cell.accuracy_stats = compute_mean_std(cell.per_run_accuracy);
    }
    report.best_cell = 0;
    for (std::size_t i = 1; i < report.cells.size(); ++i) {
        if (report.cells[i].macro_f1_stats.mean >
            report.cells[report.best_cell].macro_f1_stats.mean) {
            report.best_cell = i;
        }
    }
    return report;
}

} // namespace replikk
