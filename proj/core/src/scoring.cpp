#include "replikk/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "replikk/errors.hpp"
#include "replikk/text.hpp"

namespace replikk {

std::string_view to_string(likelihood_method method) {
    switch (method) {
        case likelihood_method::l1_sum: return "l1";
        case likelihood_method::l2_per_token: return "l2";
        case likelihood_method::l3_per_char: return "l3";
    }
    throw config_error("invalid likelihood_method value");
}

likelihood_method parse_method(std::string_view text) {
    if (text == "l1") return likelihood_method::l1_sum;
    if (text == "l2") return likelihood_method::l2_per_token;
    if (text == "l3") return likelihood_method::l3_per_char;
    throw config_error("unknown method '" + std::string(text) +
                       "' (expected l1, l2 or l3)");
}

std::string_view to_string(eval_mode mode) {
    return mode == eval_mode::four_class ? "four_class" : "binary";
}

eval_mode parse_eval_mode(std::string_view text) {
    if (text == "four_class") return eval_mode::four_class;
    if (text == "binary") return eval_mode::binary;
    throw config_error("unknown mode '" + std::string(text) +
                       "' (expected four_class or binary)");
}

completion_score make_completion_score(const std::string& completion,
                                       std::vector<token_logprob> tokens) {
    validate_logprobs(tokens, completion, "scorer");
    completion_score score;
    score.completion = completion;
    score.n = tokens.size();
    score.n_char = utf8_scalar_count(completion);
    if (score.n_char == 0) {
        throw backend_error("completion '" + completion + "' has no characters");
    }
    score.tokens = std::move(tokens);
    return score;
}

double l1(const completion_score& score) {
    double sum = 0.0;
    for (const token_logprob& token : score.tokens) sum += token.logprob;
    return sum;
}

double l2(const completion_score& score) {
    return l1(score) / static_cast<double>(score.n);
}

double l3(const completion_score& score) {
    return l1(score) / static_cast<double>(score.n_char);
}

double likelihood(const completion_score& score, likelihood_method method) {
    switch (method) {
        case likelihood_method::l1_sum: return l1(score);
        case likelihood_method::l2_per_token: return l2(score);
        case likelihood_method::l3_per_char: return l3(score);
    }
    throw config_error("invalid likelihood_method value");
}

std::vector<completion_score> score_candidates(const std::string& context,
                                               const std::vector<reply_candidate>& candidates,
                                               scorer_backend& backend) {
    std::vector<score_request> requests;
    requests.reserve(candidates.size());
    for (const reply_candidate& candidate : candidates) {
        requests.push_back({context, candidate.text});
    }
    std::vector<std::vector<token_logprob>> responses = backend.logprobs_batch(requests);
    std::vector<completion_score> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        scored.push_back(make_completion_score(candidates[i].text, std::move(responses[i])));
    }
    return scored;
}

prediction select_prediction(const std::string& sentence_id, const std::string& prompt_code,
                             const std::vector<reply_candidate>& candidates,
                             const std::vector<completion_score>& scored,
                             likelihood_method method,
                             const std::vector<sentiment_label>& class_filter) {
    if (candidates.size() != scored.size()) {
        throw replikk_error("candidate/score length mismatch");
    }
    auto admitted = [&class_filter](sentiment_label label) {
        if (class_filter.empty()) return true;
        return std::find(class_filter.begin(), class_filter.end(), label) !=
               class_filter.end();
    };

    prediction pred;
    pred.sentence_id = sentence_id;
    pred.prompt_code = prompt_code;
    pred.method = method;

    bool found = false;
    double best = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!admitted(candidates[i].label)) continue;
        double value = likelihood(scored[i], method);
        pred.scores.emplace_back(candidates[i].text, value);
        // Strict > keeps the earliest candidate on ties.
        if (!found || value > best) {
            found = true;
            best = value;
            pred.chosen_reply = candidates[i].text;
            pred.label = candidates[i].label;
        }
    }
    if (!found) {
        throw config_error("no reply candidate admitted by the class filter for prompt " +
                           prompt_code);
    }
    return pred;
}

prediction classify(const labeled_sentence& sentence, const prompt_spec& spec,
                    const std::vector<reply_candidate>& candidates, scorer_backend& backend,
                    likelihood_method method,
                    const std::vector<sentiment_label>& class_filter) {
    std::string context = render_prompt(spec, sentence.text);
    std::vector<completion_score> scored = score_candidates(context, candidates, backend);
    return select_prediction(sentence.id, spec.code_string, candidates, scored, method,
                             class_filter);
}

namespace {

struct run_setup {
    std::vector<std::vector<reply_candidate>> candidates_per_spec;
    std::vector<sentiment_label> class_filter;
    std::vector<sentiment_label> label_set;
};

run_setup prepare_run(const std::vector<labeled_sentence>& sentences,
                      const std::vector<prompt_spec>& specs, const grid_config& config,
                      eval_mode mode) {
    if (sentences.empty()) throw data_error("evaluation needs at least one sentence");
    if (specs.empty()) throw config_error("evaluation needs at least one prompt spec");

    run_setup setup;
    if (mode == eval_mode::binary) {
        for (const labeled_sentence& sentence : sentences) {
            if (sentence.gold != sentiment_label::pos &&
                sentence.gold != sentiment_label::neg) {
                throw data_error("binary evaluation: sentence '" + sentence.id +
                                 "' has gold label " +
                                 std::string(to_string(sentence.gold)));
            }
        }
        setup.class_filter = {binary_labels.begin(), binary_labels.end()};
        setup.label_set = setup.class_filter;
    } else {
        setup.label_set = {canonical_labels.begin(), canonical_labels.end()};
    }
    setup.candidates_per_spec.reserve(specs.size());
    for (const prompt_spec& spec : specs) {
        setup.candidates_per_spec.push_back(generate_replies(spec, config));
    }
    return setup;
}

} // namespace

run_report evaluate_run(const std::vector<labeled_sentence>& sentences,
                        const std::vector<prompt_spec>& specs, const grid_config& config,
                        const std::vector<likelihood_method>& methods,
                        scorer_backend& backend, eval_mode mode, std::size_t jobs) {
    if (methods.empty()) throw config_error("evaluation needs at least one method");
    run_setup setup = prepare_run(sentences, specs, config, mode);

    // preds[sentence][spec][method]
    std::vector<std::vector<std::vector<prediction>>> preds(
        sentences.size(),
        std::vector<std::vector<prediction>>(specs.size()));

    auto process_sentence = [&](std::size_t si) {
        const labeled_sentence& sentence = sentences[si];
        for (std::size_t pi = 0; pi < specs.size(); ++pi) {
            std::string context = render_prompt(specs[pi], sentence.text);
            std::vector<completion_score> scored =
                score_candidates(context, setup.candidates_per_spec[pi], backend);
            std::vector<prediction>& slot = preds[si][pi];
            slot.reserve(methods.size());
            for (likelihood_method method : methods) {
                slot.push_back(select_prediction(sentence.id, specs[pi].code_string,
                                                 setup.candidates_per_spec[pi], scored,
                                                 method, setup.class_filter));
            }
        }
    };

    if (jobs <= 1 || sentences.size() < 2) {
        for (std::size_t si = 0; si < sentences.size(); ++si) process_sentence(si);
    } else {
        std::size_t worker_count = std::min(jobs, sentences.size());
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(worker_count);
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&, w] {
                try {
                    while (true) {
                        std::size_t si = next.fetch_add(1);
                        if (si >= sentences.size()) break;
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

    run_report report;
    report.mode = mode;
    report.sentence_count = sentences.size();
    report.cells.reserve(specs.size() * methods.size());
    for (std::size_t pi = 0; pi < specs.size(); ++pi) {
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            cell_result cell;
            cell.prompt_code = specs[pi].code_string;
            cell.method = methods[mi];
            cell.matrix = confusion_matrix(setup.label_set);
            for (sentiment_label label : setup.label_set) cell.predicted_counts[label] = 0;
            for (std::size_t si = 0; si < sentences.size(); ++si) {
                const prediction& pred = preds[si][pi][mi];
                cell.matrix.add(sentences[si].gold, pred.label);
                ++cell.predicted_counts[pred.label];
            }
            cell.macro_f1 = cell.matrix.macro_f1();
            cell.accuracy = cell.matrix.accuracy();
            report.cells.push_back(std::move(cell));
        }
    }

    report.best_cell = 0;
    for (std::size_t i = 1; i < report.cells.size(); ++i) {
        if (report.cells[i].macro_f1 > report.cells[report.best_cell].macro_f1) {
            report.best_cell = i;
        }
    }

    std::size_t best_spec = report.best_cell / methods.size();
    std::size_t best_method = report.best_cell % methods.size();
    report.best_predictions.reserve(sentences.size());
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        report.best_predictions.push_back(preds[si][best_spec][best_method]);
    }
    return report;
}

} // namespace replikk
