#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <replikk/backend.hpp>
#include <replikk/errors.hpp>
#include <replikk/promptgrid.hpp>
#include <replikk/reports.hpp>
#include <replikk/rng.hpp>
#include <replikk/scoring.hpp>
#include <replikk/text.hpp>

#include "support/synthetic.hpp"

using namespace replikk;
using namespace replikk::testsupport;

namespace {

completion_score score_of(const std::string& completion, std::vector<double> logprobs) {
    std::vector<token_logprob> tokens;
    for (std::size_t i = 0; i < logprobs.size(); ++i) {
        tokens.push_back({"t" + std::to_string(i), logprobs[i]});
    }
    return make_completion_score(completion, std::move(tokens));
}

// Four single-form candidates, one per class, with caller-chosen texts.
std::vector<reply_candidate> toy_candidates(const std::vector<std::string>& texts) {
    REQUIRE(texts.size() == 4);
    std::vector<reply_candidate> out;
    for (std::size_t i = 0; i < 4; ++i) {
        out.push_back({texts[i], "toy", grammatical_gender::masculine,
                       canonical_labels[i]});
    }
    return out;
}

} // namespace

TEST_SUITE("scoring") {

TEST_CASE("method names round-trip") {
    CHECK(to_string(likelihood_method::l1_sum) == "l1");
    CHECK(parse_method("l2") == likelihood_method::l2_per_token);
    CHECK(parse_method("l3") == likelihood_method::l3_per_char);
    CHECK_THROWS_AS(parse_method("l4"), config_error);
}

TEST_CASE("l1, l2, l3 definitions") {
    completion_score three = score_of("abcdef", {-1.0, -2.0, -3.0});
    CHECK(l1(three) == -6.0);
    CHECK(l2(three) == -2.0);
    CHECK(l3(three) == -1.0); // 6 characters

    completion_score single = score_of("x", {-0.5});
    CHECK(l1(single) == -0.5);
    CHECK(l2(single) == -0.5);
    CHECK(l3(single) == -0.5);

    completion_score certain = score_of("ok", {0.0, 0.0});
    CHECK(l1(certain) == 0.0);

    completion_score positiv = score_of("Positiv .", {-2.25, -2.25});
    CHECK(positiv.n_char == 9);
    CHECK(l3(positiv) == doctest::Approx(-0.5).epsilon(1e-15));

    // Multibyte completions count scalars, not bytes.
    completion_score noytral = score_of("Nøytralt", {-4.0});
    CHECK(noytral.n_char == 8);
    CHECK(l3(noytral) == -0.5);
}

TEST_CASE("likelihood identities hold to 1e-12 on random scores") {
    seeded_rng rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
        std::size_t n = 1 + rng.bounded(8);
        std::vector<double> logprobs;
        for (std::size_t i = 0; i < n; ++i) logprobs.push_back(-10.0 * rng.unit());
        std::string completion(1 + rng.bounded(24), 'x');
        completion_score score = score_of(completion, logprobs);
        CHECK(std::abs(l2(score) * static_cast<double>(score.n) - l1(score)) <= 1e-12);
        CHECK(std::abs(l3(score) * static_cast<double>(score.n_char) - l1(score)) <=
              1e-12);
    }
}

TEST_CASE("invalid completion scores are backend errors") {
    CHECK_THROWS_AS(make_completion_score("x", {}), backend_error);
    CHECK_THROWS_AS(make_completion_score("", {{"t", -1.0}}), backend_error);
    CHECK_THROWS_AS(
        make_completion_score("x", {{"t", std::numeric_limits<double>::quiet_NaN()}}),
        backend_error);
    CHECK_THROWS_AS(
        make_completion_score("x", {{"t", std::numeric_limits<double>::infinity()}}),
        backend_error);
    CHECK_THROWS_AS(make_completion_score("x", {{"", -1.0}}), backend_error);
}

TEST_CASE("ties go to the earliest candidate") {
    std::vector<reply_candidate> candidates =
        toy_candidates({"En", "To", "Tre", "Fire"});
    std::vector<completion_score> scored;
    for (const reply_candidate& candidate : candidates) {
        scored.push_back(score_of(candidate.text, {-1.0}));
    }
    prediction pred = select_prediction("s1", "1-1-0", candidates, scored,
                                        likelihood_method::l1_sum, {});
    CHECK(pred.chosen_reply == "En");
    CHECK(pred.label == sentiment_label::pos);

    // Filtered ties go to the earliest surviving candidate.
    prediction filtered =
        select_prediction("s1", "1-1-0", candidates, scored, likelihood_method::l1_sum,
                          {sentiment_label::neg, sentiment_label::mix});
    CHECK(filtered.chosen_reply == "To");
}

TEST_CASE("an empty filtered candidate set is rejected") {
    std::vector<reply_candidate> candidates = toy_candidates({"En", "To", "Tre", "Fire"});
    candidates.resize(2); // only pos and neg remain
    std::vector<completion_score> scored = {score_of("En", {-1.0}),
                                            score_of("To", {-2.0})};
    CHECK_THROWS_AS(select_prediction("s1", "1-1-0", candidates, scored,
                                      likelihood_method::l1_sum,
                                      {sentiment_label::mix}),
                    config_error);
}

TEST_CASE("short-sequence bias: L1 and L2 disagree by construction") {
    // POS reply: 2 tokens at -2 each, l1 = -4, l2 = -2.
    // NEG reply: 6 tokens at -1 each, l1 = -6, l2 = -1.
    std::vector<reply_candidate> candidates = toy_candidates(
        {"Kort svar", "Et mye lengre svar enn det", "Nfiller", "Mfiller"});
    std::vector<completion_score> scored = {
        score_of(candidates[0].text, {-2.0, -2.0}),
        score_of(candidates[1].text, {-1.0, -1.0, -1.0, -1.0, -1.0, -1.0}),
        score_of(candidates[2].text, {-50.0}),
        score_of(candidates[3].text, {-50.0}),
    };
    prediction by_l1 = select_prediction("s1", "5-1-2", candidates, scored,
                                         likelihood_method::l1_sum, {});
    prediction by_l2 = select_prediction("s1", "5-1-2", candidates, scored,
                                         likelihood_method::l2_per_token, {});
    CHECK(by_l1.label == sentiment_label::pos);
    CHECK(by_l1.scores[0].second == -4.0);
    CHECK(by_l1.scores[1].second == -6.0);
    CHECK(by_l2.label == sentiment_label::neg);
    CHECK(by_l2.scores[0].second == -2.0);
    CHECK(by_l2.scores[1].second == -1.0);
}

TEST_CASE("argmax is invariant under per-method constant shifts") {
    seeded_rng rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        double shift = -3.0 + 6.0 * rng.unit();
        std::vector<reply_candidate> candidates =
            toy_candidates({"AAAA", "BBBB", "CCCC", "DDDD"});
        std::vector<double> values;
        for (int i = 0; i < 4; ++i) values.push_back(-8.0 * rng.unit());

        // L1 and L2 with single tokens: the shift moves both by the constant.
        std::vector<completion_score> base, shifted;
        for (std::size_t i = 0; i < 4; ++i) {
            base.push_back(score_of(candidates[i].text, {values[i]}));
            shifted.push_back(score_of(candidates[i].text, {values[i] + shift}));
        }
        for (likelihood_method method :
             {likelihood_method::l1_sum, likelihood_method::l2_per_token,
              likelihood_method::l3_per_char}) {
            prediction a =
                select_prediction("s", "1-1-0", candidates, base, method, {});
            prediction b =
                select_prediction("s", "1-1-0", candidates, shifted, method, {});
            CHECK(a.chosen_reply == b.chosen_reply);
        }
    }
}

TEST_CASE("uniform token counts make L1 and L2 agree") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    const prompt_spec& spec = specs.front();
    std::vector<reply_candidate> candidates = generate_replies(spec, config);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        function_backend backend("fixed-n:" + std::to_string(seed),
                                 [seed](const std::string& context,
                                        const std::string& completion) {
                                     std::uint64_t base = derive_seed(
                                         {seed, fnv1a64(context), fnv1a64(completion)});
                                     std::vector<token_logprob> tokens;
                                     for (std::size_t i = 0; i < 3; ++i) {
                                         double unit = static_cast<double>(
                                                           splitmix64(base ^ (i + 1)) >> 11) *
                                                       0x1.0p-53;
                                         tokens.push_back(
                                             {"t" + std::to_string(i), -9.0 * unit});
                                     }
                                     return tokens;
                                 });
        labeled_sentence sentence;
        sentence.id = "s" + std::to_string(seed);
        sentence.text = "Prøve nummer " + std::to_string(seed) + " .";
        sentence.gold = sentiment_label::pos;
        prediction by_l1 = classify(sentence, spec, candidates, backend,
                                    likelihood_method::l1_sum);
        prediction by_l2 = classify(sentence, spec, candidates, backend,
                                    likelihood_method::l2_per_token);
        CHECK(by_l1.chosen_reply == by_l2.chosen_reply);
    }
}

TEST_CASE("uniform character counts make L1 and L3 agree") {
    std::vector<reply_candidate> candidates =
        toy_candidates({"AAAA", "BBBB", "CCCC", "DDDD"});
    seeded_rng rng(2718);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<completion_score> scored;
        for (const reply_candidate& candidate : candidates) {
            std::vector<double> logprobs;
            std::size_t n = 1 + rng.bounded(4);
            for (std::size_t i = 0; i < n; ++i) logprobs.push_back(-7.0 * rng.unit());
            scored.push_back(score_of(candidate.text, logprobs));
        }
        prediction by_l1 = select_prediction("s", "1-1-0", candidates, scored,
                                             likelihood_method::l1_sum, {});
        prediction by_l3 = select_prediction("s", "1-1-0", candidates, scored,
                                             likelihood_method::l3_per_char, {});
        CHECK(by_l1.chosen_reply == by_l3.chosen_reply);
    }
}

TEST_CASE("class dominance: the best-scored class wins under every method") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    const prompt_spec& spec = specs.front();
    std::vector<reply_candidate> candidates = generate_replies(spec, config);
    std::map<std::string, sentiment_label> classes = reply_class_map(candidates);

    function_backend backend("dominant-pos", [&classes](const std::string&,
                                                        const std::string& completion) {
        double value =
            classes.at(completion) == sentiment_label::pos ? -0.1 : -5.0;
        std::vector<token_logprob> tokens;
        for (const std::string& word : whitespace_tokenize(completion)) {
            tokens.push_back({word, value});
        }
        return tokens;
    });
    labeled_sentence sentence;
    sentence.id = "s1";
    sentence.text = "Helt grei beskjed .";
    sentence.gold = sentiment_label::pos;
    for (likelihood_method method : all_methods) {
        CHECK(classify(sentence, spec, candidates, backend, method).label ==
              sentiment_label::pos);
    }
}

TEST_CASE("binary classification equals post-hoc restriction") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    corpus fixture = make_balanced_corpus(25);

    for (std::size_t i = 0; i < fixture.sentences.size(); ++i) {
        const prompt_spec& spec = specs[i % specs.size()];
        std::vector<reply_candidate> candidates = generate_replies(spec, config);
        std::map<std::string, sentiment_label> classes = reply_class_map(candidates);
        hash_backend backend(1000 + i);
        for (likelihood_method method : all_methods) {
            prediction full =
                classify(fixture.sentences[i], spec, candidates, backend, method);
            prediction binary =
                classify(fixture.sentences[i], spec, candidates, backend, method,
                         {sentiment_label::pos, sentiment_label::neg});

            // Restrict the full score list to binary replies post hoc.
            std::string best;
            double best_score = 0.0;
            for (const auto& [reply, score] : full.scores) {
                sentiment_label label = classes.at(reply);
                if (label != sentiment_label::pos && label != sentiment_label::neg) {
                    continue;
                }
                if (best.empty() || score > best_score) {
                    best = reply;
                    best_score = score;
                }
            }
            CHECK(binary.chosen_reply == best);
            CHECK((binary.label == sentiment_label::pos ||
                   binary.label == sentiment_label::neg));
        }
    }
}

TEST_CASE("evaluate_run with an oracle backend is perfect everywhere") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> all_specs = expand_grid(config);
    std::vector<prompt_spec> specs(all_specs.begin(), all_specs.begin() + 4);
    corpus fixture = make_balanced_corpus(3);

    std::vector<std::pair<std::string, sentiment_label>> golds;
    std::map<std::string, sentiment_label> classes;
    for (const labeled_sentence& sentence : fixture.sentences) {
        golds.emplace_back(sentence.text, sentence.gold);
    }
    for (const prompt_spec& spec : specs) {
        for (const auto& [text, label] :
             reply_class_map(generate_replies(spec, config))) {
            classes[text] = label;
        }
    }
    oracle_backend backend(golds, classes);

    run_report report =
        evaluate_run(fixture.sentences, specs, config,
                     {all_methods.begin(), all_methods.end()}, backend,
                     eval_mode::four_class);
    CHECK(report.cells.size() == 12);
    CHECK(report.sentence_count == fixture.sentences.size());
    for (const cell_result& cell : report.cells) {
        CHECK(cell.macro_f1 == doctest::Approx(100.0));
        CHECK(cell.accuracy == doctest::Approx(100.0));
        std::size_t predicted_total = 0;
        for (const auto& [label, count] : cell.predicted_counts) {
            predicted_total += count;
        }
        CHECK(predicted_total == fixture.sentences.size());
        CHECK(cell.matrix.total() == fixture.sentences.size());
    }
    CHECK(report.cells[report.best_cell].macro_f1 == doctest::Approx(100.0));
    REQUIRE(report.best_predictions.size() == fixture.sentences.size());
    for (std::size_t i = 0; i < fixture.sentences.size(); ++i) {
        CHECK(report.best_predictions[i].sentence_id == fixture.sentences[i].id);
        CHECK(report.best_predictions[i].label == fixture.sentences[i].gold);
    }
}

TEST_CASE("a mix-collapsed backend gives macro-F1 = F1(mix)/4") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> all_specs = expand_grid(config);
    std::vector<prompt_spec> specs(all_specs.begin(), all_specs.begin() + 2);
    corpus fixture = make_balanced_corpus(4);

    std::map<std::string, sentiment_label> classes;
    for (const prompt_spec& spec : specs) {
        for (const auto& [text, label] :
             reply_class_map(generate_replies(spec, config))) {
            classes[text] = label;
        }
    }
    function_backend backend("mix-only", [&classes](const std::string&,
                                                    const std::string& completion) {
        double value = classes.at(completion) == sentiment_label::mix ? -0.1 : -5.0;
        std::vector<token_logprob> tokens;
        for (const std::string& word : whitespace_tokenize(completion)) {
            tokens.push_back({word, value});
        }
        return tokens;
    });

    run_report report = evaluate_run(fixture.sentences, specs, config,
                                     {likelihood_method::l1_sum}, backend,
                                     eval_mode::four_class);
    for (const cell_result& cell : report.cells) {
        CHECK(cell.macro_f1 == cell.matrix.per_class_f1(sentiment_label::mix) / 4.0);
        CHECK(cell.predicted_counts.at(sentiment_label::mix) ==
              fixture.sentences.size());
    }
}

TEST_CASE("binary mode validates its input and restricts candidates") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> all_specs = expand_grid(config);
    std::vector<prompt_spec> specs(all_specs.begin(), all_specs.begin() + 1);
    corpus fixture = make_balanced_corpus(2);
    hash_backend backend(5);

    CHECK_THROWS_AS(evaluate_run(fixture.sentences, specs, config,
                                 {likelihood_method::l1_sum}, backend,
                                 eval_mode::binary),
                    data_error);

    std::vector<labeled_sentence> binary = binary_subset(fixture.sentences);
    run_report report = evaluate_run(binary, specs, config,
                                     {likelihood_method::l1_sum}, backend,
                                     eval_mode::binary);
    CHECK(report.mode == eval_mode::binary);
    CHECK(report.sentence_count == binary.size());
    for (const prediction& pred : report.best_predictions) {
        CHECK((pred.label == sentiment_label::pos ||
               pred.label == sentiment_label::neg));
    }
}

TEST_CASE("parallel evaluation changes nothing") {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> all_specs = expand_grid(config);
    std::vector<prompt_spec> specs(all_specs.begin(), all_specs.begin() + 3);
    corpus fixture = make_balanced_corpus(6);
    std::vector<likelihood_method> methods(all_methods.begin(), all_methods.end());

    hash_backend serial_backend(77);
    run_report serial = evaluate_run(fixture.sentences, specs, config, methods,
                                     serial_backend, eval_mode::four_class, 1);
    hash_backend parallel_backend(77);
    run_report parallel = evaluate_run(fixture.sentences, specs, config, methods,
                                       parallel_backend, eval_mode::four_class, 4);
    CHECK(run_report_to_json(serial) == run_report_to_json(parallel));
    CHECK(predictions_to_jsonl(serial.best_predictions, serial.mode) ==
          predictions_to_jsonl(parallel.best_predictions, parallel.mode));
}

} // TEST_SUITE("scoring")
