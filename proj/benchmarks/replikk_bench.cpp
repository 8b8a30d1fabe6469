// Microbenchmarks for the hot paths: completion scoring, argmax selection,
// grid expansion, agreement statistics, and the naive Bayes baseline.

#include <benchmark/benchmark.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <replikk/backend.hpp>
#include <replikk/baseline.hpp>
#include <replikk/fewshot.hpp>
#include <replikk/labels.hpp>
#include <replikk/metrics.hpp>
#include <replikk/promptgrid.hpp>
#include <replikk/rng.hpp>
#include <replikk/scoring.hpp>

namespace {

using namespace replikk;

std::vector<labeled_sentence> synth_sentences(std::size_t count, std::uint64_t seed) {
    seeded_rng rng(seed);
    std::vector<labeled_sentence> sentences;
    sentences.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        labeled_sentence sentence;
        sentence.id = "b" + std::to_string(i);
        sentence.gold = canonical_labels[i % 4];
        std::string text;
        std::size_t words = 6 + rng.bounded(6);
        for (std::size_t w = 0; w < words; ++w) {
            if (w > 0) text += " ";
            text += "ord" + std::to_string(rng.bounded(300));
        }
        sentence.text = text + " .";
        sentences.push_back(std::move(sentence));
    }
    return sentences;
}

completion_score synth_score(std::size_t tokens, std::uint64_t seed) {
    seeded_rng rng(seed);
    std::string text;
    std::vector<token_logprob> logprobs;
    for (std::size_t i = 0; i < tokens; ++i) {
        if (i > 0) text += " ";
        text += "tok" + std::to_string(i);
        logprobs.push_back({"tok", -12.0 * rng.unit() - 1e-9});
    }
    return make_completion_score(text, logprobs);
}

void bm_make_completion_score(benchmark::State& state) {
    std::size_t tokens = static_cast<std::size_t>(state.range(0));
    seeded_rng rng(3);
    std::string text;
    std::vector<token_logprob> logprobs;
    for (std::size_t i = 0; i < tokens; ++i) {
        if (i > 0) text += " ";
        text += "tok" + std::to_string(i);
        logprobs.push_back({"tok", -12.0 * rng.unit() - 1e-9});
    }
    for (auto _ : state) {
        completion_score score = make_completion_score(text, logprobs);
        benchmark::DoNotOptimize(score);
    }
}
BENCHMARK(bm_make_completion_score)->Arg(4)->Arg(16)->Arg(64);

void bm_likelihood_methods(benchmark::State& state) {
    completion_score score = synth_score(16, 7);
    for (auto _ : state) {
        double value = l1(score) + l2(score) + l3(score);
        benchmark::DoNotOptimize(value);
    }
}
BENCHMARK(bm_likelihood_methods);

void bm_select_prediction(benchmark::State& state) {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    std::vector<reply_candidate> candidates = generate_replies(specs[0], config);
    std::vector<completion_score> scored;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        scored.push_back(synth_score(3, 100 + i));
        scored.back().completion = candidates[i].text;
    }
    for (auto _ : state) {
        prediction chosen = select_prediction("s", specs[0].code_string, candidates,
                                              scored, likelihood_method::l1_sum, {});
        benchmark::DoNotOptimize(chosen);
    }
}
BENCHMARK(bm_select_prediction);

void bm_classify(benchmark::State& state) {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    std::vector<reply_candidate> candidates = generate_replies(specs[0], config);
    std::vector<labeled_sentence> sentences = synth_sentences(1, 11);
    hash_backend backend(5);
    for (auto _ : state) {
        prediction chosen = classify(sentences[0], specs[0], candidates, backend,
                                     likelihood_method::l2_per_token);
        benchmark::DoNotOptimize(chosen);
    }
}
BENCHMARK(bm_classify);

void bm_expand_grid(benchmark::State& state) {
    grid_config config = default_grid_config();
    for (auto _ : state) {
        std::vector<prompt_spec> specs = expand_grid(config);
        benchmark::DoNotOptimize(specs);
    }
}
BENCHMARK(bm_expand_grid);

void bm_generate_replies(benchmark::State& state) {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    for (auto _ : state) {
        std::vector<reply_candidate> replies = generate_replies(specs[40], config);
        benchmark::DoNotOptimize(replies);
    }
}
BENCHMARK(bm_generate_replies);

void bm_render_prompt(benchmark::State& state) {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    std::vector<labeled_sentence> sentences = synth_sentences(1, 13);
    for (auto _ : state) {
        std::string rendered = render_prompt(specs[20], sentences[0].text);
        benchmark::DoNotOptimize(rendered);
    }
}
BENCHMARK(bm_render_prompt);

void bm_build_context(benchmark::State& state) {
    grid_config config = default_grid_config();
    std::vector<prompt_spec> specs = expand_grid(config);
    std::vector<labeled_sentence> train = synth_sentences(40, 17);
    std::array<few_shot_example, 4> examples =
        sample_examples(train, 3, 0, specs[0], config, "bare");
    std::vector<labeled_sentence> target = synth_sentences(1, 19);
    for (auto _ : state) {
        few_shot_context context =
            build_context(examples, specs[0], config, target[0].text);
        benchmark::DoNotOptimize(context);
    }
}
BENCHMARK(bm_build_context);

void bm_cohens_kappa(benchmark::State& state) {
    seeded_rng rng(23);
    std::vector<sentiment_label> a;
    std::vector<sentiment_label> b;
    for (int i = 0; i < 10000; ++i) {
        a.push_back(canonical_labels[rng.bounded(4)]);
        b.push_back(canonical_labels[rng.bounded(4)]);
    }
    for (auto _ : state) {
        double kappa = cohens_kappa(a, b);
        benchmark::DoNotOptimize(kappa);
    }
}
BENCHMARK(bm_cohens_kappa);

void bm_build_kappa_matrix(benchmark::State& state) {
    seeded_rng rng(29);
    std::map<std::string, rating_map> raters;
    for (int r = 0; r < 6; ++r) {
        rating_map ratings;
        for (int i = 0; i < 150; ++i) {
            ratings["i" + std::to_string(i)] = canonical_labels[rng.bounded(4)];
        }
        raters["a" + std::to_string(r)] = std::move(ratings);
    }
    for (auto _ : state) {
        kappa_matrix matrix = build_kappa_matrix(raters);
        benchmark::DoNotOptimize(matrix);
    }
}
BENCHMARK(bm_build_kappa_matrix);

void bm_train_nb(benchmark::State& state) {
    std::vector<labeled_sentence> train = synth_sentences(400, 31);
    for (auto _ : state) {
        nb_model model = train_nb(train);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(bm_train_nb);

void bm_predict_nb(benchmark::State& state) {
    std::vector<labeled_sentence> train = synth_sentences(400, 31);
    nb_model model = train_nb(train);
    std::vector<labeled_sentence> probes = synth_sentences(1, 37);
    for (auto _ : state) {
        sentiment_label predicted = predict_nb(model, probes[0].text);
        benchmark::DoNotOptimize(predicted);
    }
}
BENCHMARK(bm_predict_nb);

} // namespace

BENCHMARK_MAIN();
