// replikk: constrained-completion sentiment classification over a prompt
// grid, with likelihood normalization variants, few-shot contexts, a naive
// Bayes baseline and agreement analysis.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "replikk/backend.hpp"
#include "replikk/baseline.hpp"
#include "replikk/corpus.hpp"
#include "replikk/errors.hpp"
#include "replikk/fewshot.hpp"
#include "replikk/http_backend.hpp"
#include "replikk/metrics.hpp"
#include "replikk/promptgrid.hpp"
#include "replikk/reports.hpp"
#include "replikk/score_cache.hpp"
#include "replikk/scoring.hpp"
#include "replikk/text.hpp"
#include "replikk/version.hpp"

namespace {

using namespace replikk;
using nlohmann::json;

std::filesystem::path out_path(const std::string& dir, const std::string& name) {
    return std::filesystem::path(dir) / name;
}

grid_config load_grid_or_default(const std::string& path) {
    if (path.empty()) return default_grid_config();
    return load_grid_config(path);
}

std::vector<likelihood_method> parse_methods(const std::string& spec) {
    std::vector<likelihood_method> methods;
    std::stringstream stream(spec);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::string token{trim(item)};
        if (token.empty()) continue;
        likelihood_method method = parse_method(token);
        if (std::find(methods.begin(), methods.end(), method) != methods.end()) {
            throw config_error("method listed twice: " + token);
        }
        methods.push_back(method);
    }
    if (methods.empty()) throw config_error("no methods in '" + spec + "'");
    return methods;
}

std::vector<prompt_spec> filter_specs(std::vector<prompt_spec> specs,
                                      const std::string& filter) {
    if (filter.empty()) return specs;
    std::vector<prompt_spec> out;
    std::stringstream stream(filter);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::string code_text{trim(item)};
        if (code_text.empty()) continue;
        std::string canonical = to_string(parse_prompt_code(code_text));
        bool found = false;
        for (const prompt_spec& spec : specs) {
            if (spec.code_string == canonical) {
                out.push_back(spec);
                found = true;
                break;
            }
        }
        if (!found) {
            throw config_error("prompt code " + canonical + " is not in the grid");
        }
    }
    if (out.empty()) throw config_error("prompt filter '" + filter + "' selects nothing");
    return out;
}

// Backend spec grammar: "mock-random[:seed]", "mock-oracle", or an http URL.
// An empty spec falls back to the REPLIKK_BACKEND_URL environment variable.
std::unique_ptr<scorer_backend> build_backend(
    const std::string& spec, const std::vector<labeled_sentence>& oracle_golds,
    const std::vector<prompt_spec>& specs, const grid_config& config,
    const remote_options& remote_opts) {
    std::string effective = spec;
    if (effective.empty()) {
        const char* env = std::getenv(backend_url_env);
        if (env != nullptr && *env != '\0') effective = env;
    }
    if (effective.empty()) {
        throw config_error(std::string("no backend given: pass --backend or set ") +
                           backend_url_env);
    }
    if (effective.rfind("mock-random", 0) == 0) {
        std::uint64_t seed = 1;
        if (effective.size() > 11) {
            if (effective[11] != ':') {
                throw config_error("bad backend spec '" + effective + "'");
            }
            seed = std::strtoull(effective.c_str() + 12, nullptr, 10);
        }
        return std::make_unique<hash_backend>(seed);
    }
    if (effective == "mock-oracle") {
        std::vector<std::pair<std::string, sentiment_label>> golds;
        golds.reserve(oracle_golds.size());
        for (const labeled_sentence& sentence : oracle_golds) {
            golds.emplace_back(sentence.text, sentence.gold);
        }
        std::map<std::string, sentiment_label> replies;
        for (const prompt_spec& prompt : specs) {
            for (const auto& [text, label] :
                 reply_class_map(generate_replies(prompt, config))) {
                replies[text] = label;
            }
        }
        return std::make_unique<oracle_backend>(std::move(golds), std::move(replies));
    }
    return std::make_unique<remote_backend>(effective, remote_opts);
}

std::string config_hash_of(const grid_config& config) {
    return to_hex(fnv1a64(grid_config_to_json(config)));
}

void add_backend_counters(run_metadata& meta, const scorer_backend& backend,
                          const cached_backend* cached) {
    meta.fields.emplace_back("backend_calls", std::to_string(backend.calls()));
    if (cached != nullptr) {
        meta.fields.emplace_back("cache_hits", std::to_string(cached->hits()));
        meta.fields.emplace_back("cache_misses", std::to_string(cached->misses()));
    }
}

// Values from an optional JSON config file fill in flags the command line
// left at their defaults: CLI beats config file, config file beats env.
class config_file {
  public:
    void load(const std::string& path) {
        if (path.empty()) return;
        json parsed;
        try {
            parsed = json::parse(read_file(path));
        } catch (const json::parse_error& e) {
            throw config_error("run config " + path + ": " + e.what());
        }
        if (!parsed.is_object()) {
            throw config_error("run config " + path + " must be a JSON object");
        }
        values_ = std::move(parsed);
    }

    void apply_string(const CLI::Option* opt, const std::string& key, std::string& target) const {
        if (opt->count() > 0 || !values_.contains(key)) return;
        if (!values_[key].is_string()) {
            throw config_error("run config field '" + key + "' must be a string");
        }
        target = values_[key].get<std::string>();
    }

    template <typename T>
    void apply_number(const CLI::Option* opt, const std::string& key, T& target) const {
        if (opt->count() > 0 || !values_.contains(key)) return;
        if (!values_[key].is_number()) {
            throw config_error("run config field '" + key + "' must be a number");
        }
        target = values_[key].get<T>();
    }

  private:
    json values_ = json::object();
};

int cmd_split(const std::string& corpus_path, std::uint64_t seed,
              const std::string& out_dir) {
    corpus loaded = load_corpus(corpus_path);
    corpus split = stratified_split(loaded, seed);
    validate_split(split);

    auto side = [&split](split_tag tag) {
        corpus out;
        out.sentences = split.subset(tag);
        for (const labeled_sentence& sentence : out.sentences) {
            out.split_assignment[sentence.id] = tag;
        }
        return out;
    };
    std::filesystem::create_directories(out_dir);
    save_corpus(out_path(out_dir, "train.jsonl").string(), side(split_tag::train), true);
    save_corpus(out_path(out_dir, "test.jsonl").string(), side(split_tag::test), true);

    class_distribution train_dist = distribution_of(split.subset(split_tag::train));
    class_distribution test_dist = distribution_of(split.subset(split_tag::test));
    write_file_atomic(out_path(out_dir, "distribution.json").string(),
                      distribution_to_json(train_dist, test_dist));
    write_file_atomic(out_path(out_dir, "distribution.txt").string(),
                      distribution_to_text(train_dist, test_dist));

    run_metadata meta;
    meta.command = "split";
    meta.tool_version = std::string(tool_version);
    meta.fields.emplace_back("corpus", corpus_path);
    meta.fields.emplace_back("seed", std::to_string(seed));
    meta.fields.emplace_back("sentences", std::to_string(loaded.sentences.size()));
    write_file_atomic(out_path(out_dir, "run_meta.json").string(),
                      run_metadata_to_json(meta));

    std::cout << distribution_to_text(train_dist, test_dist);
    return 0;
}

int cmd_gen_prompts(const std::string& grid_path, const std::string& out_dir,
                    const std::string& dump_config) {
    grid_config config = load_grid_or_default(grid_path);
    if (!dump_config.empty()) {
        if (dump_config == "-") {
            std::cout << grid_config_to_json(config);
        } else {
            write_file_atomic(dump_config, grid_config_to_json(config));
        }
        if (out_dir.empty()) return 0;
    }
    if (out_dir.empty()) throw config_error("gen-prompts needs --out (or --dump-config)");

    std::vector<prompt_spec> specs = expand_grid(config);

    json prompts = json::array();
    json replies = json::object();
    std::set<std::string> distinct;
    for (const prompt_spec& spec : specs) {
        prompts.push_back({{"code", spec.code_string},
                           {"base", spec.base_id},
                           {"gender", std::string(to_string(spec.gender))},
                           {"question", spec.question},
                           {"template", spec.template_text}});
        json reply_array = json::array();
        for (const reply_candidate& reply : generate_replies(spec, config)) {
            reply_array.push_back({{"text", reply.text},
                                   {"form", reply.form},
                                   {"label", std::string(to_string(reply.label))}});
            distinct.insert(reply.text);
        }
        replies[spec.code_string] = std::move(reply_array);
    }

    std::ostringstream table;
    table << specs.size() << " prompts, " << distinct.size()
          << " distinct reply strings\n\n";
    for (const prompt_spec& spec : specs) {
        table << spec.code_string << "\n  " << replace_all(spec.template_text, "\n", "\\n")
              << "\n";
    }
    table << "\ndistinct replies:\n";
    for (const std::string& text : distinct) table << "  " << text << "\n";

    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_path(out_dir, "prompts.json").string(), prompts.dump(2) + "\n");
    write_file_atomic(out_path(out_dir, "replies.json").string(), replies.dump(2) + "\n");
    write_file_atomic(out_path(out_dir, "prompt_table.txt").string(), table.str());

    run_metadata meta;
    meta.command = "gen-prompts";
    meta.tool_version = std::string(tool_version);
    meta.config_hash = config_hash_of(config);
    meta.fields.emplace_back("prompt_count", std::to_string(specs.size()));
    meta.fields.emplace_back("distinct_replies", std::to_string(distinct.size()));
    write_file_atomic(out_path(out_dir, "run_meta.json").string(),
                      run_metadata_to_json(meta));

    std::cout << specs.size() << " prompts, " << distinct.size()
              << " distinct reply strings -> " << out_dir << "\n";
    return 0;
}

struct zeroshot_args {
    std::string config_path;
    std::string test_path;
    std::string grid_path;
    std::string backend_spec;
    std::string methods = "l1,l2,l3";
    std::string mode = "four_class";
    std::string prompts;
    std::string cache_dir;
    std::string out_dir;
    std::size_t jobs = 1;
    double timeout = 30.0;
    int retries = 2;
};

int cmd_zeroshot(const zeroshot_args& args) {
    grid_config config = load_grid_or_default(args.grid_path);
    std::vector<prompt_spec> specs = filter_specs(expand_grid(config), args.prompts);
    std::vector<likelihood_method> methods = parse_methods(args.methods);
    eval_mode mode = parse_eval_mode(args.mode);

    corpus test_corpus = load_corpus(args.test_path);
    std::vector<labeled_sentence> sentences = mode == eval_mode::binary
                                                  ? binary_subset(test_corpus.sentences)
                                                  : test_corpus.sentences;
    if (sentences.empty()) throw data_error("no test sentences after mode filtering");

    remote_options remote_opts;
    remote_opts.timeout_seconds = args.timeout;
    remote_opts.retries = args.retries;
    std::unique_ptr<scorer_backend> backend =
        build_backend(args.backend_spec, sentences, specs, config, remote_opts);

    std::optional<score_cache> cache;
    std::unique_ptr<cached_backend> caching;
    scorer_backend* effective = backend.get();
    if (!args.cache_dir.empty()) {
        cache.emplace(args.cache_dir);
        caching = std::make_unique<cached_backend>(*backend, *cache);
        effective = caching.get();
    }

    run_report report =
        evaluate_run(sentences, specs, config, methods, *effective, mode, args.jobs);

    std::filesystem::create_directories(args.out_dir);
    write_file_atomic(out_path(args.out_dir, "grid_config.json").string(),
                      grid_config_to_json(config));
    write_file_atomic(out_path(args.out_dir, "report.json").string(),
                      run_report_to_json(report));
    write_file_atomic(out_path(args.out_dir, "report.txt").string(),
                      run_report_to_text(report));
    write_file_atomic(out_path(args.out_dir, "best_predictions.jsonl").string(),
                      predictions_to_jsonl(report.best_predictions, mode));

    run_metadata meta;
    meta.command = "zeroshot";
    meta.tool_version = std::string(tool_version);
    meta.backend_id = backend->id();
    meta.config_hash = config_hash_of(config);
    meta.fields.emplace_back("test", args.test_path);
    meta.fields.emplace_back("mode", std::string(to_string(mode)));
    meta.fields.emplace_back("methods", args.methods);
    meta.fields.emplace_back("sentences", std::to_string(sentences.size()));
    meta.fields.emplace_back("prompt_count", std::to_string(specs.size()));
    meta.fields.emplace_back("jobs", std::to_string(args.jobs));
    add_backend_counters(meta, *backend, caching.get());
    write_file_atomic(out_path(args.out_dir, "run_meta.json").string(),
                      run_metadata_to_json(meta));

    std::cout << run_report_to_text(report);
    return 0;
}

struct fewshot_args {
    std::string config_path;
    std::string test_path;
    std::string train_path;
    std::string grid_path;
    std::string backend_spec;
    std::string methods = "l1,l2,l3";
    std::string mode = "four_class";
    std::string prompts;
    std::string response_form = "bare";
    std::string cache_dir;
    std::string out_dir;
    std::size_t runs = 5;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    double timeout = 30.0;
    int retries = 2;
};

int cmd_fewshot(const fewshot_args& args) {
    grid_config config = load_grid_or_default(args.grid_path);
    std::vector<prompt_spec> specs = filter_specs(expand_grid(config), args.prompts);
    std::vector<likelihood_method> methods = parse_methods(args.methods);
    eval_mode mode = parse_eval_mode(args.mode);

    corpus test_corpus = load_corpus(args.test_path);
    corpus train_corpus = load_corpus(args.train_path);
    std::vector<labeled_sentence> test = mode == eval_mode::binary
                                             ? binary_subset(test_corpus.sentences)
                                             : test_corpus.sentences;
    if (test.empty()) throw data_error("no test sentences after mode filtering");

    remote_options remote_opts;
    remote_opts.timeout_seconds = args.timeout;
    remote_opts.retries = args.retries;
    std::unique_ptr<scorer_backend> backend =
        build_backend(args.backend_spec, test, specs, config, remote_opts);

    std::optional<score_cache> cache;
    std::unique_ptr<cached_backend> caching;
    scorer_backend* effective = backend.get();
    if (!args.cache_dir.empty()) {
        cache.emplace(args.cache_dir);
        caching = std::make_unique<cached_backend>(*backend, *cache);
        effective = caching.get();
    }

    few_shot_options options;
    options.runs = args.runs;
    options.base_seed = args.seed;
    options.response_form = args.response_form;
    options.jobs = args.jobs;

    few_shot_report report = run_fewshot(test, train_corpus.sentences, specs, config,
                                         methods, *effective, mode, options);

    std::filesystem::create_directories(args.out_dir);
    write_file_atomic(out_path(args.out_dir, "grid_config.json").string(),
                      grid_config_to_json(config));
    write_file_atomic(out_path(args.out_dir, "report.json").string(),
                      few_shot_report_to_json(report));
    write_file_atomic(out_path(args.out_dir, "report.txt").string(),
                      few_shot_report_to_text(report));
    for (std::size_t r = 0; r < report.manifests.size(); ++r) {
        write_file_atomic(
            out_path(args.out_dir, "manifest_run" + std::to_string(r) + ".json").string(),
            few_shot_manifest_to_json(report.manifests[r]));
    }

    run_metadata meta;
    meta.command = "fewshot";
    meta.tool_version = std::string(tool_version);
    meta.backend_id = backend->id();
    meta.config_hash = config_hash_of(config);
    meta.fields.emplace_back("test", args.test_path);
    meta.fields.emplace_back("train", args.train_path);
    meta.fields.emplace_back("mode", std::string(to_string(mode)));
    meta.fields.emplace_back("methods", args.methods);
    meta.fields.emplace_back("runs", std::to_string(args.runs));
    meta.fields.emplace_back("base_seed", std::to_string(args.seed));
    meta.fields.emplace_back("response_form", args.response_form);
    meta.fields.emplace_back("sentences", std::to_string(test.size()));
    meta.fields.emplace_back("prompt_count", std::to_string(specs.size()));
    add_backend_counters(meta, *backend, caching.get());
    write_file_atomic(out_path(args.out_dir, "run_meta.json").string(),
                      run_metadata_to_json(meta));

    std::cout << few_shot_report_to_text(report);
    return 0;
}

int cmd_baseline(const std::string& train_path, const std::string& test_path,
                 double smoothing, std::size_t top_k, bool no_fold,
                 std::size_t mc_reps, std::uint64_t seed, const std::string& out_dir) {
    corpus train_corpus = load_corpus(train_path);
    corpus test_corpus = load_corpus(test_path);

    nb_model model = train_nb(train_corpus.sentences, smoothing, top_k, !no_fold);

    baseline_report report;
    report.four_class = evaluate_nb(model, test_corpus.sentences, false);
    report.binary = evaluate_nb(model, test_corpus.sentences, true);
    report.vocab_size = model.vocab.tokens.size();
    report.removed_top = model.vocab.removed_top;

    class_distribution test_dist = distribution_of(test_corpus.sentences);
    class_distribution binary_dist =
        distribution_of(binary_subset(test_corpus.sentences));
    std::vector<sentiment_label> four{canonical_labels.begin(), canonical_labels.end()};
    std::vector<sentiment_label> two{binary_labels.begin(), binary_labels.end()};
    report.random_four_class = random_baseline_macro_f1(test_dist, four);
    report.random_binary = random_baseline_macro_f1(binary_dist, two);

    std::filesystem::create_directories(out_dir);
    save_nb(model, out_path(out_dir, "model.json").string());
    write_file_atomic(out_path(out_dir, "report.json").string(),
                      baseline_report_to_json(report));
    std::string text = baseline_report_to_text(report);
    if (mc_reps > 0) {
        mean_std mc_four = mc_random_baseline(test_dist, four, mc_reps, seed);
        mean_std mc_two = mc_random_baseline(binary_dist, two, mc_reps, seed + 1);
        std::ostringstream extra;
        extra << "monte carlo random baseline (" << mc_reps << " reps, seed " << seed
              << "): four_class " << format_percent(mc_four.mean) << " +/- "
              << format_percent(mc_four.std_pop) << ", binary "
              << format_percent(mc_two.mean) << " +/- " << format_percent(mc_two.std_pop)
              << "\n";
        text += extra.str();
    }
    write_file_atomic(out_path(out_dir, "report.txt").string(), text);

    run_metadata meta;
    meta.command = "baseline";
    meta.tool_version = std::string(tool_version);
    meta.fields.emplace_back("train", train_path);
    meta.fields.emplace_back("test", test_path);
    meta.fields.emplace_back("smoothing", std::to_string(smoothing));
    meta.fields.emplace_back("top_k", std::to_string(top_k));
    meta.fields.emplace_back("fold_case", no_fold ? "false" : "true");
    write_file_atomic(out_path(out_dir, "run_meta.json").string(),
                      run_metadata_to_json(meta));

    std::cout << text;
    return 0;
}

int cmd_iaa(const std::string& corpus_path, const std::vector<std::string>& prediction_paths,
            const std::string& mode_text, const std::string& out_dir) {
    eval_mode mode = parse_eval_mode(mode_text);
    std::vector<sentiment_label> allowed =
        mode == eval_mode::binary
            ? std::vector<sentiment_label>{binary_labels.begin(), binary_labels.end()}
            : std::vector<sentiment_label>{canonical_labels.begin(),
                                           canonical_labels.end()};
    auto is_allowed = [&allowed](sentiment_label label) {
        return std::find(allowed.begin(), allowed.end(), label) != allowed.end();
    };

    corpus loaded = load_corpus(corpus_path);
    std::set<std::string> known_ids;
    std::map<std::string, rating_map> annotators;
    for (const labeled_sentence& sentence : loaded.sentences) {
        known_ids.insert(sentence.id);
        for (const auto& [rater, label] : sentence.annotator_labels) {
            if (!is_allowed(label)) continue;
            annotators[rater][sentence.id] = label;
        }
    }
    if (annotators.empty()) {
        throw data_error("corpus " + corpus_path + " has no annotator labels");
    }

    kappa_matrix matrix = build_kappa_matrix(annotators);
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_path(out_dir, "kappa.json").string(),
                      kappa_matrix_to_json(matrix));
    write_file_atomic(out_path(out_dir, "kappa.txt").string(),
                      kappa_matrix_to_text(matrix));
    std::cout << kappa_matrix_to_text(matrix);

    if (!prediction_paths.empty()) {
        std::vector<std::pair<std::string, rating_map>> model_runs;
        for (const std::string& path : prediction_paths) {
            for (const prediction_group& group : load_predictions(path)) {
                for (const auto& [id, label] : group.labels) {
                    (void)label;
                    if (!known_ids.count(id)) {
                        throw data_error("predictions file " + path +
                                         " names sentence id '" + id +
                                         "' that is not in the corpus");
                    }
                }
                std::string name = group.prompt_code + "/" + group.method;
                if (group.mode != std::string(to_string(mode))) {
                    name += "(" + group.mode + ")";
                }
                model_runs.emplace_back(std::move(name), group.labels);
            }
        }
        agreement_table table = model_vs_annotators(model_runs, annotators, allowed);
        write_file_atomic(out_path(out_dir, "model_agreement.json").string(),
                          agreement_table_to_json(table));
        write_file_atomic(out_path(out_dir, "model_agreement.txt").string(),
                          agreement_table_to_text(table));
        std::cout << "\n" << agreement_table_to_text(table);
    }

    run_metadata meta;
    meta.command = "iaa";
    meta.tool_version = std::string(tool_version);
    meta.fields.emplace_back("corpus", corpus_path);
    meta.fields.emplace_back("mode", mode_text);
    meta.fields.emplace_back("annotators", std::to_string(annotators.size()));
    meta.fields.emplace_back("prediction_files", std::to_string(prediction_paths.size()));
    write_file_atomic(out_path(out_dir, "run_meta.json").string(),
                      run_metadata_to_json(meta));
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_file) {
    std::string text = render_text_from_json(read_file(in_path));
    if (out_file.empty() || out_file == "-") {
        std::cout << text;
    } else {
        write_file_atomic(out_file, text);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained-completion sentiment classification toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version));

    // split
    auto* split = app.add_subcommand("split", "stratified 50/50 train/test split");
    std::string split_corpus, split_out;
    std::uint64_t split_seed = 42;
    split->add_option("--corpus", split_corpus, "labeled corpus (JSONL)")->required();
    split->add_option("--seed", split_seed, "shuffle seed");
    split->add_option("--out", split_out, "output directory")->required();

    // gen-prompts
    auto* gen = app.add_subcommand("gen-prompts", "expand the prompt grid and reply sets");
    std::string gen_grid, gen_out, gen_dump;
    gen->add_option("--grid", gen_grid, "grid config JSON (default: built-in grid)");
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--dump-config", gen_dump, "write the effective grid config ('-' = stdout)");

    // zeroshot
    auto* zero = app.add_subcommand("zeroshot", "zero-shot evaluation over the grid");
    zeroshot_args za;
    auto* zero_config = zero->add_option("--config", za.config_path, "run config JSON");
    auto* zero_test = zero->add_option("--test", za.test_path, "test corpus (JSONL)");
    auto* zero_grid = zero->add_option("--grid", za.grid_path, "grid config JSON");
    auto* zero_backend =
        zero->add_option("--backend", za.backend_spec,
                         "mock-random[:seed] | mock-oracle | http URL (default: env)");
    auto* zero_methods = zero->add_option("--methods", za.methods, "subset of l1,l2,l3");
    auto* zero_mode = zero->add_option("--mode", za.mode, "four_class | binary");
    auto* zero_prompts = zero->add_option("--prompts", za.prompts, "comma-separated code filter");
    auto* zero_cache = zero->add_option("--cache", za.cache_dir, "response cache directory");
    auto* zero_out = zero->add_option("--out", za.out_dir, "output directory");
    auto* zero_jobs = zero->add_option("--jobs", za.jobs, "concurrent scoring workers");
    zero->add_option("--timeout", za.timeout, "remote timeout seconds");
    zero->add_option("--retries", za.retries, "remote retries after first attempt");

    // fewshot
    auto* few = app.add_subcommand("fewshot", "few-shot evaluation with sampled contexts");
    fewshot_args fa;
    auto* few_config = few->add_option("--config", fa.config_path, "run config JSON");
    auto* few_test = few->add_option("--test", fa.test_path, "test corpus (JSONL)");
    auto* few_train = few->add_option("--train", fa.train_path, "train corpus (JSONL)");
    auto* few_grid = few->add_option("--grid", fa.grid_path, "grid config JSON");
    auto* few_backend =
        few->add_option("--backend", fa.backend_spec,
                        "mock-random[:seed] | mock-oracle | http URL (default: env)");
    auto* few_methods = few->add_option("--methods", fa.methods, "subset of l1,l2,l3");
    auto* few_mode = few->add_option("--mode", fa.mode, "four_class | binary");
    auto* few_prompts = few->add_option("--prompts", fa.prompts, "comma-separated code filter");
    auto* few_runs = few->add_option("--runs", fa.runs, "number of seeded runs");
    auto* few_seed = few->add_option("--seed", fa.seed, "base seed (run r uses seed+r)");
    auto* few_form =
        few->add_option("--response-form", fa.response_form, "reply form for demonstrations");
    auto* few_cache = few->add_option("--cache", fa.cache_dir, "response cache directory");
    auto* few_out = few->add_option("--out", fa.out_dir, "output directory");
    auto* few_jobs = few->add_option("--jobs", fa.jobs, "concurrent scoring workers");
    few->add_option("--timeout", fa.timeout, "remote timeout seconds");
    few->add_option("--retries", fa.retries, "remote retries after first attempt");

    // baseline
    auto* base = app.add_subcommand("baseline", "naive Bayes and random baselines");
    std::string base_train, base_test, base_out;
    double base_smoothing = 1.0;
    std::size_t base_topk = 20;
    bool base_nofold = false;
    std::size_t base_mc = 0;
    std::uint64_t base_seed = 7;
    base->add_option("--train", base_train, "train corpus (JSONL)")->required();
    base->add_option("--test", base_test, "test corpus (JSONL)")->required();
    base->add_option("--smoothing", base_smoothing, "add-alpha smoothing");
    base->add_option("--top-k", base_topk, "most frequent tokens to remove");
    base->add_flag("--no-fold", base_nofold, "skip case folding");
    base->add_option("--mc-reps", base_mc, "extra Monte Carlo repetitions for the random baseline");
    base->add_option("--seed", base_seed, "Monte Carlo seed");
    base->add_option("--out", base_out, "output directory")->required();

    // iaa
    auto* iaa = app.add_subcommand("iaa", "inter-annotator and model-annotator agreement");
    std::string iaa_corpus, iaa_mode = "four_class", iaa_out;
    std::vector<std::string> iaa_predictions;
    iaa->add_option("--corpus", iaa_corpus, "corpus with annotator_labels")->required();
    iaa->add_option("--predictions", iaa_predictions, "prediction JSONL files (repeatable)");
    iaa->add_option("--mode", iaa_mode, "four_class | binary label set");
    iaa->add_option("--out", iaa_out, "output directory")->required();

    // report
    auto* rep = app.add_subcommand("report", "render a JSON artifact as a text table");
    std::string rep_in, rep_out;
    rep->add_option("--in", rep_in, "report JSON file")->required();
    rep->add_option("--out", rep_out, "output text file ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return exit_config_error;
    }

    try {
        if (*split) return cmd_split(split_corpus, split_seed, split_out);
        if (*gen) return cmd_gen_prompts(gen_grid, gen_out, gen_dump);
        if (*zero) {
            config_file cfg;
            if (zero_config->count() > 0) cfg.load(za.config_path);
            cfg.apply_string(zero_test, "test", za.test_path);
            cfg.apply_string(zero_grid, "grid", za.grid_path);
            cfg.apply_string(zero_backend, "backend", za.backend_spec);
            cfg.apply_string(zero_methods, "methods", za.methods);
            cfg.apply_string(zero_mode, "mode", za.mode);
            cfg.apply_string(zero_prompts, "prompts", za.prompts);
            cfg.apply_string(zero_cache, "cache", za.cache_dir);
            cfg.apply_string(zero_out, "out", za.out_dir);
            cfg.apply_number(zero_jobs, "jobs", za.jobs);
            if (za.test_path.empty()) throw config_error("zeroshot needs --test");
            if (za.out_dir.empty()) throw config_error("zeroshot needs --out");
            return cmd_zeroshot(za);
        }
        if (*few) {
            config_file cfg;
            if (few_config->count() > 0) cfg.load(fa.config_path);
            cfg.apply_string(few_test, "test", fa.test_path);
            cfg.apply_string(few_train, "train", fa.train_path);
            cfg.apply_string(few_grid, "grid", fa.grid_path);
            cfg.apply_string(few_backend, "backend", fa.backend_spec);
            cfg.apply_string(few_methods, "methods", fa.methods);
            cfg.apply_string(few_mode, "mode", fa.mode);
            cfg.apply_string(few_prompts, "prompts", fa.prompts);
            cfg.apply_string(few_form, "response_form", fa.response_form);
            cfg.apply_string(few_cache, "cache", fa.cache_dir);
            cfg.apply_string(few_out, "out", fa.out_dir);
            cfg.apply_number(few_runs, "runs", fa.runs);
            cfg.apply_number(few_seed, "seed", fa.seed);
            cfg.apply_number(few_jobs, "jobs", fa.jobs);
            if (fa.test_path.empty()) throw config_error("fewshot needs --test");
            if (fa.train_path.empty()) throw config_error("fewshot needs --train");
            if (fa.out_dir.empty()) throw config_error("fewshot needs --out");
            return cmd_fewshot(fa);
        }
        if (*base) {
            return cmd_baseline(base_train, base_test, base_smoothing, base_topk,
                                base_nofold, base_mc, base_seed, base_out);
        }
        if (*iaa) return cmd_iaa(iaa_corpus, iaa_predictions, iaa_mode, iaa_out);
        if (*rep) return cmd_report(rep_in, rep_out);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data_error;
    } catch (const backend_error& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return exit_backend_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
