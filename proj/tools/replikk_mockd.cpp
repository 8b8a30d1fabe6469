// Reference scoring server. Serves the wire protocol from a deterministic
// mock backend so remote runs can be exercised without a real model.

#include <chrono>
#include <csignal>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "replikk/backend.hpp"
#include "replikk/corpus.hpp"
#include "replikk/errors.hpp"
#include "replikk/mock_server.hpp"
#include "replikk/promptgrid.hpp"
#include "replikk/version.hpp"

namespace {

volatile std::sig_atomic_t stop_requested = 0;

void handle_signal(int) { stop_requested = 1; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic mock scoring server"};
    app.set_version_flag("--version", std::string(replikk::tool_version));

    int port = 8089;
    std::uint64_t seed = 1;
    std::string corpus_path;
    std::string grid_path;
    int fail_first = 0;
    bool no_batch = false;
    app.add_option("--port", port, "listen port (0 picks a free one)");
    app.add_option("--seed", seed, "hash backend seed");
    app.add_option("--corpus", corpus_path,
                   "serve a gold-aware oracle for this corpus instead of the hash backend");
    app.add_option("--grid", grid_path, "grid config for the oracle's reply map");
    app.add_option("--fail-first", fail_first, "respond 503 to the first N requests");
    app.add_flag("--no-batch", no_batch, "do not serve /v1/score_batch");

    CLI11_PARSE(app, argc, argv);

    try {
        std::unique_ptr<replikk::scorer_backend> backend;
        if (corpus_path.empty()) {
            backend = std::make_unique<replikk::hash_backend>(seed);
        } else {
            replikk::corpus loaded = replikk::load_corpus(corpus_path);
            std::vector<std::pair<std::string, replikk::sentiment_label>> golds;
            for (const replikk::labeled_sentence& sentence : loaded.sentences) {
                golds.emplace_back(sentence.text, sentence.gold);
            }
            replikk::grid_config config = grid_path.empty()
                                              ? replikk::default_grid_config()
                                              : replikk::load_grid_config(grid_path);
            std::map<std::string, replikk::sentiment_label> replies;
            for (const replikk::prompt_spec& spec : replikk::expand_grid(config)) {
                for (const auto& [text, label] :
                     replikk::reply_class_map(replikk::generate_replies(spec, config))) {
                    replies[text] = label;
                }
            }
            backend = std::make_unique<replikk::oracle_backend>(std::move(golds),
                                                                std::move(replies));
        }

        replikk::score_server::options opts;
        opts.port = port;
        opts.fail_first = fail_first;
        opts.disable_batch = no_batch;
        replikk::score_server server(*backend, opts);
        std::cout << "serving " << backend->id() << " on " << server.url() << std::endl;

        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (stop_requested == 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        server.stop();
        std::cout << "handled " << server.requests() << " requests\n";
        return 0;
    } catch (const replikk::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return replikk::exit_config_error;
    } catch (const replikk::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return replikk::exit_data_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
