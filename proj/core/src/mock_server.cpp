#include "replikk/mock_server.hpp"

#include <atomic>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "replikk/errors.hpp"

namespace replikk {

using nlohmann::json;

struct score_server::impl {
    scorer_backend& backend;
    options opts;
    httplib::Server server;
    std::thread worker;
    int bound_port = 0;
    std::atomic<std::uint64_t> requests{0};
    std::atomic<int> failures_left{0};

    impl(scorer_backend& backend_in, options opts_in)
        : backend(backend_in), opts(opts_in), failures_left(opts_in.fail_first) {}

    static void reply_error(httplib::Response& res, int status, const std::string& message) {
        json body;
        body["error"] = message;
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    bool maybe_fail(httplib::Response& res) {
        if (failures_left.load() > 0 && failures_left.fetch_sub(1) > 0) {
            reply_error(res, 503, "induced failure");
            return true;
        }
        return false;
    }

    static json scored_to_json(const std::vector<token_logprob>& tokens) {
        json texts = json::array();
        json logprobs = json::array();
        for (const token_logprob& token : tokens) {
            texts.push_back(token.token_text);
            logprobs.push_back(token.logprob);
        }
        return json{{"tokens", std::move(texts)}, {"logprobs", std::move(logprobs)}};
    }

    void handle_score(const httplib::Request& req, httplib::Response& res) {
        requests.fetch_add(1);
        if (maybe_fail(res)) return;
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error& e) {
            reply_error(res, 400, std::string("invalid JSON: ") + e.what());
            return;
        }
        if (!body.is_object() || !body.contains("context") ||
            !body["context"].is_string() || !body.contains("completion") ||
            !body["completion"].is_string()) {
            reply_error(res, 400, "request must have string fields context and completion");
            return;
        }
        try {
            std::vector<token_logprob> tokens = backend.logprobs(
                body["context"].get<std::string>(), body["completion"].get<std::string>());
            res.set_content(scored_to_json(tokens).dump(), "application/json");
        } catch (const std::exception& e) {
            reply_error(res, 500, e.what());
        }
    }

    void handle_batch(const httplib::Request& req, httplib::Response& res) {
        requests.fetch_add(1);
        if (maybe_fail(res)) return;
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error& e) {
            reply_error(res, 400, std::string("invalid JSON: ") + e.what());
            return;
        }
        if (!body.is_object() || !body.contains("items") || !body["items"].is_array()) {
            reply_error(res, 400, "request must have an items array");
            return;
        }
        std::vector<score_request> items;
        for (const json& item : body["items"]) {
            if (!item.is_object() || !item.contains("context") ||
                !item["context"].is_string() || !item.contains("completion") ||
                !item["completion"].is_string()) {
                reply_error(res, 400, "each item needs string context and completion");
                return;
            }
            items.push_back({item["context"].get<std::string>(),
                             item["completion"].get<std::string>()});
        }
        try {
            std::vector<std::vector<token_logprob>> results = backend.logprobs_batch(items);
            json out = json::array();
            for (const auto& tokens : results) out.push_back(scored_to_json(tokens));
            res.set_content(json{{"results", std::move(out)}}.dump(), "application/json");
        } catch (const std::exception& e) {
            reply_error(res, 500, e.what());
        }
    }

    void start() {
        server.Post("/v1/score", [this](const httplib::Request& req,
                                        httplib::Response& res) { handle_score(req, res); });
        if (!opts.disable_batch) {
            server.Post("/v1/score_batch",
                        [this](const httplib::Request& req, httplib::Response& res) {
                            handle_batch(req, res);
                        });
        }
        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            json body;
            body["ok"] = true;
            body["backend"] = backend.id();
            res.set_content(body.dump(), "application/json");
        });

        if (opts.port == 0) {
            bound_port = server.bind_to_any_port("127.0.0.1");
            if (bound_port <= 0) throw backend_error("mock server: cannot bind a port");
        } else {
            if (!server.bind_to_port("127.0.0.1", opts.port)) {
                std::ostringstream msg;
                msg << "mock server: cannot bind port " << opts.port;
                throw backend_error(msg.str());
            }
            bound_port = opts.port;
        }
        worker = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    void stop() {
        if (worker.joinable()) {
            server.stop();
            worker.join();
        }
    }
};

score_server::score_server(scorer_backend& backend)
    : score_server(backend, options{}) {}

score_server::score_server(scorer_backend& backend, options opts)
    : impl_(std::make_unique<impl>(backend, opts)) {
    impl_->start();
}

score_server::~score_server() { impl_->stop(); }

int score_server::port() const { return impl_->bound_port; }

std::string score_server::url() const {
    std::ostringstream out;
    out << "http://127.0.0.1:" << impl_->bound_port;
    return out.str();
}

void score_server::stop() { impl_->stop(); }

std::uint64_t score_server::requests() const { return impl_->requests.load(); }

} // namespace replikk
