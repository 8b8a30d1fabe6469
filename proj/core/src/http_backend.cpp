#include "replikk/http_backend.hpp"

#include <chrono>
#include <mutex>
#include <optional>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "replikk/errors.hpp"

namespace replikk {

using nlohmann::json;

namespace {

struct parsed_url {
    std::string origin; // scheme://host:port
    std::string prefix; // path prefix, possibly empty, no trailing slash
};

parsed_url parse_url(const std::string& url) {
    if (url.rfind("https://", 0) == 0) {
        throw config_error("https backends are not supported, use http: " + url);
    }
    if (url.rfind("http://", 0) != 0) {
        throw config_error("backend url must start with http://: " + url);
    }
    std::size_t authority_start = 7;
    std::size_t path_start = url.find('/', authority_start);
    parsed_url out;
    if (path_start == std::string::npos) {
        out.origin = url;
    } else {
        out.origin = url.substr(0, path_start);
        out.prefix = url.substr(path_start);
        while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    }
    if (out.origin.size() <= authority_start) {
        throw config_error("backend url has no host: " + url);
    }
    return out;
}

std::vector<token_logprob> tokens_from_json(const json& node, const std::string& what) {
    if (!node.is_object() || !node.contains("tokens") || !node.contains("logprobs")) {
        throw backend_error(what + ": response lacks tokens/logprobs");
    }
    const json& texts = node["tokens"];
    const json& logprobs = node["logprobs"];
    if (!texts.is_array() || !logprobs.is_array() || texts.size() != logprobs.size()) {
        throw backend_error(what + ": tokens and logprobs must be equal-length arrays");
    }
    std::vector<token_logprob> tokens;
    tokens.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!texts[i].is_string() || !logprobs[i].is_number()) {
            throw backend_error(what + ": malformed token entry");
        }
        tokens.push_back({texts[i].get<std::string>(), logprobs[i].get<double>()});
    }
    return tokens;
}

std::string error_from_body(const std::string& body) {
    try {
        json node = json::parse(body);
        if (node.is_object() && node.contains("error") && node["error"].is_string()) {
            return node["error"].get<std::string>();
        }
    } catch (const json::parse_error&) {
    }
    if (body.empty()) return "(empty body)";
    return body.size() > 200 ? body.substr(0, 200) + "..." : body;
}

} // namespace

struct remote_backend::impl {
    std::string url;
    parsed_url parts;
    remote_options options;
    httplib::Client client;
    std::mutex mutex;
    bool batch_unsupported = false;

    impl(std::string url_in, remote_options options_in)
        : url(std::move(url_in)), parts(parse_url(url)), options(options_in),
          client(parts.origin) {
        auto seconds = static_cast<time_t>(options.timeout_seconds);
        auto micros = static_cast<time_t>(
            (options.timeout_seconds - static_cast<double>(seconds)) * 1e6);
        client.set_connection_timeout(seconds, micros);
        client.set_read_timeout(seconds, micros);
        client.set_write_timeout(seconds, micros);
        client.set_keep_alive(true);
    }

    // Posts with the retry policy: transport errors and 5xx are retried with
    // linear backoff, other statuses are final. Returns the 200 body, or
    // nullopt on 404 when allow_404 is set (batch endpoint probing).
    std::optional<std::string> post_with_retries(const std::string& path,
                                                 const std::string& body,
                                                 const std::string& what,
                                                 bool allow_404) {
        int attempts = options.retries + 1;
        std::string last_failure = "unknown error";
        for (int attempt = 1; attempt <= attempts; ++attempt) {
            httplib::Result result;
            {
                std::lock_guard<std::mutex> lock(mutex);
                result = client.Post(parts.prefix + path, body, "application/json");
            }
            if (!result) {
                last_failure = "transport error: " + httplib::to_string(result.error());
            } else if (result->status == 200) {
                return result->body;
            } else if (result->status == 404 && allow_404) {
                return std::nullopt;
            } else {
                last_failure = "HTTP " + std::to_string(result->status) + ": " +
                               error_from_body(result->body);
                if (result->status < 500) {
                    throw backend_error(what + " failed: " + last_failure);
                }
            }
            if (attempt < attempts) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(options.backoff_ms * attempt));
            }
        }
        throw backend_error(what + " failed after " + std::to_string(attempts) +
                            " attempt(s): " + last_failure);
    }
};

remote_backend::remote_backend(std::string url, remote_options options)
    : impl_(std::make_unique<impl>(std::move(url), options)) {}

remote_backend::~remote_backend() = default;

std::string remote_backend::id() const { return "remote:" + impl_->url; }

std::vector<token_logprob> remote_backend::do_logprobs(const std::string& context,
                                                       const std::string& completion) {
    json request;
    request["context"] = context;
    request["completion"] = completion;
    std::string what = id() + " scoring completion '" + completion + "'";
    std::optional<std::string> body =
        impl_->post_with_retries("/v1/score", request.dump(), what, false);
    json response;
    try {
        response = json::parse(*body);
    } catch (const json::parse_error& e) {
        throw backend_error(what + ": invalid JSON in response: " + e.what());
    }
    return tokens_from_json(response, what);
}

std::vector<std::vector<token_logprob>> remote_backend::do_logprobs_batch(
    const std::vector<score_request>& items) {
    if (!impl_->batch_unsupported) {
        json array = json::array();
        for (const score_request& item : items) {
            array.push_back({{"context", item.context}, {"completion", item.completion}});
        }
        json request;
        request["items"] = std::move(array);
        std::string what = id() + " batch of " + std::to_string(items.size());
        std::optional<std::string> body =
            impl_->post_with_retries("/v1/score_batch", request.dump(), what, true);
        if (body) {
            json response;
            try {
                response = json::parse(*body);
            } catch (const json::parse_error& e) {
                throw backend_error(what + ": invalid JSON in response: " + e.what());
            }
            if (!response.is_object() || !response.contains("results") ||
                !response["results"].is_array() ||
                response["results"].size() != items.size()) {
                throw backend_error(what + ": malformed results array");
            }
            std::vector<std::vector<token_logprob>> results;
            results.reserve(items.size());
            for (std::size_t i = 0; i < items.size(); ++i) {
                results.push_back(
                    tokens_from_json(response["results"][i],
                                     id() + " batch item '" + items[i].completion + "'"));
            }
            return results;
        }
        impl_->batch_unsupported = true; // 404: server has no batch endpoint
    }
    return scorer_backend::do_logprobs_batch(items);
}

} // namespace replikk
