#include "replikk/score_cache.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "replikk/errors.hpp"
#include "replikk/text.hpp"

namespace replikk {

using nlohmann::json;

namespace {

std::string cache_key(const std::string& backend_id, const std::string& context,
                      const std::string& completion) {
    std::string key;
    key.reserve(backend_id.size() + context.size() + completion.size() + 2);
    key += backend_id;
    key += '\x1f';
    key += context;
    key += '\x1f';
    key += completion;
    return key;
}

json entry_to_json(const std::string& backend_id, const std::string& context,
                   const std::string& completion,
                   const std::vector<token_logprob>& tokens) {
    json entry;
    entry["backend_id"] = backend_id;
    entry["context"] = context;
    entry["completion"] = completion;
    json token_texts = json::array();
    json logprobs = json::array();
    for (const token_logprob& token : tokens) {
        token_texts.push_back(token.token_text);
        logprobs.push_back(token.logprob);
    }
    entry["tokens"] = std::move(token_texts);
    entry["logprobs"] = std::move(logprobs);
    return entry;
}

} // namespace

score_cache::score_cache(std::filesystem::path directory)
    : directory_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) {
        throw data_error("cannot create cache directory " + directory_.string() + ": " +
                         ec.message());
    }
}

std::filesystem::path score_cache::bucket_path(std::uint64_t key_hash) const {
    std::string hex = to_hex(key_hash);
    return directory_ / hex.substr(0, 2) / (hex + ".json");
}

std::optional<std::vector<token_logprob>> score_cache::get(const std::string& backend_id,
                                                           const std::string& context,
                                                           const std::string& completion) {
    std::filesystem::path path =
        bucket_path(fnv1a64(cache_key(backend_id, context, completion)));
    std::ifstream input(path, std::ios::binary);
    if (!input) return std::nullopt;
    json bucket;
    try {
        input >> bucket;
    } catch (const json::parse_error&) {
        return std::nullopt; // unreadable bucket counts as a miss
    }
    if (!bucket.is_array()) return std::nullopt;
    for (const json& entry : bucket) {
        if (!entry.is_object()) continue;
        if (entry.value("backend_id", "") != backend_id) continue;
        if (entry.value("context", "") != context) continue;
        if (entry.value("completion", "") != completion) continue;
        const json& texts = entry.at("tokens");
        const json& logprobs = entry.at("logprobs");
        if (!texts.is_array() || !logprobs.is_array() || texts.size() != logprobs.size()) {
            return std::nullopt;
        }
        std::vector<token_logprob> tokens;
        tokens.reserve(texts.size());
        for (std::size_t i = 0; i < texts.size(); ++i) {
            tokens.push_back({texts[i].get<std::string>(), logprobs[i].get<double>()});
        }
        return tokens;
    }
    return std::nullopt;
}

void score_cache::put(const std::string& backend_id, const std::string& context,
                      const std::string& completion,
                      const std::vector<token_logprob>& tokens) {
    std::uint64_t key_hash = fnv1a64(cache_key(backend_id, context, completion));
    std::lock_guard<std::mutex> lock(shards_[key_hash & (shards_.size() - 1)]);
    std::filesystem::path path = bucket_path(key_hash);
    {
        std::error_code ec;
        std::filesystem::create_directory(path.parent_path(), ec);
    }

    json bucket = json::array();
    {
        std::ifstream input(path, std::ios::binary);
        if (input) {
            try {
                input >> bucket;
            } catch (const json::parse_error&) {
                bucket = json::array();
            }
            if (!bucket.is_array()) bucket = json::array();
        }
    }

    bool replaced = false;
    for (json& entry : bucket) {
        if (entry.is_object() && entry.value("backend_id", "") == backend_id &&
            entry.value("context", "") == context &&
            entry.value("completion", "") == completion) {
            entry = entry_to_json(backend_id, context, completion, tokens);
            replaced = true;
            break;
        }
    }
    if (!replaced) bucket.push_back(entry_to_json(backend_id, context, completion, tokens));

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream output(tmp, std::ios::binary | std::ios::trunc);
        if (!output) throw data_error("cannot write cache file " + tmp.string());
        output << bucket.dump();
        if (!output) throw data_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw data_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                         ec.message());
    }
}

std::vector<token_logprob> cached_backend::do_logprobs(const std::string& context,
                                                       const std::string& completion) {
    std::optional<std::vector<token_logprob>> hit =
        cache_.get(id(), context, completion);
    if (hit) {
        hits_.fetch_add(1);
        return std::move(*hit);
    }
    misses_.fetch_add(1);
    std::vector<token_logprob> tokens = inner_.logprobs(context, completion);
    cache_.put(id(), context, completion, tokens);
    return tokens;
}

std::vector<std::vector<token_logprob>> cached_backend::do_logprobs_batch(
    const std::vector<score_request>& items) {
    std::vector<std::vector<token_logprob>> results(items.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::optional<std::vector<token_logprob>> hit =
            cache_.get(id(), items[i].context, items[i].completion);
        if (hit) {
            hits_.fetch_add(1);
            results[i] = std::move(*hit);
        } else {
            missing.push_back(i);
        }
    }
    if (!missing.empty()) {
        misses_.fetch_add(missing.size());
        std::vector<score_request> fresh_requests;
        fresh_requests.reserve(missing.size());
        for (std::size_t i : missing) fresh_requests.push_back(items[i]);
        std::vector<std::vector<token_logprob>> fresh =
            inner_.logprobs_batch(fresh_requests);
        for (std::size_t k = 0; k < missing.size(); ++k) {
            cache_.put(id(), items[missing[k]].context, items[missing[k]].completion,
                       fresh[k]);
            results[missing[k]] = std::move(fresh[k]);
        }
    }
    return results;
}

} // namespace replikk
