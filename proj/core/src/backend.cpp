#include "replikk/backend.hpp"

#include <cmath>
#include <sstream>

#include "replikk/errors.hpp"
#include "replikk/rng.hpp"
#include "replikk/text.hpp"

namespace replikk {

std::vector<token_logprob> scorer_backend::logprobs(const std::string& context,
                                                    const std::string& completion) {
    calls_.fetch_add(1);
    std::vector<token_logprob> tokens = do_logprobs(context, completion);
    validate_logprobs(tokens, completion, id());
    return tokens;
}

std::vector<std::vector<token_logprob>> scorer_backend::logprobs_batch(
    const std::vector<score_request>& items) {
    calls_.fetch_add(items.size());
    std::vector<std::vector<token_logprob>> results = do_logprobs_batch(items);
    if (results.size() != items.size()) {
        throw backend_error("backend " + id() + " returned " +
                            std::to_string(results.size()) + " results for " +
                            std::to_string(items.size()) + " requests");
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        validate_logprobs(results[i], items[i].completion, id());
    }
    return results;
}

std::vector<std::vector<token_logprob>> scorer_backend::do_logprobs_batch(
    const std::vector<score_request>& items) {
    std::vector<std::vector<token_logprob>> results;
    results.reserve(items.size());
    for (const score_request& item : items) {
        std::vector<token_logprob> tokens = do_logprobs(item.context, item.completion);
        results.push_back(std::move(tokens));
    }
    return results;
}

void validate_logprobs(const std::vector<token_logprob>& tokens,
                       const std::string& completion, const std::string& backend_id) {
    if (tokens.empty()) {
        throw backend_error("backend " + backend_id +
                            " returned no tokens for completion '" + completion + "'");
    }
    for (const token_logprob& token : tokens) {
        if (token.token_text.empty()) {
            throw backend_error("backend " + backend_id +
                                " returned an empty token for completion '" + completion +
                                "'");
        }
        if (!std::isfinite(token.logprob)) {
            throw backend_error("backend " + backend_id +
                                " returned a non-finite logprob for completion '" +
                                completion + "'");
        }
    }
}

std::string hash_backend::id() const {
    std::ostringstream out;
    out << "mock-random:" << seed_;
    return out.str();
}

std::vector<token_logprob> hash_backend::do_logprobs(const std::string& context,
                                                     const std::string& completion) {
    std::vector<std::string> words = whitespace_tokenize(completion);
    if (words.empty()) words.push_back(completion.empty() ? "<empty>" : completion);

    std::uint64_t base =
        derive_seed({seed_, fnv1a64(context), fnv1a64(completion)});
    std::vector<token_logprob> tokens;
    tokens.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::uint64_t mixed = splitmix64(base ^ (i + 1));
        // Map to [0, 1) then to a logprob in [-4.05, -0.05].
        double unit = static_cast<double>(mixed >> 11) * 0x1.0p-53;
        tokens.push_back({words[i], -0.05 - 4.0 * unit});
    }
    return tokens;
}

oracle_backend::oracle_backend(
    std::vector<std::pair<std::string, sentiment_label>> gold_texts,
    std::map<std::string, sentiment_label> reply_classes, double match_logprob,
    double mismatch_logprob)
    : gold_texts_(std::move(gold_texts)),
      reply_classes_(std::move(reply_classes)),
      match_logprob_(match_logprob),
      mismatch_logprob_(mismatch_logprob) {
    if (gold_texts_.empty()) throw config_error("oracle backend needs gold texts");
    if (reply_classes_.empty()) throw config_error("oracle backend needs a reply map");
    // The gold set is part of the identity so caches for different corpora
    // never alias.
    std::ostringstream blob;
    for (const auto& [text, label] : gold_texts_) {
        blob << text << '\x1f' << to_string(label) << '\x1e';
    }
    for (const auto& [text, label] : reply_classes_) {
        blob << text << '\x1f' << to_string(label) << '\x1e';
    }
    blob << match_logprob_ << '\x1f' << mismatch_logprob_;
    id_ = "mock-oracle:" + to_hex(fnv1a64(blob.str()));
}

sentiment_label oracle_backend::gold_for_context(const std::string& context) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = context_cache_.find(context);
        if (it != context_cache_.end()) return it->second;
    }
    // Pick the gold text whose last occurrence in the context ends last;
    // among equals prefer the longer text. In few-shot contexts several gold
    // sentences appear; the target query is the final one.
    bool found = false;
    std::size_t best_end = 0;
    std::size_t best_len = 0;
    sentiment_label best_label = sentiment_label::pos;
    for (const auto& [text, label] : gold_texts_) {
        std::size_t pos = context.rfind(text);
        if (pos == std::string::npos) continue;
        std::size_t end = pos + text.size();
        if (!found || end > best_end ||
            (end == best_end && text.size() > best_len)) {
            found = true;
            best_end = end;
            best_len = text.size();
            best_label = label;
        }
    }
    if (!found) {
        throw backend_error("oracle backend: no known sentence found in context '" +
                            context + "'");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    context_cache_.emplace(context, best_label);
    return best_label;
}

std::vector<token_logprob> oracle_backend::do_logprobs(const std::string& context,
                                                       const std::string& completion) {
    auto reply_it = reply_classes_.find(completion);
    if (reply_it == reply_classes_.end()) {
        throw backend_error("oracle backend: unknown completion '" + completion + "'");
    }
    sentiment_label gold = gold_for_context(context);
    double per_token = reply_it->second == gold ? match_logprob_ : mismatch_logprob_;

    std::vector<std::string> words = whitespace_tokenize(completion);
    if (words.empty()) words.push_back(completion);
    std::vector<token_logprob> tokens;
    tokens.reserve(words.size());
    for (const std::string& word : words) tokens.push_back({word, per_token});
    return tokens;
}

} // namespace replikk
