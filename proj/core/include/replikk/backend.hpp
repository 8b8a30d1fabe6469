#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "replikk/labels.hpp"

namespace replikk {

struct token_logprob {
    std::string token_text;
    double logprob = 0.0;

    bool operator==(const token_logprob&) const = default;
};

struct score_request {
    std::string context;
    std::string completion;
};

// A scorer takes (context, completion) and returns the completion's tokens
// with their log-probabilities under the model, conditioned on the context.
// The backend owns tokenization; the token count it returns is the count
// every consumer uses. Implementations throw backend_error on failure and
// must never return non-finite logprobs.
class scorer_backend {
  public:
    virtual ~scorer_backend() = default;

    // Stable identity, part of every cache key.
    virtual std::string id() const = 0;

    std::vector<token_logprob> logprobs(const std::string& context,
                                        const std::string& completion);
    std::vector<std::vector<token_logprob>> logprobs_batch(
        const std::vector<score_request>& items);

    // Number of scoring calls that reached this backend (batch of k counts k).
    std::uint64_t calls() const { return calls_.load(); }

  protected:
    virtual std::vector<token_logprob> do_logprobs(const std::string& context,
                                                   const std::string& completion) = 0;
    // Default implementation loops over do_logprobs.
    virtual std::vector<std::vector<token_logprob>> do_logprobs_batch(
        const std::vector<score_request>& items);

  private:
    std::atomic<std::uint64_t> calls_{0};
};

// Validates a backend response: token count > 0 for non-empty completions,
// no empty token texts, all logprobs finite. Throws backend_error mentioning
// the completion otherwise.
void validate_logprobs(const std::vector<token_logprob>& tokens,
                       const std::string& completion, const std::string& backend_id);

// Wraps an arbitrary scoring function; handy in tests.
class function_backend : public scorer_backend {
  public:
    using scorer_fn =
        std::function<std::vector<token_logprob>(const std::string&, const std::string&)>;

    function_backend(std::string id, scorer_fn fn)
        : id_(std::move(id)), fn_(std::move(fn)) {}

    std::string id() const override { return id_; }

  protected:
    std::vector<token_logprob> do_logprobs(const std::string& context,
                                           const std::string& completion) override {
        return fn_(context, completion);
    }

  private:
    std::string id_;
    scorer_fn fn_;
};

// Deterministic pseudo-random scorer. Tokenizes the completion on
// whitespace; each token's logprob is a pure hash of (seed, context,
// completion, token index), so reruns and replays agree exactly.
class hash_backend : public scorer_backend {
  public:
    explicit hash_backend(std::uint64_t seed) : seed_(seed) {}

    std::string id() const override;

  protected:
    std::vector<token_logprob> do_logprobs(const std::string& context,
                                           const std::string& completion) override;

  private:
    std::uint64_t seed_;
};

// Gold-aware scorer for end-to-end checks. Knows every sentence text and its
// gold label plus the reply->class map; a completion whose class matches the
// gold label of the sentence found in the context scores well, everything
// else scores poorly. The sentence is located as the gold entry occurring
// last in the context (ties broken toward the longer text), which makes the
// oracle work for few-shot contexts too: the target query comes last.
class oracle_backend : public scorer_backend {
  public:
    oracle_backend(std::vector<std::pair<std::string, sentiment_label>> gold_texts,
                   std::map<std::string, sentiment_label> reply_classes,
                   double match_logprob = -0.01, double mismatch_logprob = -5.0);

    std::string id() const override { return id_; }

  protected:
    std::vector<token_logprob> do_logprobs(const std::string& context,
                                           const std::string& completion) override;

  private:
    sentiment_label gold_for_context(const std::string& context);

    std::vector<std::pair<std::string, sentiment_label>> gold_texts_;
    std::map<std::string, sentiment_label> reply_classes_;
    double match_logprob_;
    double mismatch_logprob_;
    std::string id_;
    std::mutex mutex_;
    std::unordered_map<std::string, sentiment_label> context_cache_;
};

} // namespace replikk
