#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "replikk/backend.hpp"

namespace replikk {

// On-disk response store keyed by (backend id, context, completion). Entries
// are grouped into bucket files named by a hash of the key, fanned out over
// 256 subdirectories; lookups compare the full key, so hash collisions are
// handled exactly. Writes go through a temp file and rename, so a reader
// never sees a torn bucket. Reads take no lock (rename is atomic); writes
// serialize per hash shard. Safe for concurrent use within one process.
class score_cache {
  public:
    explicit score_cache(std::filesystem::path directory);

    std::optional<std::vector<token_logprob>> get(const std::string& backend_id,
                                                  const std::string& context,
                                                  const std::string& completion);

    void put(const std::string& backend_id, const std::string& context,
             const std::string& completion, const std::vector<token_logprob>& tokens);

    const std::filesystem::path& directory() const { return directory_; }

  private:
    std::filesystem::path bucket_path(std::uint64_t key_hash) const;

    std::filesystem::path directory_;
    std::array<std::mutex, 64> shards_;
};

// Backend decorator that consults the cache before its inner backend and
// stores fresh responses. The inner backend's call counter moves only on
// cache misses, which is how replay tests assert zero upstream traffic.
class cached_backend : public scorer_backend {
  public:
    cached_backend(scorer_backend& inner, score_cache& cache)
        : inner_(inner), cache_(cache) {}

    std::string id() const override { return inner_.id(); }

    std::uint64_t hits() const { return hits_.load(); }
    std::uint64_t misses() const { return misses_.load(); }

  protected:
    std::vector<token_logprob> do_logprobs(const std::string& context,
                                           const std::string& completion) override;
    std::vector<std::vector<token_logprob>> do_logprobs_batch(
        const std::vector<score_request>& items) override;

  private:
    scorer_backend& inner_;
    score_cache& cache_;
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> misses_{0};
};

} // namespace replikk
