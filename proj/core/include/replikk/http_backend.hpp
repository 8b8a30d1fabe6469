#pragma once

#include <memory>
#include <string>
#include <vector>

#include "replikk/backend.hpp"

namespace replikk {

struct remote_options {
    double timeout_seconds = 30.0;
    // Extra attempts after the first, on transport errors and 5xx only.
    int retries = 2;
    int backoff_ms = 200;
};

// Name of the environment variable consulted when no backend URL is given
// explicitly.
inline constexpr const char* backend_url_env = "REPLIKK_BACKEND_URL";

// Client for the scoring wire protocol:
//   POST {base}/v1/score        {"context": c, "completion": x}
//     -> 200 {"tokens": [t...], "logprobs": [p...]}   (equal lengths)
//     -> else {"error": reason}
//   POST {base}/v1/score_batch  {"items": [{"context","completion"}...]}
//     -> 200 {"results": [{"tokens","logprobs"}...]}
// A server without the batch endpoint (404) degrades to per-item calls.
class remote_backend : public scorer_backend {
  public:
    explicit remote_backend(std::string url, remote_options options = {});
    ~remote_backend() override;

    std::string id() const override;

  protected:
    std::vector<token_logprob> do_logprobs(const std::string& context,
                                           const std::string& completion) override;
    std::vector<std::vector<token_logprob>> do_logprobs_batch(
        const std::vector<score_request>& items) override;

  private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

} // namespace replikk
