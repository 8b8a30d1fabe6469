#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "replikk/backend.hpp"

namespace replikk {

// In-process HTTP server speaking the scoring wire protocol, backed by any
// scorer_backend. Serves POST /v1/score and /v1/score_batch plus GET
// /health. Runs on a background thread from construction until stop() or
// destruction. Malformed requests get status 400 with {"error": ...};
// backend failures get 500.
class score_server {
  public:
    struct options {
        int port = 0;       // 0 picks a free port
        int fail_first = 0; // respond 503 to the first N score requests
        bool disable_batch = false;
    };

    explicit score_server(scorer_backend& backend);
    score_server(scorer_backend& backend, options opts);
    ~score_server();

    score_server(const score_server&) = delete;
    score_server& operator=(const score_server&) = delete;

    int port() const;
    std::string url() const; // http://127.0.0.1:{port}
    void stop();

    // Score requests handled, including induced failures.
    std::uint64_t requests() const;

  private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

} // namespace replikk
