#pragma once

#include <stdexcept>
#include <string>

namespace replikk {

// Error taxonomy mirrors the CLI exit codes: config=2, data=3, backend=4.
struct replikk_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad grid config, unknown prompt code, invalid flag combination.
struct config_error : replikk_error {
    using replikk_error::replikk_error;
};

// Corpus parse failures, duplicate ids, label mismatches, io problems.
struct data_error : replikk_error {
    using replikk_error::replikk_error;
};

// Scorer failures: transport errors, malformed responses, non-finite logprobs.
struct backend_error : replikk_error {
    using replikk_error::replikk_error;
};

inline constexpr int exit_config_error = 2;
inline constexpr int exit_data_error = 3;
inline constexpr int exit_backend_error = 4;

} // namespace replikk
