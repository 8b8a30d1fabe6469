#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace replikk {

// All randomness flows through this wrapper. std::mt19937_64 has a
// standard-specified output sequence, and the draw helpers below avoid
// std::shuffle / std::uniform_int_distribution, whose results are
// implementation-defined. Same seed, same platform-independent stream.
class seeded_rng {
  public:
    explicit seeded_rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, bound). bound must be > 0. Rejection sampling keeps the
    // draw exactly uniform and deterministic.
    std::uint64_t bounded(std::uint64_t bound);

    // Uniform in [0, 1) with 53 bits of precision.
    double unit();

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        if (values.size() < 2) return;
        for (std::size_t i = values.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i + 1));
            using std::swap;
            swap(values[i], values[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

// splitmix64 output function; mixes a single 64-bit value.
std::uint64_t splitmix64(std::uint64_t value);

// Derives one stream seed from several components (base seed, indices).
// Order-sensitive, so (seed, 1, 2) and (seed, 2, 1) differ.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

} // namespace replikk
