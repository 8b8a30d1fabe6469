#include "replikk/rng.hpp"

#include "replikk/errors.hpp"

namespace replikk {

std::uint64_t seeded_rng::bounded(std::uint64_t bound) {
    if (bound == 0) throw replikk_error("seeded_rng::bounded: bound must be > 0");
    // Largest multiple of bound that fits; rejects draws above it.
    std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    while (true) {
        std::uint64_t draw = engine_();
        if (draw <= limit) return draw % bound;
    }
}

double seeded_rng::unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t value) {
    value += 0x9e3779b97f4a7c15ULL;
    value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
    value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
    return value ^ (value >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x6a09e667f3bcc908ULL;
    for (std::uint64_t part : parts) {
        state = splitmix64(state ^ part);
    }
    return state;
}

} // namespace replikk
