#pragma once

#include <cstdint>
#include <random>

namespace qslice {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic splittable stream: one root seed, any number of independent
// substreams addressed by index. The engine is mt19937_64 (bit-exact by the
// standard); bounded draws are done here by mask rejection so the consumed
// stream does not depend on the C++ runtime.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64_next(s);
        s = a ^ (stream * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
        engine_.seed(splitmix64_next(s));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n). Unbiased: draw masked high bits until < n.
    std::uint32_t bounded(std::uint32_t n) {
        if (n <= 1) return 0;
        std::uint32_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        for (;;) {
            std::uint32_t v = static_cast<std::uint32_t>(engine_() >> 32) & mask;
            if (v < n) return v;
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace qslice
