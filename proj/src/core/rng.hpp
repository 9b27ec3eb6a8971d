#pragma once

#include <cstdint>
#include <span>

namespace beeid {

/// Counter-mode PRNG: every stream is a pure function of (master_seed, stream
/// ids), so trial results do not depend on execution order or thread count.
/// Generation is splitmix64 over a per-stream key.
class CounterRng {
public:
    CounterRng(uint64_t master_seed, uint64_t stream, uint64_t substream = 0) {
        state_ = mix(mix(mix(0x9e3779b97f4a7c15ull ^ master_seed) + stream) + substream);
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        // rejection sampling keeps the draw exactly uniform
        const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Index sample from a probability vector by CDF inversion, fixed scan order.
    int sample(std::span<const double> probs) {
        const double u = next_double();
        double acc = 0.0;
        for (size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
        return z ^ (z >> 33);
    }
    uint64_t state_;
};

/// Stream tags keep independent random uses of one trial decoupled.
enum class RngStream : uint64_t {
    codebook = 1,
    permutation = 2,
    channel = 3,
    decoder = 4,
};

inline CounterRng trial_rng(uint64_t master_seed, uint64_t trial, RngStream tag) {
    return CounterRng(master_seed, trial, static_cast<uint64_t>(tag));
}

}  // namespace beeid
