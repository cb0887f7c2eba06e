#pragma once

#include <cstdint>
#include <random>

namespace nclab::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream identifier for (seed, index); scheduling-free by design:
// path k always sees the same stream no matter which worker runs it.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    return a ^ splitmix64(s);
}

// mt19937_64 plus a Marsaglia-polar normal sampler (avoids the
// implementation-defined std::normal_distribution).
class Stream {
public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // in (0, 1)
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nclab::rng
