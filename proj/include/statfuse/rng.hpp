#ifndef STATFUSE_RNG_HPP
#define STATFUSE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace statfuse {

/// mt19937_64 with explicit draw algorithms. The standard distributions are
/// implementation-defined, so bounded/unit/gaussian draws are spelled out
/// here to keep seeded runs reproducible across toolchains.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_below(std::uint64_t bound) {
        // rejection sampling, unbiased
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    double next_unit() { // [0, 1)
        return (engine_() >> 11) * 0x1.0p-53;
    }

    double next_gaussian() { // Box-Muller, one value per call pair
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = next_unit();
        } while (u1 <= 0.0);
        u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) { // Fisher-Yates
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace statfuse

#endif
