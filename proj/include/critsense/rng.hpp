#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace critsense {

/// splitmix64 finalizer; used to decorrelate nearby integer seeds.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive hash of a list of integers into one seed.
[[nodiscard]] std::uint64_t hash_seed(std::initializer_list<std::uint64_t> parts);

/// Seed of trajectory `index` in an ensemble started from `base`.
[[nodiscard]] constexpr std::uint64_t trajectory_seed(std::uint64_t base, std::uint64_t index) {
    return base ^ index;
}

/// Per-trajectory Gaussian source. Owns its engine; never shared between threads.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    double operator()() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace critsense
