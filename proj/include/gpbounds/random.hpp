#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gpbounds {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for the stream identified by `path` under `master`, e.g.
/// derive_seed(master, {experiment_tag, dataset_index}). Independent of the
/// order in which streams are consumed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Portable 64-bit generator with a platform-independent mapping to [0, 1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// 53 random mantissa bits, uniform on [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace gpbounds
