#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace isar {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive hash of a sequence of 64-bit words.
constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (auto w : words) h = mix64(h ^ mix64(w));
    return h;
}

std::uint64_t double_bits(double v);

/// Uniform double in [0, 1) from the top 53 bits of a word.
constexpr double unit_interval(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

/// Deterministic normal generator: std::mt19937_64 words turned into normals with
/// Box-Muller. Unlike std::normal_distribution the output is identical across
/// standard library implementations.
class NormalStream {
public:
    static constexpr const char* kName = "mt19937_64+box-muller";

    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    /// A pair of independent standard normals.
    std::pair<double, double> next_pair();

private:
    std::mt19937_64 engine_;
};

}  // namespace isar
