#pragma once

#include <cstdint>

#include "isar/imaging.hpp"

namespace isar {

/// SNR at or above which no noise is added.
inline constexpr double kNoNoiseSnrDb = 201.0;

struct NoiseSpec {
    double snr_db = kNoNoiseSnrDb;  // [0, 201]
    std::uint64_t seed = 0;

    void validate() const;
};

/// Mean |sample|^2 over the whole history; the SNR reference power.
double mean_power(const ComplexMatrix& samples);

/// Adds i.i.d. circular complex Gaussian noise with per-sample variance
/// mean_power * 10^(-snr_db / 10). Bit-identical for identical inputs.
PhaseHistory add_noise(const PhaseHistory& ph, const NoiseSpec& spec);

}  // namespace isar
