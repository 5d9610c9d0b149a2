#include "isar/noise.hpp"

#include <cmath>
#include <string>

#include "isar/error.hpp"
#include "isar/random.hpp"

namespace isar {

void NoiseSpec::validate() const {
    if (!std::isfinite(snr_db) || snr_db < 0.0 || snr_db > kNoNoiseSnrDb) {
        throw Error("noise", "snr_db must lie in [0, 201], got " + std::to_string(snr_db));
    }
}

double mean_power(const ComplexMatrix& samples) {
    const auto data = samples.data();
    if (data.empty()) return 0.0;
    return samples.energy() / static_cast<double>(data.size());
}

PhaseHistory add_noise(const PhaseHistory& ph, const NoiseSpec& spec) {
    spec.validate();
    if (spec.snr_db >= kNoNoiseSnrDb) return ph;
    const double signal = mean_power(ph.samples);
    if (!(signal > 0.0)) throw Error("noise", "phase history has zero energy, SNR is undefined");

    const double variance = signal * std::pow(10.0, -spec.snr_db / 10.0);
    const double sigma = std::sqrt(0.5 * variance);  // per real component
    PhaseHistory out = ph;
    NormalStream normals(spec.seed);
    for (auto& z : out.samples.data()) {
        const auto [re, im] = normals.next_pair();
        z += Complex(sigma * re, sigma * im);
    }
    return out;
}

}  // namespace isar
