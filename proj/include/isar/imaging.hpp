#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "isar/geometry.hpp"
#include "isar/mesh.hpp"
#include "isar/scattering.hpp"

namespace isar {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr int kImageSize = 54;

using Complex = std::complex<double>;

/// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    Complex& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
    const Complex& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
    std::span<Complex> data() noexcept { return data_; }
    std::span<const Complex> data() const noexcept { return data_; }

    double energy() const;
    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

enum class Window { Rectangular, Taylor };

/// Stepped-frequency waveform and coherent aspect sweep.
struct WaveformSpec {
    double center_frequency_hz = 10e9;
    double bandwidth_hz = 300e6;
    int num_freq_steps = kImageSize;
    int num_pulses = kImageSize;
    double aspect_span_deg = 3.0;
    /// Reference every path to the rotation center (ideal translational motion
    /// compensation). When false the raw two-way path drives the phase.
    bool motion_compensation = true;

    void validate() const;
    /// f_k = f_c - B/2 + k B / (K - 1)
    double frequency(int k) const;
    double center_wavelength_m() const { return kSpeedOfLight / center_frequency_hz; }
    /// Aspect offset of pulse p from the pose azimuth, degrees.
    double pulse_aspect_deg(int p) const;
    double range_resolution_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }
    double cross_range_resolution_m() const;
};

/// K x P received samples (rows are frequency steps, columns are pulses).
struct PhaseHistory {
    ComplexMatrix samples;
    WaveformSpec waveform;

    static PhaseHistory zeros(const WaveformSpec& wf);
};

struct ComplexImage {
    ComplexMatrix pixels;  // rows: range bins, columns: cross-range bins
    double range_resolution_m = 0.0;
    double cross_range_resolution_m = 0.0;
};

/// Adds sum_returns amplitude * exp(-i 2 pi f_k L / c) to column `pulse`,
/// where L is the return path, less 2 * reference_range_m.
void accumulate_returns(PhaseHistory& ph, int pulse, std::span<const ScatterReturn> returns,
                        double reference_range_m);

/// Traces every pulse of the aspect sweep around `pose` and sums the returns.
PhaseHistory synthesize_phase_history(const ScatteringScene& scene, const RadarPose& pose, const WaveformSpec& wf,
                                      const RaySpec& ray);
PhaseHistory synthesize_phase_history(const TriangleMesh& mesh, const RadarPose& pose, const WaveformSpec& wf,
                                      const RaySpec& ray);

struct PointScatterer {
    Vec3 position;
    double amplitude = 1.0;
};

/// Ideal isotropic point scatterers swept through the same aspect schedule:
/// path length 2 (R - x . u_p) for each pulse direction u_p.
PhaseHistory point_scatterer_history(std::span<const PointScatterer> scatterers, const RadarPose& pose,
                                     const WaveformSpec& wf);

/// Centered, unitary 2D DFT of the phase history. A phase ramp of
/// exp(-i 2 pi k m / K) along the frequency axis moves the peak to row 27 + m.
ComplexImage form_image(const PhaseHistory& ph, Window window = Window::Rectangular);

/// Taylor weights (nbar = 4, -30 dB sidelobes), normalized to unit peak.
std::vector<double> taylor_window(int length);

}  // namespace isar
