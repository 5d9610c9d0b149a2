#include "isar/imaging.hpp"

#include <cmath>
#include <string>

#include "isar/error.hpp"

namespace isar {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("imaging", message); }

/// Unitary inverse-DFT kernel w[m][k] = exp(+i 2 pi m k / n) / sqrt(n).
std::vector<Complex> dft_kernel(int n) {
    std::vector<Complex> w(static_cast<std::size_t>(n * n));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const double angle = 2.0 * kPi * static_cast<double>((m * k) % n) / static_cast<double>(n);
            w[static_cast<std::size_t>(m * n + k)] = std::polar(scale, angle);
        }
    }
    return w;
}

const std::vector<Complex>& kernel_for(int n) {
    static const std::vector<Complex> k54 = dft_kernel(kImageSize);
    if (n != kImageSize) fail("unsupported transform size " + std::to_string(n));
    return k54;
}

}  // namespace

double ComplexMatrix::energy() const {
    double e = 0.0;
    for (const auto& z : data_) e += std::norm(z);
    return e;
}

void WaveformSpec::validate() const {
    if (!(center_frequency_hz > 0.0) || !std::isfinite(center_frequency_hz)) fail("center frequency must be positive");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) fail("bandwidth must be positive");
    if (!(bandwidth_hz < center_frequency_hz)) fail("bandwidth must be smaller than the center frequency");
    if (num_freq_steps != kImageSize || num_pulses != kImageSize) {
        fail("frequency steps and pulses must both equal the image side " + std::to_string(kImageSize));
    }
    if (!(aspect_span_deg > 0.0) || !(aspect_span_deg < 90.0)) fail("aspect span must lie in (0, 90) degrees");
}

double WaveformSpec::frequency(int k) const {
    return center_frequency_hz - 0.5 * bandwidth_hz +
           static_cast<double>(k) * bandwidth_hz / static_cast<double>(num_freq_steps - 1);
}

double WaveformSpec::pulse_aspect_deg(int p) const {
    return static_cast<double>(p - num_pulses / 2) * aspect_span_deg / static_cast<double>(num_pulses);
}

double WaveformSpec::cross_range_resolution_m() const {
    return center_wavelength_m() / (2.0 * deg_to_rad(aspect_span_deg));
}

PhaseHistory PhaseHistory::zeros(const WaveformSpec& wf) {
    wf.validate();
    return {ComplexMatrix(wf.num_freq_steps, wf.num_pulses), wf};
}

void accumulate_returns(PhaseHistory& ph, int pulse, std::span<const ScatterReturn> returns,
                        double reference_range_m) {
    const WaveformSpec& wf = ph.waveform;
    for (const auto& r : returns) {
        const double excess = r.path_length_m - 2.0 * reference_range_m;
        for (int k = 0; k < wf.num_freq_steps; ++k) {
            const double phase = -2.0 * kPi * wf.frequency(k) * excess / kSpeedOfLight;
            ph.samples(k, pulse) += std::polar(r.amplitude, phase);
        }
    }
}

PhaseHistory synthesize_phase_history(const ScatteringScene& scene, const RadarPose& pose, const WaveformSpec& wf,
                                      const RaySpec& ray) {
    PhaseHistory ph = PhaseHistory::zeros(wf);
    const double reference = wf.motion_compensation ? pose.slant_range_m : 0.0;
    for (int p = 0; p < wf.num_pulses; ++p) {
        RadarPose pulse_pose = pose;
        pulse_pose.azimuth_deg = normalize_azimuth(pose.azimuth_deg + wf.pulse_aspect_deg(p));
        const auto returns = trace_returns(scene, pulse_pose, ray);
        accumulate_returns(ph, p, returns, reference);
    }
    return ph;
}

PhaseHistory synthesize_phase_history(const TriangleMesh& mesh, const RadarPose& pose, const WaveformSpec& wf,
                                      const RaySpec& ray) {
    return synthesize_phase_history(ScatteringScene(mesh), pose, wf, ray);
}

PhaseHistory point_scatterer_history(std::span<const PointScatterer> scatterers, const RadarPose& pose,
                                     const WaveformSpec& wf) {
    PhaseHistory ph = PhaseHistory::zeros(wf);
    const double reference = wf.motion_compensation ? pose.slant_range_m : 0.0;
    for (int p = 0; p < wf.num_pulses; ++p) {
        RadarPose pulse_pose = pose;
        pulse_pose.azimuth_deg = pose.azimuth_deg + wf.pulse_aspect_deg(p);
        const Vec3 u = pulse_pose.line_of_sight();
        std::vector<ScatterReturn> returns;
        returns.reserve(scatterers.size());
        for (const auto& s : scatterers) {
            ScatterReturn r;
            r.path_length_m = 2.0 * (pose.slant_range_m - dot(s.position, u));
            r.amplitude = s.amplitude;
            r.bounce_count = 1;
            returns.push_back(r);
        }
        accumulate_returns(ph, p, returns, reference);
    }
    return ph;
}

std::vector<double> taylor_window(int length) {
    constexpr int nbar = 4;
    constexpr double sll_db = 30.0;
    const double eta = std::pow(10.0, sll_db / 20.0);
    const double a = std::acosh(eta) / kPi;
    const double sigma2 = static_cast<double>(nbar * nbar) / (a * a + (nbar - 0.5) * (nbar - 0.5));

    std::vector<double> fm(nbar);
    for (int m = 1; m < nbar; ++m) {
        double num = 1.0;
        double den = 1.0;
        for (int n = 1; n < nbar; ++n) {
            num *= 1.0 - (m * m) / (sigma2 * (a * a + (n - 0.5) * (n - 0.5)));
            if (n != m) den *= 1.0 - static_cast<double>(m * m) / static_cast<double>(n * n);
        }
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        fm[static_cast<std::size_t>(m)] = sign * num / (2.0 * den);
    }
    std::vector<double> w(static_cast<std::size_t>(length));
    double peak = 0.0;
    for (int i = 0; i < length; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(length) - 0.5;
        double v = 1.0;
        for (int m = 1; m < nbar; ++m) v += 2.0 * fm[static_cast<std::size_t>(m)] * std::cos(2.0 * kPi * m * x);
        w[static_cast<std::size_t>(i)] = v;
        peak = std::max(peak, v);
    }
    for (auto& v : w) v /= peak;
    return w;
}

ComplexImage form_image(const PhaseHistory& ph, Window window) {
    const int rows = ph.samples.rows();
    const int cols = ph.samples.cols();
    if (rows != kImageSize || cols != kImageSize) {
        fail("phase history must be " + std::to_string(kImageSize) + "x" + std::to_string(kImageSize) + ", got " +
             std::to_string(rows) + "x" + std::to_string(cols));
    }
    ComplexMatrix input = ph.samples;
    if (window == Window::Taylor) {
        const auto wr = taylor_window(rows);
        const auto wc = taylor_window(cols);
        for (int k = 0; k < rows; ++k) {
            for (int p = 0; p < cols; ++p) input(k, p) *= wr[static_cast<std::size_t>(k)] * wc[static_cast<std::size_t>(p)];
        }
    }
    const auto& wk = kernel_for(rows);
    const auto& wp = kernel_for(cols);

    // Transform along frequency (rows), then along pulses (columns).
    ComplexMatrix partial(rows, cols);
    for (int m = 0; m < rows; ++m) {
        for (int p = 0; p < cols; ++p) {
            Complex acc{};
            for (int k = 0; k < rows; ++k) acc += wk[static_cast<std::size_t>(m * rows + k)] * input(k, p);
            partial(m, p) = acc;
        }
    }
    ComplexImage image;
    image.pixels = ComplexMatrix(rows, cols);
    const int half_r = rows / 2;
    const int half_c = cols / 2;
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) {
            Complex acc{};
            for (int p = 0; p < cols; ++p) acc += wp[static_cast<std::size_t>(n * cols + p)] * partial(m, p);
            image.pixels((m + half_r) % rows, (n + half_c) % cols) = acc;
        }
    }
    image.range_resolution_m = ph.waveform.range_resolution_m();
    image.cross_range_resolution_m = ph.waveform.cross_range_resolution_m();
    return image;
}

}  // namespace isar
