#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "qcurrents/trajectories.hpp"

namespace qc {

namespace {

// Lowpass prototype with unit cutoff in the variable u = i omega / gamma.
cplx prototype(int order, cplx u) {
    cplx h = 1.0;
    for (int k = 1; k <= order; ++k) {
        const double theta = (2.0 * k + order - 1) * std::numbers::pi / (2.0 * order);
        h *= -1.0 / (u + std::exp(I * theta));
    }
    return h;
}

}  // namespace

FilterSpec FilterSpec::rabi_band(double omega, int order) {
    FilterSpec f;
    f.kind = FilterKind::band;
    f.order = order;
    f.band_low = 1.5 * omega;
    f.band_high = 2.5 * omega;
    return f;
}

cplx butterworth_response(const FilterSpec& spec, double omega) {
    if (spec.order < 1) throw Error("filter order must be at least one");
    const cplx x = I * omega;
    cplx h;
    switch (spec.kind) {
        case FilterKind::low:
            if (!(spec.cutoff > 0.0)) throw Error("cutoff must be positive");
            h = prototype(spec.order, x / spec.cutoff);
            break;
        case FilterKind::high:
            if (!(spec.cutoff > 0.0)) throw Error("cutoff must be positive");
            if (omega == 0.0) return 0.0;
            h = prototype(spec.order, spec.cutoff / x);
            break;
        case FilterKind::band: {
            if (!(spec.band_low > 0.0) || !(spec.band_high > spec.band_low)) {
                throw Error("band edges must satisfy 0 < low < high");
            }
            if (omega == 0.0) return 0.0;
            const double w0sq = spec.band_low * spec.band_high;
            const double bw = spec.band_high - spec.band_low;
            h = prototype(spec.order, (x * x + w0sq) / (x * bw));
            break;
        }
    }
    return spec.gain_only ? cplx(std::abs(h)) : h;
}

std::vector<double> butterworth(const std::vector<double>& samples, double dt, const FilterSpec& spec) {
    if (!(dt > 0.0)) throw Error("sample spacing must be positive");
    if (samples.empty()) return {};
    const std::size_t n = samples.size();
    Eigen::FFT<double> fft;
    std::vector<cplx> spectrum;
    fft.fwd(spectrum, samples);
    for (std::size_t k = 0; k < n; ++k) {
        const long kk = k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
        const double omega = 2.0 * std::numbers::pi * static_cast<double>(kk) / (static_cast<double>(n) * dt);
        // The FFT kernel is e^{-i omega t}, so the response enters at -omega.
        spectrum[k] *= butterworth_response(spec, -omega);
    }
    if (n % 2 == 0) spectrum[n / 2] = spectrum[n / 2].real();
    std::vector<double> out;
    fft.inv(out, spectrum);
    out.resize(n);
    return out;
}

EmpiricalSpectrum empirical_spectrum(const std::vector<std::vector<double>>& records, double dt,
                                     std::size_t n_segments) {
    if (!(dt > 0.0)) throw Error("sample spacing must be positive");
    if (n_segments == 0) throw Error("at least one segment is required");
    if (records.empty()) throw Error("no records supplied");
    std::size_t len = records.front().size() / n_segments;
    for (const auto& r : records) len = std::min(len, r.size() / n_segments);
    if (len < 2) throw Error("segments are too short");
    const std::size_t bins = len / 2 + 1;
    EmpiricalSpectrum out;
    out.omega.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        out.omega[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(len) * dt);
    }
    std::vector<double> sum(bins, 0.0), sumsq(bins, 0.0);
    std::size_t count = 0;
    Eigen::FFT<double> fft;
    std::vector<double> seg(len);
    std::vector<cplx> f;
    for (const auto& r : records) {
        double mean = 0.0;
        for (std::size_t i = 0; i < len * n_segments; ++i) mean += r[i];
        mean /= static_cast<double>(len * n_segments);
        for (std::size_t s = 0; s < n_segments; ++s) {
            for (std::size_t i = 0; i < len; ++i) seg[i] = r[s * len + i] - mean;
            fft.fwd(f, seg);
            for (std::size_t k = 0; k < bins; ++k) {
                const double p = std::norm(f[k]) * dt / static_cast<double>(len);
                sum[k] += p;
                sumsq[k] += p * p;
            }
            ++count;
        }
    }
    out.S.resize(bins);
    out.error.resize(bins);
    const auto c = static_cast<double>(count);
    for (std::size_t k = 0; k < bins; ++k) {
        out.S[k] = sum[k] / c;
        const double var = count > 1 ? (sumsq[k] / c - out.S[k] * out.S[k]) * c / (c - 1.0) : 0.0;
        out.error[k] = std::sqrt(std::max(0.0, var) / c);
    }
    return out;
}

}  // namespace qc
