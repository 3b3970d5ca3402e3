#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qcurrents/currents.hpp"

namespace qc {

// Independent per-trajectory seed derived from a master seed and an index (splitmix64 mixing).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);
std::mt19937_64 make_rng(std::uint64_t seed);

struct JumpEvent {
    double time = 0.0;
    std::size_t channel = 0;  // index into the model's (unexpanded) channels
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<JumpEvent> events;
    double final_time = 0.0;
    bool dark = false;            // no further jumps can occur after the last event
    std::vector<double> sample_times;
    std::vector<std::vector<double>> samples;  // [observable][time], conditional expectations
};

struct McwfOptions {
    std::optional<double> dt;             // survival march step, default min(1e-3/gamma_max, T/1e4)
    std::vector<double> sample_times;     // sorted, within [0, T]
    std::vector<cmat> observables;        // Hermitian operators sampled on sample_times
    std::size_t max_jumps = 100000000;
    bool force_density_matrix = false;
};

// Pure-state path when rho0 is pure and every expanded channel is monitored,
// otherwise the conditional density matrix is propagated.
TrajectoryRecord mcwf_simulate(const LindbladModel& model, const cmat& rho0, double final_time,
                               std::uint64_t seed, const McwfOptions& opts = {});
TrajectoryRecord mcwf_simulate(const LindbladModel& model, const cvec& psi0, double final_time,
                               std::uint64_t seed, const McwfOptions& opts = {});
std::vector<TrajectoryRecord> mcwf_ensemble(const LindbladModel& model, const cmat& rho0, double final_time,
                                            std::size_t count, std::uint64_t master_seed,
                                            const McwfOptions& opts = {});

struct CountingResult {
    std::vector<double> t;
    std::vector<double> n;  // N(t) on the grid
    double mean_current = 0.0;  // N(T) / T
};
CountingResult jump_counting(const TrajectoryRecord& record, const CurrentSpec& spec,
                             const std::vector<double>& t_grid = {});

struct DiffusiveRecord {
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<double> current;                 // I_diff(t_j), j = 0..steps-1
    std::vector<std::vector<double>> observables;  // [observable][recorded step]
    std::size_t record_stride = 1;
    std::size_t clipped_steps = 0;
    cmat final_state;
};

struct DiffusiveOptions {
    std::vector<cmat> observables;
    std::size_t record_stride = 1;
    double clip = -1e-10;
    double max_trace_drift = 1e-3;
};

DiffusiveRecord diffusive_simulate(const LindbladModel& model, const CurrentSpec& spec, const cmat& rho0,
                                   double dt, double final_time, std::uint64_t seed,
                                   const DiffusiveOptions& opts = {});

enum class FilterKind { low, high, band };
struct FilterSpec {
    FilterKind kind = FilterKind::low;
    int order = 1;
    double cutoff = 1.0;                  // low/high
    double band_low = 0.0, band_high = 0.0;  // band edges
    bool gain_only = false;               // apply |h| instead of the causal transfer function

    // Band pass over [1.5 Omega, 2.5 Omega], around the 2 Omega feature of a driven qubit.
    static FilterSpec rabi_band(double omega, int order = 2);
};
// Transfer function with the Fourier convention int e^{i omega t} h(t) dt.
cplx butterworth_response(const FilterSpec& spec, double omega);
std::vector<double> butterworth(const std::vector<double>& samples, double dt, const FilterSpec& spec);

struct EmpiricalSpectrum {
    std::vector<double> omega;
    std::vector<double> S;
    std::vector<double> error;  // standard error of the segment average
};
// Segmented periodogram: each record is cut into n_segments pieces, the mean is
// subtracted per segment and |sum dI e^{-i omega n dt}|^2 dt^2 / T_seg averaged.
EmpiricalSpectrum empirical_spectrum(const std::vector<std::vector<double>>& records, double dt,
                                     std::size_t n_segments);

}  // namespace qc
