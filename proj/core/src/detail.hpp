#pragma once

// Internal helpers shared by the statistics translation units.

#include <vector>

#include "qcurrents/currents.hpp"

namespace qc::detail {

// Weight and phase of every expanded channel.
struct ExpandedWeights {
    std::vector<double> nu;
    std::vector<double> phi;
};
ExpandedWeights expand_weights(const LindbladModel& model, const CurrentSpec& spec);

// Row functional v -> tr(A unvec(v)), returned as a column to be transposed.
cvec trace_functional(const cmat& a);

// e^{L t} v using the cached spectrum when the Liouvillian is diagonalizable.
class Evolver {
public:
    explicit Evolver(const Liouvillian& liou);
    cvec operator()(const cvec& v, double t) const;
    bool spectral() const { return spec_ != nullptr; }
    const SpectralDecomposition* spectrum() const { return spec_; }

private:
    const Liouvillian& liou_;
    const SpectralDecomposition* spec_ = nullptr;
};

double relative_scale(const cmat& m);

}  // namespace qc::detail
