#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ghznet/optics/circuit.hpp"
#include "ghznet/optics/mode_space.hpp"

namespace ghznet::optics {

/// Classical-field backend: one complex amplitude per mode, |amp|^2 = mean
/// photon number of that mode's coherent state.
struct CoherentField {
    ModeSpace space;
    Eigen::VectorXcd amps;

    static CoherentField vacuum(const ModeSpace& space);

    /// Per-party Jones vectors (h, v) placed on the signal modes. Mean photon
    /// number and pulse phase are folded into the Jones amplitudes.
    static CoherentField from_jones(const ModeSpace& space,
                                    const std::vector<Eigen::Vector2cd>& jones);
};

/// out = matrix * in. Coherent states stay coherent under linear optics, so
/// this is exact, including sub-unitary (lossy) circuits.
CoherentField propagate_coherent(const LinearCircuit& circuit, const CoherentField& field);

} // namespace ghznet::optics
