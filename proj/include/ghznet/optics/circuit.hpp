#pragma once

#include <Eigen/Dense>

#include "ghznet/optics/mode_space.hpp"

namespace ghznet::optics {

/// One pass of the optical network: a complex matrix over the mode space.
/// Sub-unitary matrices encode loss; the constructor rejects anything with a
/// singular value above 1 (within 1e-12).
///
/// Convention: amplitudes transform as out = matrix * in, and creation
/// operators as a^dag_m -> sum_m' matrix(m', m) a^dag_m', i.e. column m holds
/// where input mode m goes.
class LinearCircuit {
public:
    LinearCircuit(ModeSpace space, Eigen::MatrixXcd matrix);

    static LinearCircuit identity(const ModeSpace& space);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    const ModeSpace& space() const { return space_; }
    int dimension() const { return space_.dimension(); }

    double max_singular_value() const;
    bool is_unitary(double tol = 1e-12) const;

private:
    ModeSpace space_;
    Eigen::MatrixXcd matrix_;
};

/// Half waveplate at angle theta acting on one party's (H, V) pair:
/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]]. Identity elsewhere.
LinearCircuit element_hwp(double theta, int party, const ModeSpace& space);

/// Phase shifter: multiplies one mode's amplitude by e^{i phi}.
LinearCircuit element_phase(double phi, const ModeId& mode, const ModeSpace& space);

/// Attenuator as a beamsplitter coupling mode -> (mode, ancilla) with
/// amplitudes (sqrt(eta), sqrt(1-eta)); unitary on the pair.
LinearCircuit element_attenuator(double eta, const ModeId& mode, const ModeId& ancilla,
                                 const ModeSpace& space);

/// second after first (matrix product second * first). Mode spaces must match.
LinearCircuit compose(const LinearCircuit& first, const LinearCircuit& second);

} // namespace ghznet::optics
