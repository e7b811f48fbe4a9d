#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "ghznet/optics/circuit.hpp"
#include "ghznet/optics/mode_space.hpp"

namespace ghznet::optics {

/// Photon count per mode, length = space dimension.
using Occupation = std::vector<int>;

inline constexpr int kDefaultPhotonCap = 8;

/// Exact photon-number superposition: a sparse map from occupation vectors to
/// complex amplitudes. The ket convention is |n> = prod_m (a^dag_m)^{n_m} /
/// sqrt(n_m!) |0>, so stored amplitudes are the usual normalized ones.
class FockState {
public:
    explicit FockState(ModeSpace space, int photon_cap = kDefaultPhotonCap);

    static FockState vacuum(const ModeSpace& space, int photon_cap = kDefaultPhotonCap);

    /// Product of one photon per party, each in the given Jones vector
    /// (h, v) over that party's signal modes.
    static FockState single_photon_product(const ModeSpace& space,
                                           const std::vector<Eigen::Vector2cd>& jones,
                                           int photon_cap = kDefaultPhotonCap);

    /// Accumulates amplitude onto an occupation vector. Throws CapacityError
    /// when the total photon number exceeds the cap.
    void add_term(const Occupation& occ, std::complex<double> amplitude);

    const std::map<Occupation, std::complex<double>>& terms() const { return terms_; }
    const ModeSpace& space() const { return space_; }
    int photon_cap() const { return photon_cap_; }

    std::complex<double> amplitude(const Occupation& occ) const;
    double norm() const;
    void normalize();
    std::size_t term_count() const { return terms_.size(); }

    /// Same state over a larger space; signal modes map by identity and all
    /// added modes stay in vacuum.
    FockState embedded(const ModeSpace& larger) const;

private:
    ModeSpace space_;
    std::map<Occupation, std::complex<double>> terms_;
    int photon_cap_;
};

/// Exact propagation through a unitary circuit: each creation operator is
/// substituted by its image under the matrix and the resulting operator
/// polynomial is expanded with full bosonic normalization. Total photon
/// number is preserved term by term.
FockState propagate_fock(const LinearCircuit& circuit, const FockState& state);

} // namespace ghznet::optics
