#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "ghznet/optics/circuit.hpp"
#include "ghznet/optics/coherent.hpp"
#include "ghznet/optics/detector.hpp"
#include "ghznet/optics/fock.hpp"

namespace ghznet::ghz {

/// Parameters of the distributed measurement circuit. Per-party lists may be
/// empty (all zero phases / unit transmittances) or hold one value per party.
///
/// The circuit is: each party keeps its H amplitude on a local delay line
/// (phase theta_j, transmittance eta_delay_j) and forwards its V amplitude to
/// the next party around the ring (phase phi_j, transmittance eta_channel_j),
/// then measures the recombined pair behind a half waveplate.
struct CircuitSpec {
    int n_parties = 3;
    std::vector<double> theta;        // delay-line phase per party
    std::vector<double> phi;          // channel phase per party
    std::vector<double> eta_delay;    // delay-line transmittance per party
    std::vector<double> eta_channel;  // channel transmittance per party
    double hwp_angle = std::numbers::pi / 8;
    bool reverse_ring = false;        // forward the V amplitude to j-1 instead of j+1

    void validate() const;
    bool lossless() const;

    double theta_at(int j) const { return theta.empty() ? 0.0 : theta[static_cast<std::size_t>(j)]; }
    double phi_at(int j) const { return phi.empty() ? 0.0 : phi[static_cast<std::size_t>(j)]; }
    double eta_delay_at(int j) const { return eta_delay.empty() ? 1.0 : eta_delay[static_cast<std::size_t>(j)]; }
    double eta_channel_at(int j) const { return eta_channel.empty() ? 1.0 : eta_channel[static_cast<std::size_t>(j)]; }
};

enum class Outcome : int { Plus = 0, Minus = 1, Inconclusive = 2 };

struct OutcomeDist {
    double plus = 0.0;
    double minus = 0.0;
    double inconclusive = 0.0;

    double conclusive() const { return plus + minus; }
    double sum() const { return plus + minus + inconclusive; }
    double operator[](Outcome o) const {
        switch (o) {
            case Outcome::Plus: return plus;
            case Outcome::Minus: return minus;
            default: return inconclusive;
        }
    }
};

/// (|H...H> + sign |V...V>) / sqrt(2) over n parties' signal modes.
optics::FockState ghz_state(int n, int sign, int photon_cap = optics::kDefaultPhotonCap);

/// Delay + exchange + recombination stages (everything before the
/// waveplates). With ancillas in the space, loss is a unitary dilation;
/// without, transmittances scale amplitudes directly (sub-unitary).
optics::LinearCircuit build_exchange_circuit(const CircuitSpec& spec, const optics::ModeSpace& space);

/// Full measurement circuit: exchange stage followed by a half waveplate per
/// party. Output mode (party, pol) maps one-to-one onto that party's
/// detectors.
optics::LinearCircuit build_ghz_circuit(const CircuitSpec& spec, const optics::ModeSpace& space);

/// Convenience overload; uses loss ancillas exactly when any transmittance
/// is below one.
optics::LinearCircuit build_ghz_circuit(const CircuitSpec& spec);

/// Interferometer phase Phi = sum_j (phi_j - theta_j), wrapped into (-pi, pi].
double global_phase(const CircuitSpec& spec);

/// Plus/Minus by the parity of V-detector clicks when every party saw exactly
/// one click; Inconclusive otherwise.
Outcome classify(const optics::DetectionEvent& event);

/// Exact outcome probabilities for a Fock input on the source modes:
/// propagate, marginalize loss ancillas, apply the detector model, classify.
OutcomeDist outcome_distribution_fock(const optics::FockState& input, const CircuitSpec& spec,
                                      const optics::DetectorModel& det);

/// How per-pulse global phases are treated for coherent inputs.
struct PhaseMode {
    enum class Kind { Fixed, Randomized, PostSelected };
    Kind kind = Kind::Fixed;
    double window = 0.0;  // half-width of the accepted phase window (radians)
    int nodes = 16;       // quadrature points per party

    static PhaseMode fixed() { return {}; }
    static PhaseMode randomized(int nodes = 16) { return {Kind::Randomized, 0.0, nodes}; }
    static PhaseMode post_selected(double window, int nodes = 16) {
        return {Kind::PostSelected, window, nodes};
    }
};

/// Exact outcome probabilities for coherent inputs given per-party Jones
/// amplitudes (mean photon number folded in). Randomized / post-selected
/// phases are averaged by a per-party product quadrature.
OutcomeDist outcome_distribution_coherent(const std::vector<Eigen::Vector2cd>& jones,
                                          const CircuitSpec& spec,
                                          const optics::DetectorModel& det,
                                          const PhaseMode& phase_mode);

/// Collapses independent per-detector click probabilities (ordered H,V per
/// party) into the three outcomes without enumerating click patterns.
OutcomeDist outcome_from_click_probs(const std::vector<double>& probs);

} // namespace ghznet::ghz
