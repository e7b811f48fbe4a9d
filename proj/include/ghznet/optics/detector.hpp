#pragma once

#include <cstdint>
#include <vector>

#include "ghznet/optics/coherent.hpp"
#include "ghznet/optics/fock.hpp"
#include "ghznet/rng.hpp"

namespace ghznet::optics {

/// Threshold detector: click / no-click, no photon-number resolution.
struct DetectorModel {
    double efficiency = 1.0;       // eta_d in [0, 1]
    double dark_count = 0.0;       // per-gate dark click probability in [0, 1)

    void validate() const;
};

/// Clicks per party, one bit per detector (bit 0 = H detector, bit 1 = V).
struct DetectionEvent {
    std::vector<std::uint8_t> clicks;

    int n_parties() const { return static_cast<int>(clicks.size()); }
    bool h(int party) const { return clicks[static_cast<std::size_t>(party)] & 1u; }
    bool v(int party) const { return (clicks[static_cast<std::size_t>(party)] >> 1) & 1u; }
    bool exactly_one_click(int party) const {
        std::uint8_t c = clicks[static_cast<std::size_t>(party)];
        return c == 1u || c == 2u;
    }

    friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// Click probability for a coherent mode of the given mean photon number:
/// p = 1 - (1 - d) exp(-eta_d |beta|^2).
double click_probability_coherent(double mean_photons, const DetectorModel& det);

/// Click probability given exactly n photons at the detector:
/// p = 1 - (1 - d)(1 - eta_d)^n.
double click_probability_photons(int n, const DetectorModel& det);

/// Per-detector click probabilities for a post-circuit field, ordered
/// (party0 H, party0 V, party1 H, ...). Coherent states factorize, so the
/// detectors are statistically independent.
std::vector<double> click_probabilities(const CoherentField& field, const DetectorModel& det);

/// Independent Bernoulli draw per detector.
DetectionEvent sample_detection(const std::vector<double>& click_probs, Pcg32& rng);

/// Samples an occupation vector by |amplitude|^2 from a post-circuit state,
/// then applies per-photon efficiency thinning and dark counts per detector.
DetectionEvent sample_detection(const FockState& state, const DetectorModel& det, Pcg32& rng);

} // namespace ghznet::optics
