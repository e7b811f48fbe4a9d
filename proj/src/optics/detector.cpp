#include "ghznet/optics/detector.hpp"

#include <cmath>

#include "ghznet/errors.hpp"

namespace ghznet::optics {

void DetectorModel::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw ConfigError("det_efficiency must be in [0, 1], got " + std::to_string(efficiency));
    }
    if (!(dark_count >= 0.0 && dark_count < 1.0)) {
        throw ConfigError("dark_count must be in [0, 1), got " + std::to_string(dark_count));
    }
}

double click_probability_coherent(double mean_photons, const DetectorModel& det) {
    return 1.0 - (1.0 - det.dark_count) * std::exp(-det.efficiency * mean_photons);
}

double click_probability_photons(int n, const DetectorModel& det) {
    return 1.0 - (1.0 - det.dark_count) * std::pow(1.0 - det.efficiency, n);
}

std::vector<double> click_probabilities(const CoherentField& field, const DetectorModel& det) {
    det.validate();
    const int n_signal = field.space.n_signal();
    std::vector<double> probs(static_cast<std::size_t>(n_signal));
    for (int i = 0; i < n_signal; ++i) {
        probs[static_cast<std::size_t>(i)] = click_probability_coherent(std::norm(field.amps(i)), det);
    }
    return probs;
}

DetectionEvent sample_detection(const std::vector<double>& click_probs, Pcg32& rng) {
    if (click_probs.size() % 2 != 0) {
        throw ConfigError("sample_detection: need an (H, V) probability pair per party");
    }
    const std::size_t n = click_probs.size() / 2;
    DetectionEvent ev;
    ev.clicks.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        std::uint8_t c = 0;
        if (rng.bernoulli(click_probs[2 * j])) c |= 1u;
        if (rng.bernoulli(click_probs[2 * j + 1])) c |= 2u;
        ev.clicks[j] = c;
    }
    return ev;
}

DetectionEvent sample_detection(const FockState& state, const DetectorModel& det, Pcg32& rng) {
    det.validate();
    double total = 0.0;
    for (const auto& [occ, amp] : state.terms()) total += std::norm(amp);
    if (total <= 0.0) throw ConfigError("sample_detection: state has zero norm");

    // Occupation draw by |amplitude|^2; map order makes the scan deterministic.
    const double u = rng.uniform() * total;
    double acc = 0.0;
    const Occupation* chosen = nullptr;
    for (const auto& [occ, amp] : state.terms()) {
        acc += std::norm(amp);
        if (u < acc) {
            chosen = &occ;
            break;
        }
    }
    if (chosen == nullptr) chosen = &state.terms().rbegin()->first;

    const auto& space = state.space();
    const int parties = space.n_parties();
    DetectionEvent ev;
    ev.clicks.assign(static_cast<std::size_t>(parties), 0);
    for (int j = 0; j < parties; ++j) {
        std::uint8_t c = 0;
        int nh = (*chosen)[static_cast<std::size_t>(space.signal_index(j, Polarization::H))];
        int nv = (*chosen)[static_cast<std::size_t>(space.signal_index(j, Polarization::V))];
        if (rng.bernoulli(click_probability_photons(nh, det))) c |= 1u;
        if (rng.bernoulli(click_probability_photons(nv, det))) c |= 2u;
        ev.clicks[static_cast<std::size_t>(j)] = c;
    }
    return ev;
}

} // namespace ghznet::optics
