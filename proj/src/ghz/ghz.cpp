#include "ghznet/ghz/ghz.hpp"

#include <cmath>

#include "ghznet/errors.hpp"

namespace ghznet::ghz {

using optics::ModeId;
using optics::ModeKind;
using optics::ModeSpace;
using optics::Polarization;

void CircuitSpec::validate() const {
    if (n_parties < 2) {
        throw ConfigError("n_parties must be >= 2, got " + std::to_string(n_parties));
    }
    auto check_len = [&](const std::vector<double>& v, const char* name) {
        if (!v.empty() && static_cast<int>(v.size()) != n_parties) {
            throw ConfigError(std::string(name) + " must have one entry per party");
        }
    };
    check_len(theta, "theta");
    check_len(phi, "phi");
    check_len(eta_delay, "eta_delay");
    check_len(eta_channel, "eta_channel");
    for (double e : eta_delay) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw ConfigError("eta_delay must be in [0, 1], got " + std::to_string(e));
        }
    }
    for (double e : eta_channel) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw ConfigError("eta_channel must be in [0, 1], got " + std::to_string(e));
        }
    }
}

bool CircuitSpec::lossless() const {
    for (int j = 0; j < n_parties; ++j) {
        if (eta_delay_at(j) != 1.0 || eta_channel_at(j) != 1.0) return false;
    }
    return true;
}

optics::FockState ghz_state(int n, int sign, int photon_cap) {
    if (n < 2) throw ConfigError("ghz_state: n must be >= 2");
    if (sign != 1 && sign != -1) throw ConfigError("ghz_state: sign must be +1 or -1");
    ModeSpace space = ModeSpace::signals(n);
    optics::FockState state(space, photon_cap);
    optics::Occupation all_h(static_cast<std::size_t>(space.dimension()), 0);
    optics::Occupation all_v = all_h;
    for (int j = 0; j < n; ++j) {
        all_h[static_cast<std::size_t>(space.signal_index(j, Polarization::H))] = 1;
        all_v[static_cast<std::size_t>(space.signal_index(j, Polarization::V))] = 1;
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    state.add_term(all_h, inv_sqrt2);
    state.add_term(all_v, sign * inv_sqrt2);
    return state;
}

optics::LinearCircuit build_exchange_circuit(const CircuitSpec& spec, const ModeSpace& space) {
    spec.validate();
    if (space.n_parties() != spec.n_parties) {
        throw ConfigError("build_exchange_circuit: mode space party count mismatch");
    }
    const int n = spec.n_parties;
    const bool dilate = space.has_ancillas();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(space.dimension(), space.dimension());

    for (int j = 0; j < n; ++j) {
        // Delay line: the H amplitude stays with its party.
        {
            const int h = space.index_of({j, Polarization::H, ModeKind::Signal});
            const std::complex<double> ph = std::polar(1.0, spec.theta_at(j));
            const double t = std::sqrt(spec.eta_delay_at(j));
            const double r = std::sqrt(1.0 - spec.eta_delay_at(j));
            m.col(h).setZero();
            m(h, h) = ph * t;
            if (dilate) {
                const int anc = space.index_of({j, Polarization::H, ModeKind::LossAncilla});
                m(anc, h) = r;
                m.col(anc).setZero();
                m(h, anc) = -ph * r;
                m(anc, anc) = t;
            }
        }
        // Quantum channel: the V amplitude moves to the next party.
        {
            const int target = spec.reverse_ring ? (j + n - 1) % n : (j + 1) % n;
            const int v = space.index_of({j, Polarization::V, ModeKind::Signal});
            const int v_next = space.index_of({target, Polarization::V, ModeKind::Signal});
            const std::complex<double> ph = std::polar(1.0, spec.phi_at(j));
            const double t = std::sqrt(spec.eta_channel_at(j));
            const double r = std::sqrt(1.0 - spec.eta_channel_at(j));
            m.col(v).setZero();
            m(v_next, v) = ph * t;
            if (dilate) {
                const int anc = space.index_of({j, Polarization::V, ModeKind::LossAncilla});
                m(anc, v) = r;
                m.col(anc).setZero();
                m(v_next, anc) = -ph * r;
                m(anc, anc) = t;
            }
        }
    }
    return optics::LinearCircuit(space, std::move(m));
}

optics::LinearCircuit build_ghz_circuit(const CircuitSpec& spec, const ModeSpace& space) {
    optics::LinearCircuit circuit = build_exchange_circuit(spec, space);
    for (int j = 0; j < spec.n_parties; ++j) {
        circuit = optics::compose(circuit, optics::element_hwp(spec.hwp_angle, j, space));
    }
    return circuit;
}

optics::LinearCircuit build_ghz_circuit(const CircuitSpec& spec) {
    spec.validate();
    ModeSpace space = spec.lossless() ? ModeSpace::signals(spec.n_parties)
                                      : ModeSpace::with_loss_ancillas(spec.n_parties);
    return build_ghz_circuit(spec, space);
}

double global_phase(const CircuitSpec& spec) {
    spec.validate();
    double sum = 0.0;
    for (int j = 0; j < spec.n_parties; ++j) sum += spec.phi_at(j) - spec.theta_at(j);
    double w = std::remainder(sum, 2.0 * std::numbers::pi);
    if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
    return w;
}

Outcome classify(const optics::DetectionEvent& event) {
    if (event.n_parties() == 0) throw ContractError("classify: empty detection event");
    int v_clicks = 0;
    for (int j = 0; j < event.n_parties(); ++j) {
        if (!event.exactly_one_click(j)) return Outcome::Inconclusive;
        if (event.v(j)) ++v_clicks;
    }
    return (v_clicks % 2 == 0) ? Outcome::Plus : Outcome::Minus;
}

OutcomeDist outcome_from_click_probs(const std::vector<double>& probs) {
    if (probs.empty() || probs.size() % 2 != 0) {
        throw ConfigError("outcome_from_click_probs: need an (H, V) pair per party");
    }
    // P(plus/minus) = (prod_j s_j +- prod_j d_j) / 2 with
    //   s_j = P(exactly one click at party j), d_j = P(H only) - P(V only).
    double prod_one = 1.0;
    double prod_signed = 1.0;
    for (std::size_t j = 0; j < probs.size() / 2; ++j) {
        const double ph = probs[2 * j];
        const double pv = probs[2 * j + 1];
        const double h_only = ph * (1.0 - pv);
        const double v_only = (1.0 - ph) * pv;
        prod_one *= h_only + v_only;
        prod_signed *= h_only - v_only;
    }
    OutcomeDist d;
    d.plus = 0.5 * (prod_one + prod_signed);
    d.minus = 0.5 * (prod_one - prod_signed);
    d.inconclusive = 1.0 - d.plus - d.minus;
    return d;
}

OutcomeDist outcome_distribution_fock(const optics::FockState& input, const CircuitSpec& spec,
                                      const optics::DetectorModel& det) {
    spec.validate();
    det.validate();
    if (input.space().n_parties() != spec.n_parties) {
        throw ConfigError("outcome_distribution_fock: input party count mismatch");
    }
    ModeSpace space = spec.lossless() ? ModeSpace::signals(spec.n_parties)
                                      : ModeSpace::with_loss_ancillas(spec.n_parties);
    optics::LinearCircuit circuit = build_ghz_circuit(spec, space);
    optics::FockState prepared = (input.space() == space) ? input : input.embedded(space);
    optics::FockState out = optics::propagate_fock(circuit, prepared);

    // Loss ancillas are unobserved: summing |amplitude|^2 over full
    // occupations while reading only the signal part marginalizes them.
    OutcomeDist dist;
    std::vector<double> probs(static_cast<std::size_t>(space.n_signal()));
    for (const auto& [occ, amp] : out.terms()) {
        const double w = std::norm(amp);
        if (w == 0.0) continue;
        for (int i = 0; i < space.n_signal(); ++i) {
            probs[static_cast<std::size_t>(i)] =
                optics::click_probability_photons(occ[static_cast<std::size_t>(i)], det);
        }
        const OutcomeDist term = outcome_from_click_probs(probs);
        dist.plus += w * term.plus;
        dist.minus += w * term.minus;
        dist.inconclusive += w * term.inconclusive;
    }
    return dist;
}

OutcomeDist outcome_distribution_coherent(const std::vector<Eigen::Vector2cd>& jones,
                                          const CircuitSpec& spec,
                                          const optics::DetectorModel& det,
                                          const PhaseMode& phase_mode) {
    spec.validate();
    det.validate();
    const int n = spec.n_parties;
    if (static_cast<int>(jones.size()) != n) {
        throw ConfigError("outcome_distribution_coherent: need one Jones vector per party");
    }
    ModeSpace space = ModeSpace::signals(n);
    optics::LinearCircuit circuit = build_ghz_circuit(spec, space);

    // The output field is linear in each party's input, so propagate each
    // party once and recombine with per-party phase factors at the nodes.
    std::vector<Eigen::VectorXcd> propagated;
    propagated.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd in = Eigen::VectorXcd::Zero(space.dimension());
        in(space.signal_index(j, Polarization::H)) = jones[static_cast<std::size_t>(j)](0);
        in(space.signal_index(j, Polarization::V)) = jones[static_cast<std::size_t>(j)](1);
        propagated.push_back(circuit.matrix() * in);
    }

    int nodes = 1;
    double span = 0.0;
    switch (phase_mode.kind) {
        case PhaseMode::Kind::Fixed:
            break;
        case PhaseMode::Kind::Randomized:
            nodes = phase_mode.nodes;
            span = 2.0 * std::numbers::pi;
            break;
        case PhaseMode::Kind::PostSelected:
            if (!(phase_mode.window >= 0.0 && phase_mode.window <= std::numbers::pi)) {
                throw ConfigError("phase_window must be in [0, pi]");
            }
            if (phase_mode.window == 0.0) {
                nodes = 1;
            } else {
                nodes = phase_mode.nodes;
                span = 2.0 * phase_mode.window;
            }
            break;
    }
    if (nodes < 1) throw ConfigError("quadrature nodes must be >= 1");
    double total_nodes = std::pow(static_cast<double>(nodes), n);
    if (total_nodes > 2.0e7) {
        throw ConfigError("phase quadrature too large (" + std::to_string(nodes) + "^" +
                          std::to_string(n) + " nodes); reduce quad_nodes or sample instead");
    }

    std::vector<std::complex<double>> node_phase(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k) {
        double psi = 0.0;
        if (span > 0.0) {
            // Uniform grid over the circle; midpoint rule inside a window.
            psi = (phase_mode.kind == PhaseMode::Kind::Randomized)
                      ? span * k / nodes
                      : -phase_mode.window + span * (k + 0.5) / nodes;
        }
        node_phase[static_cast<std::size_t>(k)] = std::polar(1.0, psi);
    }

    OutcomeDist dist;
    const double weight = 1.0 / total_nodes;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Eigen::VectorXcd amps(space.dimension());
    std::vector<double> probs(static_cast<std::size_t>(space.n_signal()));
    while (true) {
        amps.setZero();
        for (int j = 0; j < n; ++j) {
            amps += node_phase[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] *
                    propagated[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < space.n_signal(); ++i) {
            probs[static_cast<std::size_t>(i)] =
                optics::click_probability_coherent(std::norm(amps(i)), det);
        }
        const OutcomeDist term = outcome_from_click_probs(probs);
        dist.plus += weight * term.plus;
        dist.minus += weight * term.minus;
        dist.inconclusive += weight * term.inconclusive;

        int j = 0;
        while (j < n) {
            if (++idx[static_cast<std::size_t>(j)] < nodes) break;
            idx[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == n) break;
    }
    return dist;
}

} // namespace ghznet::ghz
