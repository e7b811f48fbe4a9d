#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghznet/adversary/adversary.hpp"
#include "ghznet/ghz/ghz.hpp"
#include "ghznet/optics/detector.hpp"
#include "ghznet/protocol/protocol.hpp"

namespace ghznet::harness {

enum class RunMode : int { Characterize = 0, Keygen = 1, Attack = 2, Sweep = 3 };
enum class Estimator : int { Sampling = 0, Exact = 1 };

const char* to_string(RunMode mode);

/// Fully resolved experiment description. Everything that defines the
/// numbers lives here; workers and output options are execution details and
/// stay out of the canonical form.
struct ExperimentConfig {
    RunMode mode = RunMode::Characterize;
    int n_parties = 3;
    std::uint64_t rounds = 1000;
    std::uint64_t seed = 1;
    int workers = 1;

    protocol::SourceKind source = protocol::SourceKind::SinglePhoton;
    double mu = 0.1;
    std::vector<double> decoy_mu;    // empty: fixed intensity mu
    std::vector<double> decoy_prob;

    ghz::PhaseMode::Kind phase_mode = ghz::PhaseMode::Kind::Randomized;
    double phase_window = 0.0;
    int quad_nodes = 16;
    Estimator estimator = Estimator::Sampling;

    ghz::CircuitSpec circuit;
    double pol_misalignment = 0.0;
    optics::DetectorModel detector;
    double basis_prob_z = 0.5;

    adversary::Topology topology = adversary::Topology::Equitable;
    int colluder = 0;
    adversary::Strategy attack_strategy = adversary::Strategy::FakedMeasurement;
    double extra_loss = 0.0;
    int tampered_channel = 0;

    std::string sweep_parameter;
    std::vector<double> sweep_grid;

    void validate() const;

    /// Resolved key = value lines, sorted by key; re-parsing this text yields
    /// an identical configuration and hash.
    std::string canonical() const;
    std::uint64_t config_hash() const;
    std::string config_hash_hex() const;

    ghz::PhaseMode make_phase_mode() const;
};

/// Parses the documented key = value schema. Unknown keys, duplicate keys and
/// out-of-range values are rejected with the offending key named.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

std::uint64_t fnv1a64(const std::string& text);
std::string to_hex16(std::uint64_t value);

} // namespace ghznet::harness
