#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "ghznet/ghz/ghz.hpp"
#include "ghznet/protocol/protocol.hpp"
#include "ghznet/rng.hpp"

namespace ghznet::adversary {

/// Where the measurement lives. The faked-measurement attack needs a single
/// measurement site and is rejected against the distributed topology, where
/// every party holds its own detectors.
enum class Topology : int { Localized = 0, Equitable = 1 };

enum class Strategy : int { FakedMeasurement = 0, ChannelLossTamper = 1 };

struct AttackConfig {
    int colluder = 0;
    Strategy strategy = Strategy::FakedMeasurement;
    double extra_loss = 0.0;  // loss-tamper only

    void validate(int n_parties, Topology topology) const;
};

/// Sign rule of the corrupt measurer for X rounds. RandomSign is a
/// deliberately detectable control for calibrating the detectability test.
enum class AnnouncePolicy : int { ParitySign = 0, RandomSign = 1 };

struct FakedRound {
    bool conclusive = false;
    ghz::Outcome announced = ghz::Outcome::Inconclusive;
    protocol::Basis measurement_basis = protocol::Basis::Z;
    std::vector<int> measured_bits;  // what the measurer learned, one per party
};

/// The corrupt measurer projects every incoming qubit onto the insider's
/// basis and fabricates an announcement that is indistinguishable from an
/// honest measurement in matched-basis rounds: Z rounds announce conclusive
/// (uniform sign) exactly for all-equal results, X rounds announce
/// conclusive at the honest rate 2^(1-N) with the sign fixed by the measured
/// parity.
FakedRound faked_measurement_round(const std::vector<protocol::PartySetting>& true_settings,
                                   protocol::Basis insider_basis, Pcg32& rng,
                                   AnnouncePolicy policy = AnnouncePolicy::ParitySign);

/// Joint insider-view / victim-bit counts per sifted round. Honest views take
/// values (own bit, announced sign) in 0..3; the attacked view is the
/// recorded victim bit in 0..1.
struct JointCounts {
    std::array<std::array<std::uint64_t, 2>, 4> n{};

    std::uint64_t total() const;
    void merge(const JointCounts& other);
};

/// Plug-in mutual information in bits from an empirical joint distribution.
/// Throws StatError below 1000 samples (no small-sample bias correction).
double mutual_information_bits(const JointCounts& joint);

struct LocalizedRunConfig {
    int n_parties = 3;
    std::uint64_t rounds = 100000;
    std::uint64_t seed = 1;
    int colluder = 0;
    int workers = 1;
};

struct LocalizedRun {
    protocol::ProtocolStats stats;
    /// victim party -> joint counts per basis [Z, X]
    std::map<int, std::array<JointCounts, 2>> joint;
    std::uint64_t sifted_rounds = 0;
    /// Sifted rounds where the insider's record equals the victim's bit.
    std::map<int, std::array<std::uint64_t, 2>> exact_hits;
    bool attacked = false;
    int colluder = 0;
};

/// Honest baseline: uniform BB84 settings per round, single photons, ideal
/// optics, outcomes by the exact measurement statistics.
LocalizedRun run_localized_honest(const LocalizedRunConfig& config);

/// Same protocol with the measurement site running the faked-measurement
/// strategy on the insider's behalf.
LocalizedRun run_localized_attacked(const LocalizedRunConfig& config,
                                    AnnouncePolicy policy = AnnouncePolicy::ParitySign);

struct InfoMetrics {
    std::map<int, double> mi_z;  // bits per sifted Z round, per victim
    std::map<int, double> mi_x;  // bits per sifted X round, per victim
    double q_z = 0.0;
    double q_x = 0.0;
};

struct ImbalanceReport {
    InfoMetrics honest;
    InfoMetrics attacked;
};

/// Empirical information imbalance between two runs that differ only in the
/// attack. Throws ContractError on mismatched configurations.
ImbalanceReport information_imbalance(const LocalizedRun& honest, const LocalizedRun& attacked);

struct Detectability {
    double delta_q_z = 0.0;
    double delta_q_x = 0.0;
    double se_q_z = 0.0;  // binomial standard error of the difference
    double se_q_x = 0.0;

    bool flagged(double n_sigma = 3.0) const;
};

/// QBER differences the honest parties could monitor, with binomial errors.
Detectability detectability(const protocol::ProtocolStats& honest,
                            const protocol::ProtocolStats& attacked);

struct TamperPoint {
    double extra_loss = 0.0;
    double q_z = 0.0;
    double q_x = 0.0;
    double gain_z = 0.0;  // conclusive fraction among matched-basis rounds
    double gain_x = 0.0;
    std::map<std::uint32_t, double> pattern_gain_z;  // input bits -> conclusive probability
    std::map<std::uint32_t, double> pattern_gain_x;
};

struct TamperConfig {
    double mu = 0.1;
    int tampered_channel = 0;
    int quad_nodes = 16;
    optics::DetectorModel det{};
};

/// Applies extra transmission loss to one quantum-channel segment of the
/// distributed scheme and reports exact phase-randomized WCP statistics per
/// tamper level.
std::vector<TamperPoint> channel_loss_tamper_sweep(const ghz::CircuitSpec& spec,
                                                   const std::vector<double>& extra_loss,
                                                   const TamperConfig& config);

} // namespace ghznet::adversary
