#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ghznet/ghz/ghz.hpp"
#include "ghznet/optics/detector.hpp"
#include "ghznet/rng.hpp"

namespace ghznet::protocol {

enum class Basis : int { Z = 0, X = 1 };
enum class SourceKind : int { SinglePhoton = 0, Coherent = 1 };

/// One party's choices for one round. Intensity and pulse phase only apply to
/// coherent sources.
struct PartySetting {
    Basis basis = Basis::Z;
    int bit = 0;
    double intensity = 0.0;
    double pulse_phase = 0.0;
    SourceKind source = SourceKind::SinglePhoton;
};

/// Z: 0 -> |H>, 1 -> |V>;  X: 0 -> |D> = (|H>+|V>)/sqrt2, 1 -> |A> = (|H>-|V>)/sqrt2.
Eigen::Vector2cd encode(Basis basis, int bit);

struct RoundRecord {
    std::vector<PartySetting> settings;
    optics::DetectionEvent event;
    ghz::Outcome outcome = ghz::Outcome::Inconclusive;
    bool sifted = false;
    std::uint64_t round_id = 0;
};

/// Shared source imperfection: every prepared Jones vector is rotated by this
/// angle before entering the circuit.
struct SourceModel {
    double pol_misalignment = 0.0;
};

struct PatternKey {
    Basis basis = Basis::Z;
    std::uint32_t bits = 0;  // bit j = party j's bit

    friend auto operator<=>(const PatternKey&, const PatternKey&) = default;
};

/// Commutative count accumulator; merging partial stats in any grouping gives
/// the same totals, which keeps parallel runs deterministic.
struct ProtocolStats {
    int n_parties = 0;
    /// Matched-basis rounds only, indexed [plus, minus, inconclusive].
    std::map<PatternKey, std::array<std::uint64_t, 3>> pattern_counts;
    /// Per intensity combination: {conclusive, total}; coherent rounds only.
    std::map<std::vector<double>, std::array<std::uint64_t, 2>> intensity_counts;
    std::uint64_t mixed_basis_rounds = 0;
    std::uint64_t total_rounds = 0;

    void record(const RoundRecord& record);
    void merge(const ProtocolStats& other);

    std::uint64_t conclusive_count(Basis basis) const;
    std::uint64_t matched_count(Basis basis) const;
};

/// Q_Z = 1 - (N_{0..0} + N_{1..1}) / sum over all Z patterns of conclusive
/// counts. Throws StatError when the denominator is zero.
double compute_qber_z(const ProtocolStats& stats);

/// Per X pattern the wrong sign is Minus for even-parity inputs and Plus for
/// odd; the aggregate is the count-weighted average. Throws StatError when
/// the denominator is zero.
double compute_qber_x(const ProtocolStats& stats);

/// Simulates rounds for a fixed circuit, detector and source model. Caches
/// propagated single-photon states per input pattern, so batch runs are
/// cheap. Not thread safe; give each worker its own copy.
class Engine {
public:
    Engine(ghz::CircuitSpec spec, optics::DetectorModel det, SourceModel source = {});

    RoundRecord run_round(const std::vector<PartySetting>& settings, Pcg32& rng,
                          std::uint64_t round_id = 0);

    /// Exact expected outcome distribution for fixed settings; coherent
    /// pulse phases are handled per the phase mode.
    ghz::OutcomeDist expected_distribution(const std::vector<PartySetting>& settings,
                                           const ghz::PhaseMode& phase_mode) const;

    const ghz::CircuitSpec& spec() const { return spec_; }
    const optics::DetectorModel& detector() const { return det_; }
    const SourceModel& source_model() const { return source_; }

    /// Prepared per-party Jones vector including encoding and misalignment
    /// (unit norm; no intensity factor).
    Eigen::Vector2cd prepared_jones(const PartySetting& setting) const;

private:
    const optics::FockState& cached_fock_output(const std::vector<PartySetting>& settings);

    ghz::CircuitSpec spec_;
    optics::DetectorModel det_;
    SourceModel source_;
    optics::ModeSpace signal_space_;
    optics::LinearCircuit signal_circuit_;
    optics::ModeSpace fock_space_;
    std::shared_ptr<optics::LinearCircuit> fock_circuit_;  // built on first Fock round
    std::map<std::uint64_t, optics::FockState> fock_cache_;
};

/// One-shot convenience wrapper around Engine.
RoundRecord run_round(const std::vector<PartySetting>& settings, const ghz::CircuitSpec& spec,
                      const optics::DetectorModel& det, Pcg32& rng);

struct SiftedGroups {
    std::vector<RoundRecord> z_rounds;
    std::vector<RoundRecord> x_rounds;
};

/// Keeps conclusive rounds where all parties used the same basis.
SiftedGroups sift(const std::vector<RoundRecord>& records);

/// True when the announced sign matches the parity of the X bits (Plus needs
/// even parity, Minus odd). Only defined for sifted X rounds.
bool x_parity_check(const RoundRecord& record);

/// Decoy intensity levels with selection probabilities.
struct DecoyConfig {
    std::vector<double> intensities;
    std::vector<double> probabilities;

    void validate() const;
    int sample(Pcg32& rng) const;
};

struct GainCell {
    std::uint64_t conclusive = 0;
    std::uint64_t total = 0;
    double gain() const { return total == 0 ? 0.0 : static_cast<double>(conclusive) / static_cast<double>(total); }
};

/// Conclusive-event fraction per intensity combination.
std::map<std::vector<double>, GainCell> decoy_bookkeeping(const std::vector<RoundRecord>& records,
                                                          const DecoyConfig& config);

/// s = p_1 xor p_2 xor ... xor p_N, bitwise over equal-length key strings.
std::vector<std::uint8_t> combine_secret(const std::vector<std::vector<std::uint8_t>>& private_keys);

} // namespace ghznet::protocol
