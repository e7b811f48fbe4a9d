#include "ghznet/protocol/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "ghznet/errors.hpp"

namespace ghznet::protocol {

using optics::ModeSpace;

Eigen::Vector2cd encode(Basis basis, int bit) {
    if (bit != 0 && bit != 1) throw ConfigError("encode: bit must be 0 or 1");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (basis == Basis::Z) {
        return bit == 0 ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
    }
    return bit == 0 ? Eigen::Vector2cd(inv_sqrt2, inv_sqrt2)
                    : Eigen::Vector2cd(inv_sqrt2, -inv_sqrt2);
}

namespace {

int outcome_slot(ghz::Outcome o) { return static_cast<int>(o); }

bool all_same_basis(const std::vector<PartySetting>& settings) {
    for (const auto& s : settings) {
        if (s.basis != settings.front().basis) return false;
    }
    return true;
}

std::uint32_t bits_of(const std::vector<PartySetting>& settings) {
    std::uint32_t bits = 0;
    for (std::size_t j = 0; j < settings.size(); ++j) {
        if (settings[j].bit) bits |= (1u << j);
    }
    return bits;
}

bool even_parity(std::uint32_t bits) { return (__builtin_popcount(bits) % 2) == 0; }

} // namespace

void ProtocolStats::record(const RoundRecord& record) {
    ++total_rounds;
    const auto& settings = record.settings;
    if (n_parties == 0) n_parties = static_cast<int>(settings.size());
    if (!settings.empty() && settings.front().source == SourceKind::Coherent) {
        std::vector<double> mu(settings.size());
        for (std::size_t j = 0; j < settings.size(); ++j) mu[j] = settings[j].intensity;
        auto& cell = intensity_counts[mu];
        if (record.outcome != ghz::Outcome::Inconclusive) ++cell[0];
        ++cell[1];
    }
    if (!all_same_basis(settings)) {
        ++mixed_basis_rounds;
        return;
    }
    PatternKey key{settings.front().basis, bits_of(settings)};
    ++pattern_counts[key][static_cast<std::size_t>(outcome_slot(record.outcome))];
}

void ProtocolStats::merge(const ProtocolStats& other) {
    if (n_parties == 0) n_parties = other.n_parties;
    for (const auto& [key, counts] : other.pattern_counts) {
        auto& mine = pattern_counts[key];
        for (std::size_t i = 0; i < counts.size(); ++i) mine[i] += counts[i];
    }
    for (const auto& [key, counts] : other.intensity_counts) {
        auto& mine = intensity_counts[key];
        mine[0] += counts[0];
        mine[1] += counts[1];
    }
    mixed_basis_rounds += other.mixed_basis_rounds;
    total_rounds += other.total_rounds;
}

std::uint64_t ProtocolStats::conclusive_count(Basis basis) const {
    std::uint64_t n = 0;
    for (const auto& [key, counts] : pattern_counts) {
        if (key.basis == basis) n += counts[0] + counts[1];
    }
    return n;
}

std::uint64_t ProtocolStats::matched_count(Basis basis) const {
    std::uint64_t n = 0;
    for (const auto& [key, counts] : pattern_counts) {
        if (key.basis == basis) n += counts[0] + counts[1] + counts[2];
    }
    return n;
}

double compute_qber_z(const ProtocolStats& stats) {
    std::uint64_t all_equal = 0;
    std::uint64_t total = 0;
    const std::uint32_t ones = (1u << stats.n_parties) - 1u;
    for (const auto& [key, counts] : stats.pattern_counts) {
        if (key.basis != Basis::Z) continue;
        const std::uint64_t conclusive = counts[0] + counts[1];
        total += conclusive;
        if (key.bits == 0 || key.bits == ones) all_equal += conclusive;
    }
    if (total == 0) throw StatError("Q_Z undefined: no conclusive Z-basis rounds");
    return 1.0 - static_cast<double>(all_equal) / static_cast<double>(total);
}

double compute_qber_x(const ProtocolStats& stats) {
    std::uint64_t wrong = 0;
    std::uint64_t total = 0;
    for (const auto& [key, counts] : stats.pattern_counts) {
        if (key.basis != Basis::X) continue;
        total += counts[0] + counts[1];
        wrong += even_parity(key.bits) ? counts[1] : counts[0];
    }
    if (total == 0) throw StatError("Q_X undefined: no conclusive X-basis rounds");
    return static_cast<double>(wrong) / static_cast<double>(total);
}

Engine::Engine(ghz::CircuitSpec spec, optics::DetectorModel det, SourceModel source)
    : spec_(std::move(spec)),
      det_(det),
      source_(source),
      signal_space_(ModeSpace::signals(spec_.n_parties)),
      signal_circuit_(ghz::build_ghz_circuit(spec_, ModeSpace::signals(spec_.n_parties))),
      fock_space_(spec_.lossless() ? ModeSpace::signals(spec_.n_parties)
                                   : ModeSpace::with_loss_ancillas(spec_.n_parties)) {
    det_.validate();
}

Eigen::Vector2cd Engine::prepared_jones(const PartySetting& setting) const {
    Eigen::Vector2cd jones = encode(setting.basis, setting.bit);
    if (source_.pol_misalignment != 0.0) {
        const double c = std::cos(source_.pol_misalignment);
        const double s = std::sin(source_.pol_misalignment);
        Eigen::Matrix2cd rot;
        rot << c, -s, s, c;
        jones = rot * jones;
    }
    return jones;
}

const optics::FockState& Engine::cached_fock_output(const std::vector<PartySetting>& settings) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < settings.size(); ++j) {
        if (settings[j].basis == Basis::X) key |= (1ull << j);
        if (settings[j].bit) key |= (1ull << (j + 32));
    }
    auto it = fock_cache_.find(key);
    if (it != fock_cache_.end()) return it->second;

    if (!fock_circuit_) {
        fock_circuit_ = std::make_shared<optics::LinearCircuit>(
            ghz::build_ghz_circuit(spec_, fock_space_));
    }
    std::vector<Eigen::Vector2cd> jones;
    jones.reserve(settings.size());
    for (const auto& s : settings) jones.push_back(prepared_jones(s));
    optics::FockState input = optics::FockState::single_photon_product(
        fock_space_, jones, std::max(optics::kDefaultPhotonCap, spec_.n_parties));
    auto [pos, inserted] = fock_cache_.emplace(key, optics::propagate_fock(*fock_circuit_, input));
    return pos->second;
}

RoundRecord Engine::run_round(const std::vector<PartySetting>& settings, Pcg32& rng,
                              std::uint64_t round_id) {
    if (static_cast<int>(settings.size()) != spec_.n_parties) {
        throw ConfigError("run_round: need one setting per party");
    }
    for (const auto& s : settings) {
        if (s.source != settings.front().source) {
            throw ConfigError("run_round: mixed source kinds are not supported");
        }
    }

    RoundRecord record;
    record.settings = settings;
    record.round_id = round_id;

    if (settings.front().source == SourceKind::SinglePhoton) {
        const optics::FockState& out = cached_fock_output(settings);
        record.event = optics::sample_detection(out, det_, rng);
    } else {
        std::vector<Eigen::Vector2cd> jones;
        jones.reserve(settings.size());
        for (const auto& s : settings) {
            if (s.intensity < 0.0) throw ConfigError("run_round: intensity must be >= 0");
            jones.push_back(std::sqrt(s.intensity) * std::polar(1.0, s.pulse_phase) *
                            prepared_jones(s));
        }
        optics::CoherentField field = optics::CoherentField::from_jones(signal_space_, jones);
        optics::CoherentField out = optics::propagate_coherent(signal_circuit_, field);
        record.event = optics::sample_detection(optics::click_probabilities(out, det_), rng);
    }

    record.outcome = ghz::classify(record.event);
    record.sifted = all_same_basis(settings) && record.outcome != ghz::Outcome::Inconclusive;
    return record;
}

ghz::OutcomeDist Engine::expected_distribution(const std::vector<PartySetting>& settings,
                                               const ghz::PhaseMode& phase_mode) const {
    if (static_cast<int>(settings.size()) != spec_.n_parties) {
        throw ConfigError("expected_distribution: need one setting per party");
    }
    if (settings.front().source == SourceKind::SinglePhoton) {
        std::vector<Eigen::Vector2cd> jones;
        jones.reserve(settings.size());
        for (const auto& s : settings) jones.push_back(prepared_jones(s));
        optics::FockState input = optics::FockState::single_photon_product(
            optics::ModeSpace::signals(spec_.n_parties), jones,
            std::max(optics::kDefaultPhotonCap, spec_.n_parties));
        return ghz::outcome_distribution_fock(input, spec_, det_);
    }
    std::vector<Eigen::Vector2cd> jones;
    jones.reserve(settings.size());
    for (const auto& s : settings) {
        jones.push_back(std::sqrt(s.intensity) * std::polar(1.0, s.pulse_phase) *
                        prepared_jones(s));
    }
    return ghz::outcome_distribution_coherent(jones, spec_, det_, phase_mode);
}

RoundRecord run_round(const std::vector<PartySetting>& settings, const ghz::CircuitSpec& spec,
                      const optics::DetectorModel& det, Pcg32& rng) {
    Engine engine(spec, det);
    return engine.run_round(settings, rng);
}

SiftedGroups sift(const std::vector<RoundRecord>& records) {
    SiftedGroups groups;
    for (const auto& r : records) {
        if (!r.sifted) continue;
        if (r.settings.front().basis == Basis::Z) {
            groups.z_rounds.push_back(r);
        } else {
            groups.x_rounds.push_back(r);
        }
    }
    return groups;
}

bool x_parity_check(const RoundRecord& record) {
    if (!record.sifted || record.settings.front().basis != Basis::X) {
        throw ContractError("x_parity_check: record is not a sifted X-basis round");
    }
    const bool even = even_parity(bits_of(record.settings));
    return record.outcome == ghz::Outcome::Plus ? even : !even;
}

void DecoyConfig::validate() const {
    if (intensities.empty() || intensities.size() != probabilities.size()) {
        throw ConfigError("decoy config: need matching intensity and probability lists");
    }
    double sum = 0.0;
    for (double mu : intensities) {
        if (mu < 0.0) throw ConfigError("decoy_mu must be >= 0");
    }
    for (double p : probabilities) {
        if (p < 0.0) throw ConfigError("decoy_prob entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("decoy_prob must sum to 1");
}

int DecoyConfig::sample(Pcg32& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probabilities.size()) - 1;
}

std::map<std::vector<double>, GainCell> decoy_bookkeeping(const std::vector<RoundRecord>& records,
                                                          const DecoyConfig& config) {
    config.validate();
    std::map<std::vector<double>, GainCell> table;
    for (const auto& r : records) {
        if (r.settings.empty() || r.settings.front().source != SourceKind::Coherent) continue;
        std::vector<double> mu(r.settings.size());
        for (std::size_t j = 0; j < r.settings.size(); ++j) mu[j] = r.settings[j].intensity;
        auto& cell = table[mu];
        if (r.outcome != ghz::Outcome::Inconclusive) ++cell.conclusive;
        ++cell.total;
    }
    return table;
}

std::vector<std::uint8_t> combine_secret(const std::vector<std::vector<std::uint8_t>>& private_keys) {
    if (private_keys.empty()) throw ConfigError("combine_secret: no keys given");
    const std::size_t len = private_keys.front().size();
    for (const auto& key : private_keys) {
        if (key.size() != len) throw ConfigError("combine_secret: key lengths differ");
    }
    std::vector<std::uint8_t> secret(len, 0);
    for (const auto& key : private_keys) {
        for (std::size_t i = 0; i < len; ++i) secret[i] ^= (key[i] & 1u);
    }
    return secret;
}

} // namespace ghznet::protocol
