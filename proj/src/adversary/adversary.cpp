#include "ghznet/adversary/adversary.hpp"

#include <cmath>

#include "ghznet/errors.hpp"
#include "ghznet/parallel.hpp"

namespace ghznet::adversary {

using protocol::Basis;
using protocol::PartySetting;

void AttackConfig::validate(int n_parties, Topology topology) const {
    if (colluder < 0 || colluder >= n_parties) {
        throw ConfigError("colluder must name a party index, got " + std::to_string(colluder));
    }
    if (!(extra_loss >= 0.0 && extra_loss <= 1.0)) {
        throw ConfigError("extra_loss must be in [0, 1], got " + std::to_string(extra_loss));
    }
    if (strategy == Strategy::FakedMeasurement && topology != Topology::Localized) {
        throw ConfigError(
            "faked-measurement attack requires the localized topology: with the "
            "distributed measurement there is no single site whose announcement "
            "the insider controls");
    }
    if (strategy == Strategy::ChannelLossTamper && topology != Topology::Equitable) {
        throw ConfigError("channel-loss tampering targets the distributed scheme's "
                          "quantum channels; set topology = equitable");
    }
}

FakedRound faked_measurement_round(const std::vector<PartySetting>& true_settings,
                                   Basis insider_basis, Pcg32& rng, AnnouncePolicy policy) {
    const int n = static_cast<int>(true_settings.size());
    if (n < 2) throw ConfigError("faked_measurement_round: need at least two parties");

    FakedRound round;
    round.measurement_basis = insider_basis;
    round.measured_bits.resize(static_cast<std::size_t>(n));
    // Projecting a single photon onto the preparation basis returns the true
    // bit; onto the conjugate basis, a uniform bit.
    for (int j = 0; j < n; ++j) {
        const auto& s = true_settings[static_cast<std::size_t>(j)];
        round.measured_bits[static_cast<std::size_t>(j)] =
            (s.basis == insider_basis) ? s.bit : rng.bit();
    }

    if (insider_basis == Basis::Z) {
        bool all_equal = true;
        for (int j = 1; j < n; ++j) {
            if (round.measured_bits[static_cast<std::size_t>(j)] != round.measured_bits[0]) {
                all_equal = false;
                break;
            }
        }
        // An honest measurement registers unequal Z patterns as no
        // coincidence, so announcing them conclusive would stand out.
        if (all_equal) {
            round.conclusive = true;
            round.announced = rng.bit() ? ghz::Outcome::Minus : ghz::Outcome::Plus;
        }
        return round;
    }

    // X rounds: announce at the honest conclusive rate 2^(1-N) so the
    // announcement stream is statistically indistinguishable.
    if (rng.uniform() < std::ldexp(1.0, 1 - n)) {
        round.conclusive = true;
        int parity = 0;
        for (int b : round.measured_bits) parity ^= b;
        if (policy == AnnouncePolicy::RandomSign) {
            round.announced = rng.bit() ? ghz::Outcome::Minus : ghz::Outcome::Plus;
        } else {
            round.announced = parity ? ghz::Outcome::Minus : ghz::Outcome::Plus;
        }
    }
    return round;
}

std::uint64_t JointCounts::total() const {
    std::uint64_t t = 0;
    for (const auto& row : n) {
        for (std::uint64_t c : row) t += c;
    }
    return t;
}

void JointCounts::merge(const JointCounts& other) {
    for (std::size_t o = 0; o < n.size(); ++o) {
        for (std::size_t v = 0; v < n[o].size(); ++v) n[o][v] += other.n[o][v];
    }
}

double mutual_information_bits(const JointCounts& joint) {
    const std::uint64_t total = joint.total();
    if (total < 1000) {
        throw StatError("mutual information undefined below 1000 samples, got " +
                        std::to_string(total));
    }
    const double t = static_cast<double>(total);
    std::array<double, 4> po{};
    std::array<double, 2> pv{};
    for (std::size_t o = 0; o < 4; ++o) {
        for (std::size_t v = 0; v < 2; ++v) {
            po[o] += static_cast<double>(joint.n[o][v]) / t;
            pv[v] += static_cast<double>(joint.n[o][v]) / t;
        }
    }
    double mi = 0.0;
    for (std::size_t o = 0; o < 4; ++o) {
        for (std::size_t v = 0; v < 2; ++v) {
            const double p = static_cast<double>(joint.n[o][v]) / t;
            if (p > 0.0) mi += p * std::log2(p / (po[o] * pv[v]));
        }
    }
    return mi;
}

namespace {

struct WorkerState {
    protocol::Engine engine;
    LocalizedRun run;
};

void merge_runs(LocalizedRun& into, LocalizedRun&& part) {
    into.stats.merge(part.stats);
    for (auto& [victim, joints] : part.joint) {
        into.joint[victim][0].merge(joints[0]);
        into.joint[victim][1].merge(joints[1]);
    }
    for (auto& [victim, hits] : part.exact_hits) {
        into.exact_hits[victim][0] += hits[0];
        into.exact_hits[victim][1] += hits[1];
    }
    into.sifted_rounds += part.sifted_rounds;
}

std::vector<PartySetting> draw_settings(int n_parties, Pcg32& rng) {
    std::vector<PartySetting> settings(static_cast<std::size_t>(n_parties));
    for (auto& s : settings) {
        s.basis = rng.bit() ? Basis::X : Basis::Z;
        s.bit = rng.bit();
        s.source = protocol::SourceKind::SinglePhoton;
    }
    return settings;
}

LocalizedRun run_localized(const LocalizedRunConfig& config, bool attacked, AnnouncePolicy policy) {
    if (config.n_parties < 2) throw ConfigError("n_parties must be >= 2");
    if (config.colluder < 0 || config.colluder >= config.n_parties) {
        throw ConfigError("colluder must name a party index");
    }
    ghz::CircuitSpec spec;
    spec.n_parties = config.n_parties;
    const optics::DetectorModel det{};

    LocalizedRun result;
    result.attacked = attacked;
    result.colluder = config.colluder;

    parallel_rounds<WorkerState>(
        config.rounds, config.workers,
        [&] {
            WorkerState state{protocol::Engine(spec, det), LocalizedRun{}};
            state.run.attacked = attacked;
            state.run.colluder = config.colluder;
            return state;
        },
        [&](WorkerState& state, std::uint64_t round_id) {
            Pcg32 rng = make_round_rng(config.seed, round_id);
            const auto settings = draw_settings(config.n_parties, rng);
            const Basis basis = settings.front().basis;
            protocol::RoundRecord record;
            FakedRound faked;
            if (attacked) {
                faked = faked_measurement_round(
                    settings, settings[static_cast<std::size_t>(config.colluder)].basis, rng,
                    policy);
                record.settings = settings;
                record.round_id = round_id;
                record.event.clicks.assign(static_cast<std::size_t>(config.n_parties), 0);
                record.outcome = faked.conclusive ? faked.announced : ghz::Outcome::Inconclusive;
                bool matched = true;
                for (const auto& s : settings) matched = matched && s.basis == basis;
                record.sifted = matched && faked.conclusive;
            } else {
                record = state.engine.run_round(settings, rng, round_id);
            }
            state.run.stats.record(record);
            if (!record.sifted) return;
            ++state.run.sifted_rounds;

            const std::size_t b = basis == Basis::Z ? 0 : 1;
            const int insider_bit = settings[static_cast<std::size_t>(config.colluder)].bit;
            for (int victim = 0; victim < config.n_parties; ++victim) {
                if (victim == config.colluder) continue;
                const int victim_bit = settings[static_cast<std::size_t>(victim)].bit;
                std::size_t view;
                if (attacked) {
                    const int recorded = faked.measured_bits[static_cast<std::size_t>(victim)];
                    view = static_cast<std::size_t>(recorded);
                    if (recorded == victim_bit) ++state.run.exact_hits[victim][b];
                } else {
                    view = static_cast<std::size_t>(
                        insider_bit * 2 + (record.outcome == ghz::Outcome::Minus ? 1 : 0));
                }
                ++state.run.joint[victim][b].n[view][static_cast<std::size_t>(victim_bit)];
            }
        },
        [&](WorkerState&& state) { merge_runs(result, std::move(state.run)); });

    return result;
}

} // namespace

LocalizedRun run_localized_honest(const LocalizedRunConfig& config) {
    return run_localized(config, false, AnnouncePolicy::ParitySign);
}

LocalizedRun run_localized_attacked(const LocalizedRunConfig& config, AnnouncePolicy policy) {
    return run_localized(config, true, policy);
}

namespace {

InfoMetrics metrics_of(const LocalizedRun& run) {
    InfoMetrics m;
    m.q_z = compute_qber_z(run.stats);
    m.q_x = compute_qber_x(run.stats);
    for (const auto& [victim, joints] : run.joint) {
        m.mi_z[victim] = mutual_information_bits(joints[0]);
        m.mi_x[victim] = mutual_information_bits(joints[1]);
    }
    return m;
}

} // namespace

ImbalanceReport information_imbalance(const LocalizedRun& honest, const LocalizedRun& attacked) {
    if (honest.stats.n_parties != attacked.stats.n_parties ||
        honest.stats.total_rounds != attacked.stats.total_rounds ||
        honest.colluder != attacked.colluder) {
        throw ContractError("information_imbalance: runs must share the same configuration");
    }
    if (honest.attacked || !attacked.attacked) {
        throw ContractError("information_imbalance: pass (honest, attacked) in that order");
    }
    return {metrics_of(honest), metrics_of(attacked)};
}

namespace {

double safe_q(double num, double den) { return den > 0.0 ? num / den : 0.0; }

} // namespace

Detectability detectability(const protocol::ProtocolStats& honest,
                            const protocol::ProtocolStats& attacked) {
    if (honest.total_rounds != attacked.total_rounds) {
        throw ContractError("detectability: runs must have equal round counts");
    }
    Detectability d;
    const double qz_h = compute_qber_z(honest);
    const double qz_a = compute_qber_z(attacked);
    const double qx_h = compute_qber_x(honest);
    const double qx_a = compute_qber_x(attacked);
    d.delta_q_z = qz_a - qz_h;
    d.delta_q_x = qx_a - qx_h;
    const double nz_h = static_cast<double>(honest.conclusive_count(Basis::Z));
    const double nz_a = static_cast<double>(attacked.conclusive_count(Basis::Z));
    const double nx_h = static_cast<double>(honest.conclusive_count(Basis::X));
    const double nx_a = static_cast<double>(attacked.conclusive_count(Basis::X));
    d.se_q_z = std::sqrt(safe_q(qz_h * (1.0 - qz_h), nz_h) + safe_q(qz_a * (1.0 - qz_a), nz_a));
    d.se_q_x = std::sqrt(safe_q(qx_h * (1.0 - qx_h), nx_h) + safe_q(qx_a * (1.0 - qx_a), nx_a));
    return d;
}

bool Detectability::flagged(double n_sigma) const {
    const bool z_off = se_q_z > 0.0 ? std::abs(delta_q_z) > n_sigma * se_q_z : delta_q_z != 0.0;
    const bool x_off = se_q_x > 0.0 ? std::abs(delta_q_x) > n_sigma * se_q_x : delta_q_x != 0.0;
    return z_off || x_off;
}

std::vector<TamperPoint> channel_loss_tamper_sweep(const ghz::CircuitSpec& spec,
                                                   const std::vector<double>& extra_loss,
                                                   const TamperConfig& config) {
    spec.validate();
    if (config.tampered_channel < 0 || config.tampered_channel >= spec.n_parties) {
        throw ConfigError("tampered_channel must name a channel index");
    }
    if (config.mu < 0.0) throw ConfigError("mu must be >= 0");

    const int n = spec.n_parties;
    std::vector<TamperPoint> points;
    points.reserve(extra_loss.size());
    for (double extra : extra_loss) {
        if (!(extra >= 0.0 && extra <= 1.0)) {
            throw ConfigError("extra_loss must be in [0, 1], got " + std::to_string(extra));
        }
        ghz::CircuitSpec tampered = spec;
        if (tampered.eta_channel.empty()) {
            tampered.eta_channel.assign(static_cast<std::size_t>(n), 1.0);
        }
        tampered.eta_channel[static_cast<std::size_t>(config.tampered_channel)] *= 1.0 - extra;

        TamperPoint point;
        point.extra_loss = extra;
        double conc_z = 0.0, conc_x = 0.0, equal_z = 0.0, wrong_x = 0.0;
        const std::uint32_t ones = (1u << n) - 1u;
        for (int basis = 0; basis < 2; ++basis) {
            for (std::uint32_t bits = 0; bits <= ones; ++bits) {
                std::vector<Eigen::Vector2cd> jones;
                jones.reserve(static_cast<std::size_t>(n));
                for (int j = 0; j < n; ++j) {
                    jones.push_back(std::sqrt(config.mu) *
                                    protocol::encode(basis == 0 ? Basis::Z : Basis::X,
                                                     (bits >> j) & 1u));
                }
                const ghz::OutcomeDist dist = ghz::outcome_distribution_coherent(
                    jones, tampered, config.det, ghz::PhaseMode::randomized(config.quad_nodes));
                if (basis == 0) {
                    point.pattern_gain_z[bits] = dist.conclusive();
                    conc_z += dist.conclusive();
                    if (bits == 0 || bits == ones) equal_z += dist.conclusive();
                } else {
                    point.pattern_gain_x[bits] = dist.conclusive();
                    conc_x += dist.conclusive();
                    int parity = __builtin_popcount(bits) % 2;
                    wrong_x += parity == 0 ? dist.minus : dist.plus;
                }
            }
        }
        const double patterns = static_cast<double>(ones) + 1.0;
        point.gain_z = conc_z / patterns;
        point.gain_x = conc_x / patterns;
        point.q_z = conc_z > 0.0 ? 1.0 - equal_z / conc_z : 0.0;
        point.q_x = conc_x > 0.0 ? wrong_x / conc_x : 0.0;
        points.push_back(std::move(point));
    }
    return points;
}

} // namespace ghznet::adversary
