#include "ghznet/harness/runner.hpp"

#include <algorithm>
#include <cmath>

#include "ghznet/errors.hpp"
#include "ghznet/parallel.hpp"
#include "ghznet/protocol/protocol.hpp"
#include "ghznet/rng.hpp"

namespace ghznet::harness {

using protocol::Basis;
using protocol::PartySetting;
using protocol::SourceKind;

namespace {

constexpr std::size_t kMaxShareBits = 4096;

ResultTable make_table(const ExperimentConfig& cfg) {
    ResultTable table;
    table.mode = to_string(cfg.mode);
    table.seed = cfg.seed;
    table.config_hash = cfg.config_hash_hex();
    table.run_id = to_hex16(
        fnv1a64(table.config_hash + "|" + table.mode + "|" + std::to_string(cfg.seed)));
    return table;
}

std::string pattern_label(Basis basis, std::uint32_t bits, int n_parties) {
    std::string label = basis == Basis::Z ? "Z:" : "X:";
    for (int j = 0; j < n_parties; ++j) {
        const bool one = (bits >> j) & 1u;
        label += basis == Basis::Z ? (one ? 'V' : 'H') : (one ? 'A' : 'D');
    }
    return label;
}

double wald_stderr(double q, double n) {
    return n > 0.0 ? std::sqrt(std::max(q * (1.0 - q), 0.0) / n) : 0.0;
}

/// Draws the per-pulse phase for a coherent round.
double draw_phase(const ExperimentConfig& cfg, Pcg32& rng) {
    switch (cfg.phase_mode) {
        case ghz::PhaseMode::Kind::Fixed: return 0.0;
        case ghz::PhaseMode::Kind::Randomized: return 2.0 * std::numbers::pi * rng.uniform();
        case ghz::PhaseMode::Kind::PostSelected:
            return -cfg.phase_window + 2.0 * cfg.phase_window * rng.uniform();
    }
    return 0.0;
}

PartySetting make_setting(const ExperimentConfig& cfg, Basis basis, int bit, double intensity,
                          Pcg32& rng) {
    PartySetting s;
    s.basis = basis;
    s.bit = bit;
    s.source = cfg.source;
    if (cfg.source == SourceKind::Coherent) {
        s.intensity = intensity;
        s.pulse_phase = draw_phase(cfg, rng);
    }
    return s;
}

struct OutcomeTally {
    double plus = 0.0;
    double minus = 0.0;
    double inconclusive = 0.0;

    void add(ghz::Outcome o, double w = 1.0) {
        switch (o) {
            case ghz::Outcome::Plus: plus += w; break;
            case ghz::Outcome::Minus: minus += w; break;
            case ghz::Outcome::Inconclusive: inconclusive += w; break;
        }
    }
    double conclusive() const { return plus + minus; }
};

struct BasisSummary {
    double conclusive = 0.0;
    double numerator = 0.0;  // all-equal counts (Z) or wrong-sign counts (X)
};

/// Q_Z = 1 - equal/conclusive; Q_X = wrong/conclusive.
void fill_q_columns(std::vector<ResultRow>& rows, const std::vector<OutcomeTally>& tallies,
                    const std::vector<Basis>& bases, const std::vector<std::uint32_t>& bits,
                    int n_parties, bool sampled) {
    BasisSummary z, x;
    const std::uint32_t ones = (1u << n_parties) - 1u;
    for (std::size_t i = 0; i < tallies.size(); ++i) {
        const double conclusive = tallies[i].conclusive();
        if (bases[i] == Basis::Z) {
            z.conclusive += conclusive;
            if (bits[i] == 0 || bits[i] == ones) z.numerator += conclusive;
        } else {
            x.conclusive += conclusive;
            const bool even = (__builtin_popcount(bits[i]) % 2) == 0;
            x.numerator += even ? tallies[i].minus : tallies[i].plus;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (bases[i] == Basis::Z && z.conclusive > 0.0) {
            const double q = 1.0 - z.numerator / z.conclusive;
            rows[i].q_z = q;
            rows[i].stderr_qz = sampled ? wald_stderr(q, z.conclusive) : 0.0;
        } else if (bases[i] == Basis::X && x.conclusive > 0.0) {
            const double q = x.numerator / x.conclusive;
            rows[i].q_x = q;
            rows[i].stderr_qx = sampled ? wald_stderr(q, x.conclusive) : 0.0;
        }
    }
}

} // namespace

ResultTable run_characterize(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_parties;
    const std::uint32_t n_patterns = 1u << n;
    const protocol::SourceModel source_model{cfg.pol_misalignment};

    std::vector<Basis> bases;
    std::vector<std::uint32_t> bits;
    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t p = 0; p < n_patterns; ++p) {
            bases.push_back(b == 0 ? Basis::Z : Basis::X);
            bits.push_back(p);
        }
    }

    std::vector<OutcomeTally> tallies(bases.size());
    if (cfg.estimator == Estimator::Exact) {
        protocol::Engine engine(cfg.circuit, cfg.detector, source_model);
        const ghz::PhaseMode phase_mode = cfg.make_phase_mode();
        for (std::size_t i = 0; i < bases.size(); ++i) {
            std::vector<PartySetting> settings;
            for (int j = 0; j < n; ++j) {
                PartySetting s;
                s.basis = bases[i];
                s.bit = static_cast<int>((bits[i] >> j) & 1u);
                s.source = cfg.source;
                s.intensity = cfg.mu;
                settings.push_back(s);
            }
            const ghz::OutcomeDist dist = engine.expected_distribution(settings, phase_mode);
            const double rounds = static_cast<double>(cfg.rounds);
            tallies[i].plus = rounds * dist.plus;
            tallies[i].minus = rounds * dist.minus;
            tallies[i].inconclusive = rounds * dist.inconclusive;
        }
    } else {
        struct Acc {
            protocol::Engine engine;
            OutcomeTally tally;
        };
        for (std::size_t i = 0; i < bases.size(); ++i) {
            const std::uint64_t base_round = static_cast<std::uint64_t>(i) * cfg.rounds;
            parallel_rounds<Acc>(
                cfg.rounds, cfg.workers,
                [&] { return Acc{protocol::Engine(cfg.circuit, cfg.detector, source_model), {}}; },
                [&](Acc& acc, std::uint64_t id) {
                    Pcg32 rng = make_round_rng(cfg.seed, base_round + id);
                    std::vector<PartySetting> settings;
                    settings.reserve(static_cast<std::size_t>(n));
                    for (int j = 0; j < n; ++j) {
                        settings.push_back(make_setting(cfg, bases[i],
                                                        static_cast<int>((bits[i] >> j) & 1u),
                                                        cfg.mu, rng));
                    }
                    const auto record = acc.engine.run_round(settings, rng, base_round + id);
                    acc.tally.add(record.outcome);
                },
                [&](Acc&& acc) {
                    tallies[i].plus += acc.tally.plus;
                    tallies[i].minus += acc.tally.minus;
                    tallies[i].inconclusive += acc.tally.inconclusive;
                });
        }
    }

    ResultTable table = make_table(cfg);
    for (std::size_t i = 0; i < bases.size(); ++i) {
        ResultRow row;
        row.pattern = pattern_label(bases[i], bits[i], n);
        row.n_plus = tallies[i].plus;
        row.n_minus = tallies[i].minus;
        row.n_inconclusive = tallies[i].inconclusive;
        table.rows.push_back(std::move(row));
    }
    fill_q_columns(table.rows, tallies, bases, bits, n, cfg.estimator == Estimator::Sampling);
    return table;
}

KeygenReport run_keygen_report(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.estimator != Estimator::Sampling) {
        throw ConfigError("keygen generates keys by sampling; set estimator = sampling");
    }
    const int n = cfg.n_parties;
    const protocol::SourceModel source_model{cfg.pol_misalignment};
    protocol::DecoyConfig decoys{cfg.decoy_mu, cfg.decoy_prob};
    const bool use_decoys = !cfg.decoy_mu.empty();
    if (use_decoys) decoys.validate();

    struct Acc {
        protocol::Engine engine;
        protocol::ProtocolStats stats;
        std::vector<std::vector<std::uint8_t>> shares;
        std::uint64_t parity_errors = 0;
    };

    protocol::ProtocolStats stats;
    std::vector<std::vector<std::uint8_t>> shares(static_cast<std::size_t>(n));
    std::uint64_t parity_errors = 0;

    parallel_rounds<Acc>(
        cfg.rounds, cfg.workers,
        [&] {
            Acc acc{protocol::Engine(cfg.circuit, cfg.detector, source_model), {}, {}, 0};
            acc.shares.resize(static_cast<std::size_t>(n));
            return acc;
        },
        [&](Acc& acc, std::uint64_t id) {
            Pcg32 rng = make_round_rng(cfg.seed, id);
            std::vector<PartySetting> settings;
            settings.reserve(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                const Basis basis = rng.uniform() < cfg.basis_prob_z ? Basis::Z : Basis::X;
                const int bit = rng.bit();
                const double mu =
                    use_decoys ? decoys.intensities[static_cast<std::size_t>(decoys.sample(rng))]
                               : cfg.mu;
                settings.push_back(make_setting(cfg, basis, bit, mu, rng));
            }
            const auto record = acc.engine.run_round(settings, rng, id);
            acc.stats.record(record);
            if (record.sifted && settings.front().basis == Basis::X) {
                if (!protocol::x_parity_check(record)) ++acc.parity_errors;
                if (acc.shares[0].size() < kMaxShareBits) {
                    const int sign_bit = record.outcome == ghz::Outcome::Minus ? 1 : 0;
                    acc.shares[0].push_back(
                        static_cast<std::uint8_t>(settings[0].bit ^ sign_bit));
                    for (int j = 1; j < n; ++j) {
                        acc.shares[static_cast<std::size_t>(j)].push_back(
                            static_cast<std::uint8_t>(settings[static_cast<std::size_t>(j)].bit));
                    }
                }
            }
        },
        [&](Acc&& acc) {
            stats.merge(acc.stats);
            parity_errors += acc.parity_errors;
            for (int j = 0; j < n; ++j) {
                auto& dst = shares[static_cast<std::size_t>(j)];
                auto& src = acc.shares[static_cast<std::size_t>(j)];
                const std::size_t room = kMaxShareBits - std::min(kMaxShareBits, dst.size());
                const std::size_t take = std::min(room, src.size());
                dst.insert(dst.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(take));
            }
        });

    KeygenReport report;
    report.sifted_z = stats.conclusive_count(Basis::Z);
    report.sifted_x = stats.conclusive_count(Basis::X);
    report.x_parity_errors = parity_errors;
    report.shares = shares;
    if (!shares[0].empty()) {
        std::vector<std::vector<std::uint8_t>> others(shares.begin() + 1, shares.end());
        const auto recombined = protocol::combine_secret(others);
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < recombined.size(); ++i) {
            if (recombined[i] != shares[0][i]) ++mismatches;
        }
        report.secret_mismatch_fraction =
            static_cast<double>(mismatches) / static_cast<double>(recombined.size());
    }

    ResultTable table = make_table(cfg);
    for (int b = 0; b < 2; ++b) {
        const Basis basis = b == 0 ? Basis::Z : Basis::X;
        OutcomeTally tally;
        for (const auto& [key, counts] : stats.pattern_counts) {
            if (key.basis != basis) continue;
            tally.plus += static_cast<double>(counts[0]);
            tally.minus += static_cast<double>(counts[1]);
            tally.inconclusive += static_cast<double>(counts[2]);
        }
        ResultRow row;
        row.pattern = b == 0 ? "sifted:Z" : "sifted:X";
        row.n_plus = tally.plus;
        row.n_minus = tally.minus;
        row.n_inconclusive = tally.inconclusive;
        if (basis == Basis::Z && tally.conclusive() > 0.0) {
            const double q = compute_qber_z(stats);
            row.q_z = q;
            row.stderr_qz = wald_stderr(q, tally.conclusive());
        }
        if (basis == Basis::X && tally.conclusive() > 0.0) {
            const double q = compute_qber_x(stats);
            row.q_x = q;
            row.stderr_qx = wald_stderr(q, tally.conclusive());
        }
        table.rows.push_back(std::move(row));
    }
    for (const auto& [mu, counts] : stats.intensity_counts) {
        ResultRow row;
        row.pattern = "gain:mu=";
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (i) row.pattern += '|';
            row.pattern += format_number(mu[i]);
        }
        const double conclusive = static_cast<double>(counts[0]);
        const double total = static_cast<double>(counts[1]);
        row.n_plus = conclusive;          // conclusive events for this combination
        row.n_minus = 0.0;
        row.n_inconclusive = total - conclusive;
        table.rows.push_back(std::move(row));
    }
    report.table = std::move(table);
    return report;
}

ResultTable run_keygen(const ExperimentConfig& cfg) { return run_keygen_report(cfg).table; }

AttackReport run_attack(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.attack_strategy != adversary::Strategy::FakedMeasurement) {
        throw ConfigError("attack mode runs the faked-measurement suite; sweep channel loss "
                          "with mode = sweep, sweep_parameter = extra_loss");
    }
    adversary::LocalizedRunConfig run_config{cfg.n_parties, cfg.rounds, cfg.seed, cfg.colluder,
                                             cfg.workers};
    AttackReport report;
    const adversary::LocalizedRun honest = adversary::run_localized_honest(run_config);
    const adversary::LocalizedRun attacked = adversary::run_localized_attacked(run_config);
    report.imbalance = adversary::information_imbalance(honest, attacked);
    report.detect = adversary::detectability(honest.stats, attacked.stats);

    ResultTable table = make_table(cfg);
    auto add_rows = [&](const protocol::ProtocolStats& stats, const std::string& prefix) {
        for (int b = 0; b < 2; ++b) {
            const Basis basis = b == 0 ? Basis::Z : Basis::X;
            OutcomeTally tally;
            for (const auto& [key, counts] : stats.pattern_counts) {
                if (key.basis != basis) continue;
                tally.plus += static_cast<double>(counts[0]);
                tally.minus += static_cast<double>(counts[1]);
                tally.inconclusive += static_cast<double>(counts[2]);
            }
            ResultRow row;
            row.pattern = prefix + (b == 0 ? ":Z" : ":X");
            row.n_plus = tally.plus;
            row.n_minus = tally.minus;
            row.n_inconclusive = tally.inconclusive;
            if (tally.conclusive() > 0.0) {
                if (basis == Basis::Z) {
                    const double q = compute_qber_z(stats);
                    row.q_z = q;
                    row.stderr_qz = wald_stderr(q, tally.conclusive());
                } else {
                    const double q = compute_qber_x(stats);
                    row.q_x = q;
                    row.stderr_qx = wald_stderr(q, tally.conclusive());
                }
            }
            table.rows.push_back(std::move(row));
        }
    };
    add_rows(honest.stats, "honest");
    add_rows(attacked.stats, "attacked");
    report.table = std::move(table);
    return report;
}

namespace {

ExperimentConfig apply_sweep_point(const ExperimentConfig& cfg, double value) {
    ExperimentConfig point = cfg;
    const auto& param = cfg.sweep_parameter;
    if (param == "mu") {
        if (cfg.source != SourceKind::Coherent) {
            throw ConfigError("sweep_parameter 'mu' requires source = coherent");
        }
        if (value < 0.0) throw ConfigError("key 'sweep_grid': mu values must be >= 0");
        point.mu = value;
    } else if (param == "global_phase") {
        point.circuit.phi.assign(static_cast<std::size_t>(cfg.n_parties), 0.0);
        point.circuit.phi[0] = value;
    } else if (param == "extra_loss") {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw ConfigError("key 'sweep_grid': extra_loss values must be in [0, 1]");
        }
        if (point.circuit.eta_channel.empty()) {
            point.circuit.eta_channel.assign(static_cast<std::size_t>(cfg.n_parties), 1.0);
        }
        point.circuit.eta_channel[static_cast<std::size_t>(cfg.tampered_channel)] *= 1.0 - value;
    } else if (param == "phase_window") {
        point.phase_mode = ghz::PhaseMode::Kind::PostSelected;
        point.phase_window = value;
    } else if (param.rfind("eta_channel[", 0) == 0) {
        const int idx = std::stoi(param.substr(12));
        if (point.circuit.eta_channel.empty()) {
            point.circuit.eta_channel.assign(static_cast<std::size_t>(cfg.n_parties), 1.0);
        }
        point.circuit.eta_channel[static_cast<std::size_t>(idx)] = value;
    } else {
        throw ConfigError("key 'sweep_parameter': unknown parameter '" + param + "'");
    }
    point.validate();
    return point;
}

} // namespace

ResultTable run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultTable table = make_table(cfg);
    const int n = cfg.n_parties;
    const std::uint32_t n_patterns = 1u << n;

    for (std::size_t index = 0; index < cfg.sweep_grid.size(); ++index) {
        const double value = cfg.sweep_grid[index];
        const ExperimentConfig point = apply_sweep_point(cfg, value);
        const protocol::SourceModel source_model{point.pol_misalignment};

        std::vector<OutcomeTally> tallies(2 * n_patterns);
        std::vector<Basis> bases(2 * n_patterns);
        std::vector<std::uint32_t> bits(2 * n_patterns);
        for (int b = 0; b < 2; ++b) {
            for (std::uint32_t p = 0; p < n_patterns; ++p) {
                bases[static_cast<std::size_t>(b) * n_patterns + p] = b == 0 ? Basis::Z : Basis::X;
                bits[static_cast<std::size_t>(b) * n_patterns + p] = p;
            }
        }

        if (point.estimator == Estimator::Exact) {
            // Expected counts weighted by the probability of each matched
            // pattern under uniform bits and the configured basis bias.
            protocol::Engine engine(point.circuit, point.detector, source_model);
            const ghz::PhaseMode phase_mode = point.make_phase_mode();
            const double pattern_weight = std::pow(0.5, n);
            for (std::size_t i = 0; i < tallies.size(); ++i) {
                std::vector<PartySetting> settings;
                for (int j = 0; j < n; ++j) {
                    PartySetting s;
                    s.basis = bases[i];
                    s.bit = static_cast<int>((bits[i] >> j) & 1u);
                    s.source = point.source;
                    s.intensity = point.mu;
                    settings.push_back(s);
                }
                const ghz::OutcomeDist dist = engine.expected_distribution(settings, phase_mode);
                const double basis_weight =
                    std::pow(bases[i] == Basis::Z ? point.basis_prob_z : 1.0 - point.basis_prob_z,
                             n);
                const double w = static_cast<double>(point.rounds) * basis_weight * pattern_weight;
                tallies[i].plus = w * dist.plus;
                tallies[i].minus = w * dist.minus;
                tallies[i].inconclusive = w * dist.inconclusive;
            }
        } else {
            struct Acc {
                protocol::Engine engine;
                std::vector<OutcomeTally> tallies;
            };
            const std::uint64_t base_round = static_cast<std::uint64_t>(index) * cfg.rounds;
            parallel_rounds<Acc>(
                cfg.rounds, cfg.workers,
                [&] {
                    return Acc{protocol::Engine(point.circuit, point.detector, source_model),
                               std::vector<OutcomeTally>(2 * n_patterns)};
                },
                [&](Acc& acc, std::uint64_t id) {
                    Pcg32 rng = make_round_rng(cfg.seed, base_round + id);
                    std::vector<PartySetting> settings;
                    settings.reserve(static_cast<std::size_t>(n));
                    for (int j = 0; j < n; ++j) {
                        const Basis basis =
                            rng.uniform() < point.basis_prob_z ? Basis::Z : Basis::X;
                        settings.push_back(make_setting(point, basis, rng.bit(), point.mu, rng));
                    }
                    const auto record = acc.engine.run_round(settings, rng, base_round + id);
                    bool matched = true;
                    for (const auto& s : record.settings) {
                        matched = matched && s.basis == record.settings.front().basis;
                    }
                    if (!matched) return;
                    std::uint32_t pattern = 0;
                    for (int j = 0; j < n; ++j) {
                        if (record.settings[static_cast<std::size_t>(j)].bit) pattern |= 1u << j;
                    }
                    const std::size_t slot =
                        (record.settings.front().basis == Basis::Z ? 0 : n_patterns) + pattern;
                    acc.tallies[slot].add(record.outcome);
                },
                [&](Acc&& acc) {
                    for (std::size_t i = 0; i < tallies.size(); ++i) {
                        tallies[i].plus += acc.tallies[i].plus;
                        tallies[i].minus += acc.tallies[i].minus;
                        tallies[i].inconclusive += acc.tallies[i].inconclusive;
                    }
                });
        }

        // One row per grid point with aggregate counts and per-basis QBERs.
        OutcomeTally total;
        BasisSummary z, x;
        const std::uint32_t ones = n_patterns - 1u;
        for (std::size_t i = 0; i < tallies.size(); ++i) {
            total.plus += tallies[i].plus;
            total.minus += tallies[i].minus;
            total.inconclusive += tallies[i].inconclusive;
            if (bases[i] == Basis::Z) {
                z.conclusive += tallies[i].conclusive();
                if (bits[i] == 0 || bits[i] == ones) z.numerator += tallies[i].conclusive();
            } else {
                x.conclusive += tallies[i].conclusive();
                const bool even = (__builtin_popcount(bits[i]) % 2) == 0;
                x.numerator += even ? tallies[i].minus : tallies[i].plus;
            }
        }
        ResultRow row;
        row.pattern = cfg.sweep_parameter + "=" + format_number(value);
        row.n_plus = total.plus;
        row.n_minus = total.minus;
        row.n_inconclusive = total.inconclusive;
        const bool sampled = point.estimator == Estimator::Sampling;
        if (z.conclusive > 0.0) {
            const double q = 1.0 - z.numerator / z.conclusive;
            row.q_z = q;
            row.stderr_qz = sampled ? wald_stderr(q, z.conclusive) : 0.0;
        }
        if (x.conclusive > 0.0) {
            const double q = x.numerator / x.conclusive;
            row.q_x = q;
            row.stderr_qx = sampled ? wald_stderr(q, x.conclusive) : 0.0;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable run(const ExperimentConfig& cfg) {
    switch (cfg.mode) {
        case RunMode::Characterize: return run_characterize(cfg);
        case RunMode::Keygen: return run_keygen(cfg);
        case RunMode::Attack: return run_attack(cfg).table;
        case RunMode::Sweep: return run_sweep(cfg);
    }
    throw ConfigError("unknown run mode");
}

double extrapolate_to_zero(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.empty()) {
        throw ConfigError("extrapolate_to_zero: need matching non-empty grids");
    }
    const std::size_t n = xs.size();
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t i = 0; i + k < n; ++i) {
            const double denom = xs[i] - xs[i + k];
            if (denom == 0.0) throw ConfigError("extrapolate_to_zero: duplicate grid points");
            ys[i] = (-xs[i + k] * ys[i] + xs[i] * ys[i + 1]) / denom;
        }
    }
    return ys[0];
}

} // namespace ghznet::harness
