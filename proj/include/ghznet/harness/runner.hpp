#pragma once

#include <cstdint>
#include <vector>

#include "ghznet/adversary/adversary.hpp"
#include "ghznet/harness/config.hpp"
#include "ghznet/harness/table.hpp"

namespace ghznet::harness {

/// Fixed input patterns, both bases, fixed rounds per pattern.
ResultTable run_characterize(const ExperimentConfig& config);

struct KeygenReport {
    ResultTable table;
    std::uint64_t sifted_z = 0;
    std::uint64_t sifted_x = 0;
    std::uint64_t x_parity_errors = 0;
    /// Per-party key bits from sifted X rounds (party 0 adjusted by the
    /// announced sign), capped in length.
    std::vector<std::vector<std::uint8_t>> shares;
    /// Fraction of key positions where the XOR of parties 1..N-1 misses
    /// party 0's bit; 0 for ideal single photons.
    double secret_mismatch_fraction = 0.0;
};

KeygenReport run_keygen_report(const ExperimentConfig& config);
ResultTable run_keygen(const ExperimentConfig& config);

struct AttackReport {
    ResultTable table;
    adversary::ImbalanceReport imbalance;
    adversary::Detectability detect;
};

AttackReport run_attack(const ExperimentConfig& config);

ResultTable run_sweep(const ExperimentConfig& config);

/// Dispatch by config mode.
ResultTable run(const ExperimentConfig& config);

/// Polynomial extrapolation of ys over xs to x = 0 (Neville's scheme).
double extrapolate_to_zero(std::vector<double> xs, std::vector<double> ys);

} // namespace ghznet::harness
