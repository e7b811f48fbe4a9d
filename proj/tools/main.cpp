#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ghznet/errors.hpp"
#include "ghznet/harness/config.hpp"
#include "ghznet/harness/runner.hpp"
#include "ghznet/harness/table.hpp"

namespace {

using namespace ghznet;

struct CliOptions {
    std::string config_path;
    std::string out_path = "-";
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> rounds;
    std::optional<int> workers;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--seed", opts.seed, "override the master seed");
    cmd->add_option("--rounds", opts.rounds, "override the round count");
    cmd->add_option("--workers", opts.workers, "worker thread count");
    cmd->add_option("--format", opts.format, "output format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--out", opts.out_path, "output path ('-' for stdout)");
}

harness::ExperimentConfig load_config(const CliOptions& opts) {
    harness::ExperimentConfig cfg = harness::parse_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.rounds) cfg.rounds = *opts.rounds;
    if (opts.workers) cfg.workers = *opts.workers;
    return cfg;
}

void write_table(const harness::ResultTable& table, const CliOptions& opts) {
    const harness::OutputFormat format =
        opts.format == "jsonl" ? harness::OutputFormat::JsonLines : harness::OutputFormat::Csv;
    if (opts.out_path == "-") {
        std::cout << (format == harness::OutputFormat::Csv ? harness::to_csv(table)
                                                           : harness::to_jsonl(table));
    } else {
        harness::emit(table, format, opts.out_path);
    }
}

void print_attack_summary(const harness::AttackReport& report) {
    const auto& ib = report.imbalance;
    std::cerr << "attack summary\n";
    std::cerr << "  honest    Q_Z=" << ib.honest.q_z << "  Q_X=" << ib.honest.q_x << "\n";
    std::cerr << "  attacked  Q_Z=" << ib.attacked.q_z << "  Q_X=" << ib.attacked.q_x << "\n";
    std::cerr << "  delta     Q_Z=" << report.detect.delta_q_z
              << " (se " << report.detect.se_q_z << ")  Q_X=" << report.detect.delta_q_x
              << " (se " << report.detect.se_q_x << ")  flagged at 3 sigma: "
              << (report.detect.flagged() ? "yes" : "no") << "\n";
    for (const auto& [victim, mi] : ib.honest.mi_x) {
        std::cerr << "  insider info on party " << victim
                  << " X bits: honest " << mi << " b/round, attacked "
                  << ib.attacked.mi_x.at(victim) << " b/round\n";
    }
}

void print_keygen_summary(const harness::KeygenReport& report) {
    std::cerr << "keygen summary\n";
    std::cerr << "  sifted Z rounds: " << report.sifted_z
              << ", sifted X rounds: " << report.sifted_x << "\n";
    std::cerr << "  X parity errors: " << report.x_parity_errors << "\n";
    if (!report.shares.empty() && !report.shares[0].empty()) {
        std::cerr << "  share length: " << report.shares[0].size()
                  << " bits, recombination mismatch fraction: "
                  << report.secret_mismatch_fraction << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed GHZ-measurement protocol simulator"};
    app.require_subcommand(1);

    CliOptions opts;
    CLI::App* characterize = app.add_subcommand("characterize", "fixed input-pattern tables");
    CLI::App* keygen = app.add_subcommand("keygen", "random-settings key generation run");
    CLI::App* attack = app.add_subcommand("attack", "faked-measurement attack comparison");
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
    CLI::App* validate = app.add_subcommand("validate-config", "parse, resolve and print a config");
    for (CLI::App* cmd : {characterize, keygen, attack, sweep, validate}) {
        add_common_options(cmd, opts);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        harness::ExperimentConfig cfg = load_config(opts);
        if (validate->parsed()) {
            cfg.validate();
            std::cout << cfg.canonical();
            std::cout << "config_hash = " << cfg.config_hash_hex() << "\n";
            return 0;
        }
        if (characterize->parsed()) cfg.mode = harness::RunMode::Characterize;
        if (keygen->parsed()) cfg.mode = harness::RunMode::Keygen;
        if (attack->parsed()) cfg.mode = harness::RunMode::Attack;
        if (sweep->parsed()) cfg.mode = harness::RunMode::Sweep;
        cfg.validate();

        if (attack->parsed()) {
            harness::AttackReport report = harness::run_attack(cfg);
            write_table(report.table, opts);
            print_attack_summary(report);
        } else if (keygen->parsed()) {
            harness::KeygenReport report = harness::run_keygen_report(cfg);
            write_table(report.table, opts);
            print_keygen_summary(report);
        } else {
            write_table(harness::run(cfg), opts);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
