// Acceptance suite: runs every exit criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if anything fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ghznet/adversary/adversary.hpp"
#include "ghznet/ghz/ghz.hpp"
#include "ghznet/harness/config.hpp"
#include "ghznet/harness/runner.hpp"
#include "ghznet/harness/table.hpp"
#include "ghznet/parallel.hpp"
#include "ghznet/protocol/protocol.hpp"
#include "ghznet/rng.hpp"

using namespace ghznet;
using protocol::Basis;
using protocol::PartySetting;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) { return harness::format_number(v); }

optics::FockState basis_state(int n, std::uint32_t bits) {
    std::vector<Eigen::Vector2cd> jones;
    for (int j = 0; j < n; ++j) {
        jones.push_back(((bits >> j) & 1u) ? Eigen::Vector2cd(0.0, 1.0)
                                           : Eigen::Vector2cd(1.0, 0.0));
    }
    return optics::FockState::single_photon_product(optics::ModeSpace::signals(n), jones);
}

optics::DetectionEvent event_from_letters(const std::string& letters) {
    optics::DetectionEvent ev;
    for (char c : letters) ev.clicks.push_back(c == 'V' ? 2 : 1);
    return ev;
}

double wrong_sign(const ghz::OutcomeDist& dist, std::uint32_t bits) {
    return (__builtin_popcount(bits) % 2 == 0) ? dist.minus : dist.plus;
}

// ---- criteria ----

void criterion_1_truth_table() {
    const std::vector<std::pair<std::string, ghz::Outcome>> expected{
        {"HHH", ghz::Outcome::Plus},  {"HVV", ghz::Outcome::Plus},
        {"VHV", ghz::Outcome::Plus},  {"VVH", ghz::Outcome::Plus},
        {"HHV", ghz::Outcome::Minus}, {"HVH", ghz::Outcome::Minus},
        {"VHH", ghz::Outcome::Minus}, {"VVV", ghz::Outcome::Minus},
    };
    int correct = 0;
    for (const auto& [letters, outcome] : expected) {
        if (ghz::classify(event_from_letters(letters)) == outcome) ++correct;
    }
    report(1, "coincidence truth table", correct == 8, std::to_string(correct) + "/8 patterns");
}

void criterion_2_ghz_inputs() {
    ghz::CircuitSpec spec;
    spec.n_parties = 3;
    optics::DetectorModel det{};
    auto plus = ghz::outcome_distribution_fock(ghz::ghz_state(3, +1), spec, det);
    auto minus = ghz::outcome_distribution_fock(ghz::ghz_state(3, -1), spec, det);
    const bool ok = std::abs(plus.plus - 1.0) < 1e-9 && std::abs(minus.minus - 1.0) < 1e-9;
    report(2, "GHZ inputs identified with certainty", ok,
           "P(+|ghz+)=" + fmt(plus.plus) + " P(-|ghz-)=" + fmt(minus.minus));
}

void criterion_3_non_ghz_rejection() {
    optics::DetectorModel det{};
    double worst = 0.0;
    Pcg32 rng(0xACCE11, 3);
    for (int trial = 0; trial < 100; ++trial) {
        ghz::CircuitSpec spec;
        spec.n_parties = 3;
        for (int j = 0; j < 3; ++j) {
            spec.theta.push_back(rng.uniform() * 2 * kPi);
            spec.phi.push_back(rng.uniform() * 2 * kPi);
        }
        for (std::uint32_t bits = 1; bits < 7; ++bits) {
            const auto dist = ghz::outcome_distribution_fock(basis_state(3, bits), spec, det);
            worst = std::max(worst, dist.conclusive());
        }
    }
    report(3, "non-GHZ basis states yield no coincidence (100 random phase sets)", worst < 1e-12,
           "max conclusive probability " + fmt(worst));
}

void criterion_4_single_photon_protocol() {
    ghz::CircuitSpec spec;
    spec.n_parties = 3;
    const optics::DetectorModel det{};
    struct Acc {
        protocol::Engine engine;
        protocol::ProtocolStats stats;
    };
    protocol::ProtocolStats stats;
    const std::uint64_t rounds = 1700000;  // ~1/16 sift rate -> > 1e5 sifted
    parallel_rounds<Acc>(
        rounds, 4, [&] { return Acc{protocol::Engine(spec, det), {}}; },
        [&](Acc& acc, std::uint64_t id) {
            Pcg32 rng = make_round_rng(0xC4, id);
            std::vector<PartySetting> settings(3);
            for (auto& s : settings) {
                s.basis = rng.bit() ? Basis::X : Basis::Z;
                s.bit = rng.bit();
            }
            acc.stats.record(acc.engine.run_round(settings, rng, id));
        },
        [&](Acc&& acc) { stats.merge(acc.stats); });

    const std::uint64_t sifted =
        stats.conclusive_count(Basis::Z) + stats.conclusive_count(Basis::X);
    const double q_z = protocol::compute_qber_z(stats);
    const double q_x = protocol::compute_qber_x(stats);

    bool z_clean = true;
    for (const auto& [key, counts] : stats.pattern_counts) {
        if (key.basis == Basis::Z && key.bits != 0 && key.bits != 7) {
            z_clean = z_clean && (counts[0] + counts[1]) == 0;
        }
    }
    const double matched_x = static_cast<double>(stats.matched_count(Basis::X));
    const double conclusive_x = static_cast<double>(stats.conclusive_count(Basis::X));
    const double p_hat = conclusive_x / matched_x;
    const double se = std::sqrt(0.25 * 0.75 / matched_x);
    const bool ok = sifted >= 100000 && q_z == 0.0 && q_x == 0.0 && z_clean &&
                    std::abs(p_hat - 0.25) < 3 * se;
    report(4, "ideal single-photon protocol: Q_Z = Q_X = 0 over 1e5 sifted rounds", ok,
           "sifted=" + std::to_string(sifted) + " Q_Z=" + fmt(q_z) + " Q_X=" + fmt(q_x) +
               " P(conclusive|X)=" + fmt(p_hat));
}

void criterion_5_wcp_intrinsic_qber() {
    ghz::CircuitSpec spec;
    spec.n_parties = 3;
    const optics::DetectorModel det{};
    const std::vector<double> mus{0.2, 0.1, 0.05};
    std::vector<double> q_x_values;
    double worst_z = 0.0;
    for (double mu : mus) {
        double wrong = 0.0, conclusive = 0.0;
        for (std::uint32_t bits = 0; bits < 8; ++bits) {
            std::vector<Eigen::Vector2cd> jones;
            for (int j = 0; j < 3; ++j) {
                jones.push_back(std::sqrt(mu) *
                                protocol::encode(Basis::X, static_cast<int>((bits >> j) & 1u)));
            }
            const auto dist =
                ghz::outcome_distribution_coherent(jones, spec, det, ghz::PhaseMode::randomized(16));
            conclusive += dist.conclusive();
            wrong += wrong_sign(dist, bits);
        }
        q_x_values.push_back(wrong / conclusive);
        for (std::uint32_t bits = 1; bits < 7; ++bits) {
            std::vector<Eigen::Vector2cd> jones;
            for (int j = 0; j < 3; ++j) {
                jones.push_back(std::sqrt(mu) *
                                protocol::encode(Basis::Z, static_cast<int>((bits >> j) & 1u)));
            }
            const auto dist =
                ghz::outcome_distribution_coherent(jones, spec, det, ghz::PhaseMode::randomized(16));
            worst_z = std::max(worst_z, dist.conclusive());
        }
    }
    const double limit = harness::extrapolate_to_zero(mus, q_x_values);
    const bool ok = std::abs(limit - 0.375) <= 0.01 && worst_z < 1e-12;
    report(5, "phase-randomized WCP: Q_X extrapolates to 3/8, Q_Z structurally zero", ok,
           "Q_X(mu)=" + fmt(q_x_values[0]) + "," + fmt(q_x_values[1]) + "," + fmt(q_x_values[2]) +
               " -> " + fmt(limit) + "; max unequal-Z conclusive " + fmt(worst_z));
}

void criterion_6_phase_covariance() {
    optics::DetectorModel det{};
    ghz::CircuitSpec base;
    base.n_parties = 3;
    ghz::CircuitSpec flipped = base;
    flipped.phi = {kPi, 0.0, 0.0};
    double worst = 0.0;
    for (int sign : {+1, -1}) {
        const auto d0 = ghz::outcome_distribution_fock(ghz::ghz_state(3, sign), base, det);
        const auto d1 = ghz::outcome_distribution_fock(ghz::ghz_state(3, sign), flipped, det);
        worst = std::max(worst, std::abs(d0.plus - d1.minus));
        worst = std::max(worst, std::abs(d0.minus - d1.plus));
    }
    report(6, "interferometer phase pi swaps the GHZ signs", worst < 1e-9,
           "max swapped-probability difference " + fmt(worst));
}

void criterion_7_characterize_reproduction() {
    // (a) single-photon Z table: conclusive only on the all-equal rows, both signs
    auto z_cfg = harness::parse_config_text("n_parties = 3\nrounds = 20000\nseed = 7\n");
    const auto table = harness::run_characterize(z_cfg);
    bool z_ok = table.rows.size() == 16;
    for (int i = 0; i < 8 && z_ok; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        const double conclusive = row.n_plus + row.n_minus;
        if (row.pattern == "Z:HHH" || row.pattern == "Z:VVV") {
            z_ok = conclusive > 0.0 && row.n_plus > 0.0 && row.n_minus > 0.0;
        } else {
            z_ok = conclusive == 0.0;
        }
    }

    // (b) WCP randomized-phase X table: the plus sign dominates exactly the
    // even-parity rows (DDD, DAA, ADA, AAD)
    auto x_cfg = harness::parse_config_text(
        "n_parties = 3\nrounds = 60000\nseed = 8\nsource = coherent\nmu = 0.2\n"
        "phase_mode = randomized\n");
    const auto wcp = harness::run_characterize(x_cfg);
    bool x_ok = wcp.rows.size() == 16;
    for (int i = 8; i < 16 && x_ok; ++i) {
        const auto& row = wcp.rows[static_cast<std::size_t>(i)];
        int a_count = 0;
        for (char c : row.pattern) {
            if (c == 'A') ++a_count;
        }
        x_ok = (a_count % 2 == 0) ? row.n_plus > row.n_minus : row.n_minus > row.n_plus;
    }

    // (c) documented noise demo: polarization misalignment 0.2 rad at mu = 0.1
    // pushes both error rates above their clean values
    auto demo_cfg = harness::parse_config_text(
        "n_parties = 3\nrounds = 1000\nseed = 9\nsource = coherent\nmu = 0.1\n"
        "phase_mode = randomized\npol_misalignment = 0.2\nestimator = exact\n");
    const auto demo = harness::run_characterize(demo_cfg);
    double demo_qz = -1.0, demo_qx = -1.0;
    for (const auto& row : demo.rows) {
        if (row.q_z) demo_qz = *row.q_z;
        if (row.q_x) demo_qx = *row.q_x;
    }
    const bool demo_ok = demo_qz > 0.0 && demo_qx > 0.375;

    report(7, "characterize tables reproduce both input-state structures + noise demo",
           z_ok && x_ok && demo_ok,
           "demo Q_Z=" + fmt(demo_qz) + " Q_X=" + fmt(demo_qx));
}

void criterion_8_attack_suite() {
    adversary::LocalizedRunConfig config{3, 200000, 0xA77AC3, 0, 4};
    const auto honest = adversary::run_localized_honest(config);
    const auto attacked = adversary::run_localized_attacked(config);
    const auto detect = adversary::detectability(honest.stats, attacked.stats);
    const auto report_ib = adversary::information_imbalance(honest, attacked);

    bool mi_ok = true;
    for (int victim : {1, 2}) {
        mi_ok = mi_ok && std::abs(report_ib.honest.mi_x.at(victim)) <= 0.01;
        mi_ok = mi_ok && report_ib.attacked.mi_x.at(victim) > 0.99;
        mi_ok = mi_ok && attacked.exact_hits.at(victim)[1] == attacked.joint.at(victim)[1].total();
    }
    const bool ok = !detect.flagged(3.0) && mi_ok;
    report(8, "faked-measurement attack: invisible QBERs, insider learns the X bits", ok,
           "dQ_Z=" + fmt(detect.delta_q_z) + " dQ_X=" + fmt(detect.delta_q_x) +
               " I_att(X)=" + fmt(report_ib.attacked.mi_x.at(1)) +
               " I_hon(X)=" + fmt(report_ib.honest.mi_x.at(1)));
}

void criterion_9_tamper_sweep() {
    ghz::CircuitSpec spec;
    spec.n_parties = 3;
    adversary::TamperConfig config;
    config.mu = 0.1;
    const std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    const auto points = adversary::channel_loss_tamper_sweep(spec, grid, config);
    bool monotone = true;
    for (std::size_t i = 1; i < points.size(); ++i) {
        monotone = monotone && points[i].q_x >= points[i - 1].q_x - 1e-12;
    }

    // uniform extra loss leaves single-photon conditional ratios unchanged
    optics::DetectorModel det{};
    ghz::CircuitSpec lossy = spec;
    lossy.eta_delay = {0.9, 0.9, 0.9};
    lossy.eta_channel = {0.8, 0.8, 0.8};
    ghz::CircuitSpec uniform = lossy;
    for (auto& e : uniform.eta_delay) e *= 0.7;
    for (auto& e : uniform.eta_channel) e *= 0.7;
    double worst = 0.0;
    for (std::uint32_t bits : {0u, 7u}) {
        const auto a = ghz::outcome_distribution_fock(basis_state(3, bits), lossy, det);
        const auto b = ghz::outcome_distribution_fock(basis_state(3, bits), uniform, det);
        worst = std::max(worst,
                         std::abs(a.plus / a.conclusive() - b.plus / b.conclusive()));
    }
    const auto ga = ghz::outcome_distribution_fock(ghz::ghz_state(3, +1), lossy, det);
    const auto gb = ghz::outcome_distribution_fock(ghz::ghz_state(3, +1), uniform, det);
    worst = std::max(worst, std::abs(ga.plus / ga.conclusive() - gb.plus / gb.conclusive()));

    const bool ok = monotone && worst < 1e-9;
    report(9, "single-channel tampering raises Q_X; uniform loss cancels out", ok,
           "Q_X " + fmt(points.front().q_x) + " -> " + fmt(points.back().q_x) +
               "; conditional-ratio shift " + fmt(worst));
}

void criterion_10_n_party() {
    optics::DetectorModel det{};
    bool ok = true;
    std::string detail;
    for (int n : {4, 5}) {
        ghz::CircuitSpec spec;
        spec.n_parties = n;
        const auto plus = ghz::outcome_distribution_fock(ghz::ghz_state(n, +1), spec, det);
        const auto minus = ghz::outcome_distribution_fock(ghz::ghz_state(n, -1), spec, det);
        ok = ok && std::abs(plus.plus - 1.0) < 1e-9 && std::abs(minus.minus - 1.0) < 1e-9;
        double worst = 0.0;
        for (std::uint32_t bits = 1; bits < (1u << n) - 1u; ++bits) {
            const auto dist = ghz::outcome_distribution_fock(basis_state(n, bits), spec, det);
            worst = std::max(worst, dist.conclusive());
        }
        ok = ok && worst < 1e-12;
        detail += "N=" + std::to_string(n) + " max non-GHZ conclusive " + fmt(worst) + "  ";
    }
    report(10, "four- and five-party generalization", ok, detail);
}

void criterion_11_determinism() {
    const std::string base =
        "mode = keygen\nn_parties = 3\nrounds = 20000\nseed = 2718\nsource = coherent\n"
        "mu = 0.2\nphase_mode = randomized\n";
    const auto dir = std::filesystem::temp_directory_path();
    const auto path1 = dir / "ghznet_acc_w1.csv";
    const auto path4 = dir / "ghznet_acc_w4.csv";

    auto cfg1 = harness::parse_config_text(base);
    cfg1.workers = 1;
    harness::emit(harness::run_keygen(cfg1), harness::OutputFormat::Csv, path1.string());

    auto cfg4 = harness::parse_config_text(base);
    cfg4.workers = 4;
    harness::emit(harness::run_keygen(cfg4), harness::OutputFormat::Csv, path4.string());

    std::ifstream f1(path1, std::ios::binary);
    std::ifstream f4(path4, std::ios::binary);
    const std::string bytes1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string bytes4((std::istreambuf_iterator<char>(f4)), std::istreambuf_iterator<char>());
    std::filesystem::remove(path1);
    std::filesystem::remove(path4);

    const bool ok = !bytes1.empty() && bytes1 == bytes4;
    report(11, "identical config and seed give byte-identical output across worker counts", ok,
           std::to_string(bytes1.size()) + " bytes");
}

} // namespace

int main() {
    criterion_1_truth_table();
    criterion_2_ghz_inputs();
    criterion_3_non_ghz_rejection();
    criterion_4_single_photon_protocol();
    criterion_5_wcp_intrinsic_qber();
    criterion_6_phase_covariance();
    criterion_7_characterize_reproduction();
    criterion_8_attack_suite();
    criterion_9_tamper_sweep();
    criterion_10_n_party();
    criterion_11_determinism();

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}
