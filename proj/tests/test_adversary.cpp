#include <cmath>
#include <vector>

#include <doctest.h>

#include "ghznet/adversary/adversary.hpp"
#include "ghznet/errors.hpp"
#include "ghznet/rng.hpp"

using namespace ghznet;
using namespace ghznet::adversary;
using protocol::Basis;
using protocol::PartySetting;

namespace {

std::vector<PartySetting> x_settings(std::uint32_t bits, int n = 3) {
    std::vector<PartySetting> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        s[static_cast<std::size_t>(j)].basis = Basis::X;
        s[static_cast<std::size_t>(j)].bit = static_cast<int>((bits >> j) & 1u);
    }
    return s;
}

std::vector<PartySetting> z_settings(std::uint32_t bits, int n = 3) {
    auto s = x_settings(bits, n);
    for (auto& p : s) p.basis = Basis::Z;
    return s;
}

} // namespace

TEST_CASE("attack configuration is bound to the localized topology") {
    AttackConfig faked{0, Strategy::FakedMeasurement, 0.0};
    CHECK_NOTHROW(faked.validate(3, Topology::Localized));
    CHECK_THROWS_AS(faked.validate(3, Topology::Equitable), ConfigError);

    AttackConfig tamper{0, Strategy::ChannelLossTamper, 0.2};
    CHECK_NOTHROW(tamper.validate(3, Topology::Equitable));
    CHECK_THROWS_AS(tamper.validate(3, Topology::Localized), ConfigError);

    AttackConfig bad{5, Strategy::FakedMeasurement, 0.0};
    CHECK_THROWS_AS(bad.validate(3, Topology::Localized), ConfigError);
}

TEST_CASE("faked announcements on Z rounds") {
    // all-equal bits: conclusive, both signs appear, all bits learned
    int plus = 0, minus = 0;
    for (std::uint64_t i = 0; i < 400; ++i) {
        Pcg32 rng = make_round_rng(3, i);
        auto round = faked_measurement_round(z_settings(0b000), Basis::Z, rng);
        CHECK(round.conclusive);
        CHECK(round.measured_bits == std::vector<int>{0, 0, 0});
        if (round.announced == ghz::Outcome::Plus) ++plus;
        if (round.announced == ghz::Outcome::Minus) ++minus;
    }
    CHECK(plus > 100);
    CHECK(minus > 100);

    // unequal bits: never announced conclusive
    for (std::uint64_t i = 0; i < 100; ++i) {
        Pcg32 rng = make_round_rng(5, i);
        CHECK_FALSE(faked_measurement_round(z_settings(0b010), Basis::Z, rng).conclusive);
    }
}

TEST_CASE("faked announcements on X rounds follow the parity and the honest rate") {
    int conclusive = 0;
    const int rounds = 20000;
    for (std::uint64_t i = 0; i < rounds; ++i) {
        Pcg32 rng = make_round_rng(7, i);
        auto round = faked_measurement_round(x_settings(0b110), Basis::X, rng);
        CHECK(round.measured_bits == std::vector<int>{0, 1, 1});
        if (round.conclusive) {
            ++conclusive;
            CHECK(round.announced == ghz::Outcome::Plus);  // parity of (0,1,1) is even
        }
    }
    const double rate = static_cast<double>(conclusive) / rounds;
    const double se = std::sqrt(0.25 * 0.75 / rounds);
    CHECK(std::abs(rate - 0.25) < 4 * se);
}

TEST_CASE("conjugate-basis measurements come out uniform") {
    int ones = 0;
    const int rounds = 10000;
    for (std::uint64_t i = 0; i < rounds; ++i) {
        Pcg32 rng = make_round_rng(9, i);
        auto round = faked_measurement_round(z_settings(0b000), Basis::X, rng);
        ones += round.measured_bits[1];
    }
    const double mean = static_cast<double>(ones) / rounds;
    CHECK(std::abs(mean - 0.5) < 4 * std::sqrt(0.25 / rounds));
}

TEST_CASE("announcement stream matches honest statistics per pattern") {
    LocalizedRunConfig config{3, 150000, 101, 0, 2};
    auto honest = run_localized_honest(config);
    auto attacked = run_localized_attacked(config);

    // compare conclusive fractions per matched pattern at 4.5 sigma
    for (const auto& [key, h_counts] : honest.stats.pattern_counts) {
        auto it = attacked.stats.pattern_counts.find(key);
        const std::array<std::uint64_t, 3> a_counts =
            it == attacked.stats.pattern_counts.end() ? std::array<std::uint64_t, 3>{}
                                                      : it->second;
        const double nh = static_cast<double>(h_counts[0] + h_counts[1] + h_counts[2]);
        const double na = static_cast<double>(a_counts[0] + a_counts[1] + a_counts[2]);
        if (nh < 100 || na < 100) continue;
        for (int slot = 0; slot < 3; ++slot) {
            const double ph = static_cast<double>(h_counts[static_cast<std::size_t>(slot)]) / nh;
            const double pa = static_cast<double>(a_counts[static_cast<std::size_t>(slot)]) / na;
            const double se =
                std::sqrt(ph * (1 - ph) / nh + pa * (1 - pa) / na) + 1e-12;
            CHECK(std::abs(ph - pa) < 4.5 * se);
        }
    }
}

TEST_CASE("faked measurement is invisible in the monitored error rates") {
    LocalizedRunConfig config{3, 120000, 211, 0, 2};
    auto honest = run_localized_honest(config);
    auto attacked = run_localized_attacked(config);
    auto d = detectability(honest.stats, attacked.stats);
    CHECK_FALSE(d.flagged(3.0));
    // ideal single photons: both error rates are exactly zero on both sides
    CHECK(d.delta_q_z == 0.0);
    CHECK(d.delta_q_x == 0.0);
}

TEST_CASE("random-sign control is flagged immediately") {
    LocalizedRunConfig config{3, 60000, 303, 0, 2};
    auto honest = run_localized_honest(config);
    auto attacked = run_localized_attacked(config, AnnouncePolicy::RandomSign);
    auto d = detectability(honest.stats, attacked.stats);
    CHECK(d.flagged(3.0));
    CHECK(d.delta_q_x == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("two honest runs with different seeds stay within noise") {
    LocalizedRunConfig a{3, 50000, 404, 0, 2};
    LocalizedRunConfig b{3, 50000, 505, 0, 2};
    auto d = detectability(run_localized_honest(a).stats, run_localized_honest(b).stats);
    CHECK_FALSE(d.flagged(3.0));
}

TEST_CASE("information imbalance: the insider gains exactly the victims' X bits") {
    LocalizedRunConfig config{3, 200000, 77, 0, 2};
    auto honest = run_localized_honest(config);
    auto attacked = run_localized_attacked(config);
    auto report = information_imbalance(honest, attacked);

    for (int victim : {1, 2}) {
        // honestly, the X announcement reveals only the parity
        CHECK(std::abs(report.honest.mi_x.at(victim)) < 0.01);
        // sifted Z bits are all-equal, so Z knowledge is already complete
        CHECK(report.honest.mi_z.at(victim) > 0.99);
        // the attack records the victims' bits verbatim
        CHECK(report.attacked.mi_x.at(victim) > 0.99);
        CHECK(attacked.exact_hits.at(victim)[1] == attacked.joint.at(victim)[1].total());
        CHECK(report.attacked.mi_x.at(victim) - report.honest.mi_x.at(victim) ==
              doctest::Approx(1.0).epsilon(0.02));
    }
    CHECK(report.honest.q_x == 0.0);
    CHECK(report.attacked.q_x == 0.0);
}

TEST_CASE("mutual information needs enough samples") {
    JointCounts joint;
    joint.n[0][0] = 400;
    joint.n[1][1] = 400;
    CHECK_THROWS_AS(mutual_information_bits(joint), StatError);
    joint.n[0][0] = 600;
    CHECK_NOTHROW(mutual_information_bits(joint));
}

TEST_CASE("imbalance comparison rejects mismatched runs") {
    LocalizedRunConfig config{3, 30000, 1, 0, 2};
    auto honest = run_localized_honest(config);
    auto attacked = run_localized_attacked(config);
    CHECK_THROWS_AS(information_imbalance(attacked, honest), ContractError);
    LocalizedRunConfig other{3, 20000, 1, 0, 2};
    auto smaller = run_localized_attacked(other);
    CHECK_THROWS_AS(information_imbalance(honest, smaller), ContractError);
}

TEST_CASE("tamper sweep raises the X error rate monotonically") {
    ghz::CircuitSpec spec;
    spec.n_parties = 3;
    TamperConfig config;
    config.mu = 0.1;
    auto points = channel_loss_tamper_sweep(spec, {0.0, 0.25, 0.5}, config);
    REQUIRE(points.size() == 3);
    CHECK(points[0].extra_loss == 0.0);
    CHECK(points[0].q_x > 0.3);
    CHECK(points[1].q_x >= points[0].q_x - 1e-12);
    CHECK(points[2].q_x >= points[1].q_x - 1e-12);
    // tampering costs signal: the X gain drops
    CHECK(points[2].gain_x < points[0].gain_x);
    // Z errors stay structurally impossible
    for (const auto& p : points) CHECK(p.q_z < 1e-12);

    CHECK_THROWS_AS(channel_loss_tamper_sweep(spec, {1.5}, config), ConfigError);
}
