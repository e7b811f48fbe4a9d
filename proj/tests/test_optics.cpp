#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "ghznet/errors.hpp"
#include "ghznet/optics/circuit.hpp"
#include "ghznet/optics/coherent.hpp"
#include "ghznet/optics/detector.hpp"
#include "ghznet/optics/fock.hpp"
#include "ghznet/optics/mode_space.hpp"
#include "ghznet/rng.hpp"

using namespace ghznet;
using namespace ghznet::optics;

namespace {

constexpr double kPi = std::numbers::pi;

Occupation occ(const ModeSpace& space, std::initializer_list<std::pair<int, int>> photons) {
    Occupation o(static_cast<std::size_t>(space.dimension()), 0);
    for (auto [index, count] : photons) o[static_cast<std::size_t>(index)] = count;
    return o;
}

} // namespace

TEST_CASE("mode space ordering and sizes") {
    ModeSpace s3 = build_mode_space(3, false);
    CHECK(s3.dimension() == 6);
    CHECK(s3.mode(0) == ModeId{0, Polarization::H, ModeKind::Signal});
    CHECK(s3.mode(1) == ModeId{0, Polarization::V, ModeKind::Signal});
    CHECK(s3.mode(2) == ModeId{1, Polarization::H, ModeKind::Signal});
    CHECK(s3.index_of({2, Polarization::V, ModeKind::Signal}) == 5);

    ModeSpace lossy = build_mode_space(3, true);
    CHECK(lossy.dimension() == 12);  // 6 signal + one ancilla per lossy segment
    CHECK(lossy.has_ancillas());
    for (int i = 0; i < 6; ++i) CHECK(lossy.mode(i).kind == ModeKind::Signal);
    for (int i = 6; i < 12; ++i) CHECK(lossy.mode(i).kind == ModeKind::LossAncilla);

    CHECK(build_mode_space(5, false).dimension() == 10);
    CHECK_THROWS_AS(build_mode_space(1, false), ConfigError);
}

TEST_CASE("half waveplate matrix convention") {
    ModeSpace space = build_mode_space(2, false);

    auto at0 = element_hwp(0.0, 0, space).matrix();
    CHECK(std::abs(at0(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(at0(1, 1) + 1.0) < 1e-15);
    CHECK(std::abs(at0(0, 1)) < 1e-15);
    CHECK(std::abs(at0(2, 2) - 1.0) < 1e-15);  // identity elsewhere

    auto hadamard = element_hwp(kPi / 8, 0, space).matrix();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(hadamard(0, 0) - inv_sqrt2) < 1e-12);
    CHECK(std::abs(hadamard(0, 1) - inv_sqrt2) < 1e-12);
    CHECK(std::abs(hadamard(1, 0) - inv_sqrt2) < 1e-12);
    CHECK(std::abs(hadamard(1, 1) + inv_sqrt2) < 1e-12);

    auto swap = element_hwp(kPi / 4, 1, space).matrix();
    CHECK(std::abs(swap(2, 3) - 1.0) < 1e-12);
    CHECK(std::abs(swap(3, 2) - 1.0) < 1e-12);
    CHECK(std::abs(swap(2, 2)) < 1e-12);

    CHECK_THROWS_AS(element_hwp(0.1, 5, space), ConfigError);
}

TEST_CASE("phase element and composition") {
    ModeSpace space = build_mode_space(2, false);
    ModeId mode{0, Polarization::V, ModeKind::Signal};

    CHECK((element_phase(0.0, mode, space).matrix() -
           Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

    auto pi_phase = element_phase(kPi, mode, space).matrix();
    CHECK(std::abs(pi_phase(1, 1) + 1.0) < 1e-15);

    auto half = element_phase(kPi / 2, mode, space);
    auto stacked = compose(half, half);
    CHECK(std::abs(stacked.matrix()(1, 1) + 1.0) < 1e-12);

    auto hwp = element_hwp(kPi / 8, 0, space);
    auto twice = compose(hwp, hwp);
    CHECK((twice.matrix() - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    auto ident = LinearCircuit::identity(space);
    CHECK((compose(ident, hwp).matrix() - hwp.matrix()).cwiseAbs().maxCoeff() == 0.0);

    ModeSpace other = build_mode_space(3, false);
    CHECK_THROWS_AS(compose(hwp, LinearCircuit::identity(other)), ConfigError);
}

TEST_CASE("attenuator element") {
    ModeSpace space = build_mode_space(2, true);
    ModeId mode{0, Polarization::H, ModeKind::Signal};
    ModeId anc{0, Polarization::H, ModeKind::LossAncilla};

    auto full = element_attenuator(1.0, mode, anc, space);
    CHECK((full.matrix() - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(full.is_unitary());

    auto blocked = element_attenuator(0.0, mode, anc, space);
    CHECK(std::abs(blocked.matrix()(space.index_of(anc), space.index_of(mode)) - 1.0) < 1e-15);
    CHECK(std::abs(blocked.matrix()(space.index_of(mode), space.index_of(mode))) < 1e-15);
    CHECK(blocked.is_unitary());

    auto half = element_attenuator(0.5, mode, anc, space);
    CoherentField field = CoherentField::vacuum(space);
    field.amps(space.index_of(mode)) = 1.0;
    auto out = propagate_coherent(half, field);
    CHECK(std::abs(out.amps(space.index_of(mode)) - 1.0 / std::sqrt(2.0)) < 1e-12);

    CHECK_THROWS_AS(element_attenuator(1.5, mode, anc, space), ConfigError);
    CHECK_THROWS_AS(element_attenuator(0.5, mode, mode, space), ConfigError);
}

TEST_CASE("sub-unitarity is enforced") {
    ModeSpace space = build_mode_space(2, false);
    Eigen::MatrixXcd gain = Eigen::MatrixXcd::Identity(4, 4);
    gain(0, 0) = 1.5;
    CHECK_THROWS_AS(LinearCircuit(space, gain), ConfigError);
}

TEST_CASE("coherent propagation examples and linearity") {
    ModeSpace space = build_mode_space(2, false);
    auto ident = LinearCircuit::identity(space);
    CoherentField f = CoherentField::vacuum(space);
    f.amps << 2.0, 0.5, 0.0, 1.0;
    CHECK((propagate_coherent(ident, f).amps - f.amps).cwiseAbs().maxCoeff() == 0.0);

    // attenuator eta = 0.25 halves the amplitude
    ModeSpace lossy = build_mode_space(2, true);
    CoherentField g = CoherentField::vacuum(lossy);
    g.amps(0) = 2.0;
    auto att = element_attenuator(0.25, {0, Polarization::H, ModeKind::Signal},
                                  {0, Polarization::H, ModeKind::LossAncilla}, lossy);
    CHECK(std::abs(propagate_coherent(att, g).amps(0) - 1.0) < 1e-12);

    auto hadamard = element_hwp(kPi / 8, 0, space);
    CoherentField h = CoherentField::vacuum(space);
    h.amps(0) = 1.0;
    auto out = propagate_coherent(hadamard, h);
    CHECK(std::abs(out.amps(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out.amps(1) - 1.0 / std::sqrt(2.0)) < 1e-12);

    // linearity over random fields
    Pcg32 rng(7, 11);
    auto circuit = compose(
        compose(element_hwp(0.3, 0, space),
                element_phase(1.1, {1, Polarization::V, ModeKind::Signal}, space)),
        element_hwp(1.9, 1, space));
    for (int trial = 0; trial < 20; ++trial) {
        CoherentField a = CoherentField::vacuum(space);
        CoherentField b = CoherentField::vacuum(space);
        for (int i = 0; i < 4; ++i) {
            a.amps(i) = {rng.uniform() - 0.5, rng.uniform() - 0.5};
            b.amps(i) = {rng.uniform() - 0.5, rng.uniform() - 0.5};
        }
        std::complex<double> alpha{rng.uniform(), rng.uniform()};
        std::complex<double> beta{rng.uniform(), rng.uniform()};
        CoherentField mix = CoherentField::vacuum(space);
        mix.amps = alpha * a.amps + beta * b.amps;
        Eigen::VectorXcd lhs = propagate_coherent(circuit, mix).amps;
        Eigen::VectorXcd rhs = alpha * propagate_coherent(circuit, a).amps +
                               beta * propagate_coherent(circuit, b).amps;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("single photon through a Hadamard pair") {
    ModeSpace space = build_mode_space(2, false);
    FockState in(space);
    in.add_term(occ(space, {{0, 1}}), 1.0);
    auto out = propagate_fock(element_hwp(kPi / 8, 0, space), in);
    CHECK(std::abs(out.amplitude(occ(space, {{0, 1}})) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out.amplitude(occ(space, {{1, 1}})) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
}

TEST_CASE("two-photon bunching on a balanced mixer") {
    // Oracle by hand: (a+b)(a-b)/2 = (a^2 - b^2)/2, so the coincidence term
    // vanishes and the bunched kets get amplitude +-1/sqrt(2).
    ModeSpace space = build_mode_space(2, false);
    FockState in(space);
    in.add_term(occ(space, {{0, 1}, {1, 1}}), 1.0);
    auto out = propagate_fock(element_hwp(kPi / 8, 0, space), in);
    CHECK(std::abs(out.amplitude(occ(space, {{0, 1}, {1, 1}}))) < 1e-14);
    CHECK(std::abs(out.amplitude(occ(space, {{0, 2}})) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out.amplitude(occ(space, {{1, 2}})) + 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
}

TEST_CASE("fock propagation conserves photon number and norm") {
    ModeSpace space = build_mode_space(3, false);
    Pcg32 rng(21, 5);
    for (int trial = 0; trial < 15; ++trial) {
        LinearCircuit circuit = LinearCircuit::identity(space);
        for (int j = 0; j < 3; ++j) {
            circuit = compose(circuit, element_hwp(rng.uniform() * kPi, j, space));
            circuit = compose(circuit,
                              element_phase(rng.uniform() * 2 * kPi,
                                            {j, Polarization::V, ModeKind::Signal}, space));
        }
        CHECK(circuit.is_unitary(1e-12));

        FockState in(space);
        in.add_term(occ(space, {{0, 1}, {3, 2}}), std::sqrt(0.5));
        in.add_term(occ(space, {{1, 1}, {2, 1}, {5, 1}}), std::sqrt(0.5));
        auto out = propagate_fock(circuit, in);
        CHECK(std::abs(out.norm() - 1.0) < 1e-9);
        for (const auto& [o, amp] : out.terms()) {
            int total = 0;
            for (int n : o) total += n;
            CHECK(total == 3);
        }
    }
}

TEST_CASE("fock propagation rejects sub-unitary circuits") {
    ModeSpace space = build_mode_space(2, false);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
    m(0, 0) = 0.5;
    LinearCircuit lossy(space, m);
    FockState in(space);
    in.add_term(occ(space, {{0, 1}}), 1.0);
    CHECK_THROWS_AS(propagate_fock(lossy, in), ConfigError);
}

TEST_CASE("photon cap") {
    ModeSpace space = build_mode_space(2, false);
    FockState s(space, 2);
    CHECK_THROWS_AS(s.add_term(occ(space, {{0, 3}}), 1.0), CapacityError);
}

TEST_CASE("click probabilities") {
    DetectorModel ideal{};
    CHECK(click_probability_coherent(0.0, ideal) == 0.0);
    CHECK(std::abs(click_probability_coherent(std::log(2.0), ideal) - 0.5) < 1e-12);
    DetectorModel dark{1.0, 0.01};
    CHECK(std::abs(click_probability_coherent(0.0, dark) - 0.01) < 1e-15);
    CHECK(click_probability_photons(0, ideal) == 0.0);
    CHECK(click_probability_photons(3, ideal) == 1.0);
    DetectorModel lossy{0.5, 0.0};
    CHECK(std::abs(click_probability_photons(2, lossy) - 0.75) < 1e-12);

    DetectorModel bad{1.5, 0.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("detection sampling edge cases and determinism") {
    Pcg32 rng(1, 2);
    auto none = sample_detection(std::vector<double>(6, 0.0), rng);
    for (int j = 0; j < 3; ++j) CHECK(none.clicks[static_cast<std::size_t>(j)] == 0);

    auto all = sample_detection(std::vector<double>(6, 1.0), rng);
    for (int j = 0; j < 3; ++j) CHECK(all.clicks[static_cast<std::size_t>(j)] == 3);

    std::vector<double> probs{0.3, 0.7, 0.5, 0.2, 0.9, 0.1};
    Pcg32 a = make_round_rng(42, 7);
    Pcg32 b = make_round_rng(42, 7);
    for (int i = 0; i < 50; ++i) CHECK(sample_detection(probs, a) == sample_detection(probs, b));

    Pcg32 c = make_round_rng(42, 8);
    bool any_difference = false;
    Pcg32 a2 = make_round_rng(42, 7);
    for (int i = 0; i < 50; ++i) {
        if (!(sample_detection(probs, a2) == sample_detection(probs, c))) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("embedding into a larger space") {
    ModeSpace small = build_mode_space(3, false);
    ModeSpace large = build_mode_space(3, true);
    FockState s(small);
    s.add_term(occ(small, {{0, 1}, {4, 1}}), 1.0);
    FockState big = s.embedded(large);
    Occupation expected(12, 0);
    expected[0] = 1;
    expected[4] = 1;
    CHECK(std::abs(big.amplitude(expected) - 1.0) < 1e-15);
}
