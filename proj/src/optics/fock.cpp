#include "ghznet/optics/fock.hpp"

#include <cmath>
#include <numeric>

#include "ghznet/errors.hpp"

namespace ghznet::optics {

namespace {

int total_photons(const Occupation& occ) {
    return std::accumulate(occ.begin(), occ.end(), 0);
}

double sqrt_factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= static_cast<double>(k);
    return std::sqrt(f);
}

} // namespace

FockState::FockState(ModeSpace space, int photon_cap)
    : space_(std::move(space)), photon_cap_(photon_cap) {
    if (photon_cap_ < 0) throw ConfigError("FockState: photon cap must be >= 0");
}

FockState FockState::vacuum(const ModeSpace& space, int photon_cap) {
    FockState s(space, photon_cap);
    s.add_term(Occupation(static_cast<std::size_t>(space.dimension()), 0), 1.0);
    return s;
}

FockState FockState::single_photon_product(const ModeSpace& space,
                                           const std::vector<Eigen::Vector2cd>& jones,
                                           int photon_cap) {
    if (static_cast<int>(jones.size()) != space.n_parties()) {
        throw ConfigError("single_photon_product: need one Jones vector per party");
    }
    const std::size_t dim = static_cast<std::size_t>(space.dimension());
    std::map<Occupation, std::complex<double>> terms;
    terms.emplace(Occupation(dim, 0), std::complex<double>(1.0));
    for (int j = 0; j < space.n_parties(); ++j) {
        const int h = space.signal_index(j, Polarization::H);
        const int v = space.signal_index(j, Polarization::V);
        std::map<Occupation, std::complex<double>> next;
        for (const auto& [occ, amp] : terms) {
            if (jones[static_cast<std::size_t>(j)](0) != 0.0) {
                Occupation o = occ;
                o[static_cast<std::size_t>(h)] += 1;
                next[o] += amp * jones[static_cast<std::size_t>(j)](0);
            }
            if (jones[static_cast<std::size_t>(j)](1) != 0.0) {
                Occupation o = occ;
                o[static_cast<std::size_t>(v)] += 1;
                next[o] += amp * jones[static_cast<std::size_t>(j)](1);
            }
        }
        terms = std::move(next);
    }
    FockState s(space, photon_cap);
    for (const auto& [occ, amp] : terms) {
        if (amp != 0.0) s.add_term(occ, amp);
    }
    return s;
}

void FockState::add_term(const Occupation& occ, std::complex<double> amplitude) {
    if (static_cast<int>(occ.size()) != space_.dimension()) {
        throw ConfigError("FockState: occupation length does not match mode space");
    }
    if (total_photons(occ) > photon_cap_) {
        throw CapacityError("FockState: occupation exceeds photon cap of " +
                            std::to_string(photon_cap_));
    }
    terms_[occ] += amplitude;
}

std::complex<double> FockState::amplitude(const Occupation& occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? std::complex<double>(0.0) : it->second;
}

double FockState::norm() const {
    double n2 = 0.0;
    for (const auto& [occ, amp] : terms_) n2 += std::norm(amp);
    return std::sqrt(n2);
}

void FockState::normalize() {
    double n = norm();
    if (n == 0.0) throw ConfigError("FockState: cannot normalize the zero state");
    for (auto& [occ, amp] : terms_) amp /= n;
}

FockState FockState::embedded(const ModeSpace& larger) const {
    std::vector<int> target(static_cast<std::size_t>(space_.dimension()));
    for (int i = 0; i < space_.dimension(); ++i) {
        target[static_cast<std::size_t>(i)] = larger.index_of(space_.mode(i));
    }
    FockState out(larger, photon_cap_);
    for (const auto& [occ, amp] : terms_) {
        Occupation big(static_cast<std::size_t>(larger.dimension()), 0);
        for (int i = 0; i < space_.dimension(); ++i) {
            big[static_cast<std::size_t>(target[static_cast<std::size_t>(i)])] =
                occ[static_cast<std::size_t>(i)];
        }
        out.add_term(big, amp);
    }
    return out;
}

FockState propagate_fock(const LinearCircuit& circuit, const FockState& state) {
    if (!(circuit.space() == state.space())) {
        throw ConfigError("propagate_fock: circuit and state live on different mode spaces");
    }
    if (!circuit.is_unitary(1e-9)) {
        throw ConfigError("propagate_fock: circuit must be unitary on the full "
                          "(signal + ancilla) space; model loss by dilation");
    }
    const Eigen::MatrixXcd& u = circuit.matrix();
    const int dim = circuit.dimension();

    // Work with operator monomials prod_m (a^dag_m)^{k_m}: the ket |n> equals
    // its monomial divided by prod sqrt(n_m!), each input operator maps to
    // sum_m' U(m',m) a^dag_m', and the output amplitude of |k> is the
    // collected monomial coefficient times prod sqrt(k_m!).
    std::map<Occupation, std::complex<double>> monomials;
    for (const auto& [occ, amp] : state.terms()) {
        std::complex<double> c0 = amp;
        for (int m = 0; m < dim; ++m) c0 /= sqrt_factorial(occ[static_cast<std::size_t>(m)]);
        std::map<Occupation, std::complex<double>> poly;
        poly.emplace(Occupation(static_cast<std::size_t>(dim), 0), c0);
        for (int m = 0; m < dim; ++m) {
            for (int rep = 0; rep < occ[static_cast<std::size_t>(m)]; ++rep) {
                std::map<Occupation, std::complex<double>> next;
                for (const auto& [k, c] : poly) {
                    for (int mp = 0; mp < dim; ++mp) {
                        const std::complex<double> w = u(mp, m);
                        if (w == 0.0) continue;
                        Occupation k2 = k;
                        k2[static_cast<std::size_t>(mp)] += 1;
                        next[k2] += c * w;
                    }
                }
                poly = std::move(next);
            }
        }
        for (const auto& [k, c] : poly) monomials[k] += c;
    }

    FockState out(state.space(), state.photon_cap());
    for (const auto& [k, c] : monomials) {
        std::complex<double> a = c;
        for (int m = 0; m < dim; ++m) a *= sqrt_factorial(k[static_cast<std::size_t>(m)]);
        if (a != 0.0) out.add_term(k, a);
    }
    return out;
}

} // namespace ghznet::optics
