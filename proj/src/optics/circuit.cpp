#include "ghznet/optics/circuit.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "ghznet/errors.hpp"

namespace ghznet::optics {

namespace {
constexpr double kSubUnitaryTol = 1e-12;
}

LinearCircuit::LinearCircuit(ModeSpace space, Eigen::MatrixXcd matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != space_.dimension() || matrix_.cols() != space_.dimension()) {
        throw ConfigError("LinearCircuit: matrix dimension does not match mode space");
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix_);
    if (svd.singularValues().size() > 0 &&
        svd.singularValues()(0) > 1.0 + kSubUnitaryTol) {
        throw ConfigError("LinearCircuit: matrix is not sub-unitary (max singular value " +
                          std::to_string(svd.singularValues()(0)) + ")");
    }
}

LinearCircuit LinearCircuit::identity(const ModeSpace& space) {
    return LinearCircuit(space, Eigen::MatrixXcd::Identity(space.dimension(), space.dimension()));
}

double LinearCircuit::max_singular_value() const {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix_);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

bool LinearCircuit::is_unitary(double tol) const {
    Eigen::MatrixXcd gram = matrix_.adjoint() * matrix_;
    gram -= Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    return gram.cwiseAbs().maxCoeff() <= tol;
}

LinearCircuit element_hwp(double theta, int party, const ModeSpace& space) {
    if (party < 0 || party >= space.n_parties()) {
        throw ConfigError("element_hwp: invalid party " + std::to_string(party));
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(space.dimension(), space.dimension());
    int h = space.index_of({party, Polarization::H, ModeKind::Signal});
    int v = space.index_of({party, Polarization::V, ModeKind::Signal});
    double c = std::cos(2.0 * theta);
    double s = std::sin(2.0 * theta);
    m(h, h) = c;
    m(h, v) = s;
    m(v, h) = s;
    m(v, v) = -c;
    return LinearCircuit(space, std::move(m));
}

LinearCircuit element_phase(double phi, const ModeId& mode, const ModeSpace& space) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(space.dimension(), space.dimension());
    int i = space.index_of(mode);
    m(i, i) = std::polar(1.0, phi);
    return LinearCircuit(space, std::move(m));
}

LinearCircuit element_attenuator(double eta, const ModeId& mode, const ModeId& ancilla,
                                 const ModeSpace& space) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw ConfigError("element_attenuator: eta must be in [0, 1], got " + std::to_string(eta));
    }
    if (ancilla.kind != ModeKind::LossAncilla) {
        throw ConfigError("element_attenuator: sink must be a loss-ancilla mode");
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(space.dimension(), space.dimension());
    int a = space.index_of(mode);
    int b = space.index_of(ancilla);
    double t = std::sqrt(eta);
    double r = std::sqrt(1.0 - eta);
    m(a, a) = t;
    m(b, a) = r;
    m(a, b) = -r;
    m(b, b) = t;
    return LinearCircuit(space, std::move(m));
}

LinearCircuit compose(const LinearCircuit& first, const LinearCircuit& second) {
    if (!(first.space() == second.space())) {
        throw ConfigError("compose: circuits live on different mode spaces");
    }
    return LinearCircuit(first.space(), second.matrix() * first.matrix());
}

} // namespace ghznet::optics
