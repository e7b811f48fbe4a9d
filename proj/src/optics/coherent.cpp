#include "ghznet/optics/coherent.hpp"

#include "ghznet/errors.hpp"

namespace ghznet::optics {

CoherentField CoherentField::vacuum(const ModeSpace& space) {
    return {space, Eigen::VectorXcd::Zero(space.dimension())};
}

CoherentField CoherentField::from_jones(const ModeSpace& space,
                                        const std::vector<Eigen::Vector2cd>& jones) {
    if (static_cast<int>(jones.size()) != space.n_parties()) {
        throw ConfigError("CoherentField::from_jones: need one Jones vector per party");
    }
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(space.dimension());
    for (int j = 0; j < space.n_parties(); ++j) {
        amps(space.signal_index(j, Polarization::H)) = jones[static_cast<std::size_t>(j)](0);
        amps(space.signal_index(j, Polarization::V)) = jones[static_cast<std::size_t>(j)](1);
    }
    return {space, std::move(amps)};
}

CoherentField propagate_coherent(const LinearCircuit& circuit, const CoherentField& field) {
    if (!(circuit.space() == field.space)) {
        throw ConfigError("propagate_coherent: circuit and field live on different mode spaces");
    }
    return {field.space, circuit.matrix() * field.amps};
}

} // namespace ghznet::optics
