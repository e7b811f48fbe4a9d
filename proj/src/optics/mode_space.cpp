#include "ghznet/optics/mode_space.hpp"

#include "ghznet/errors.hpp"

namespace ghznet::optics {

namespace {

ModeSpace make(int n_parties, bool ancillas) {
    if (n_parties < 2) {
        throw ConfigError("build_mode_space: n_parties must be >= 2, got " +
                          std::to_string(n_parties));
    }
    ModeSpace space;
    std::vector<ModeId> modes;
    modes.reserve(static_cast<std::size_t>((ancillas ? 4 : 2) * n_parties));
    for (int j = 0; j < n_parties; ++j) {
        modes.push_back({j, Polarization::H, ModeKind::Signal});
        modes.push_back({j, Polarization::V, ModeKind::Signal});
    }
    if (ancillas) {
        for (int j = 0; j < n_parties; ++j) {
            modes.push_back({j, Polarization::H, ModeKind::LossAncilla});
            modes.push_back({j, Polarization::V, ModeKind::LossAncilla});
        }
    }
    return ModeSpace::from_modes(std::move(modes), n_parties);
}

} // namespace

ModeSpace ModeSpace::from_modes(std::vector<ModeId> modes, int n_parties) {
    ModeSpace s;
    s.modes_ = std::move(modes);
    s.n_parties_ = n_parties;
    return s;
}

ModeSpace ModeSpace::signals(int n_parties) { return make(n_parties, false); }

ModeSpace ModeSpace::with_loss_ancillas(int n_parties) { return make(n_parties, true); }

int ModeSpace::index_of(const ModeId& id) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i] == id) return static_cast<int>(i);
    }
    throw ConfigError("ModeSpace: mode not present (party " + std::to_string(id.party) + ")");
}

ModeSpace build_mode_space(int n_parties, bool with_loss_ancillas) {
    return with_loss_ancillas ? ModeSpace::with_loss_ancillas(n_parties)
                              : ModeSpace::signals(n_parties);
}

} // namespace ghznet::optics
