#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace ghznet::optics {

enum class Polarization : std::uint8_t { H = 0, V = 1 };

/// H carries logical 0, V carries logical 1.
inline int logical_bit(Polarization p) { return p == Polarization::V ? 1 : 0; }

enum class ModeKind : std::uint8_t { Signal = 0, LossAncilla = 1 };

/// One optical mode: which party, which polarization rail, and whether it is
/// a physical signal mode or the vacuum ancilla that absorbs loss from the
/// corresponding segment.
struct ModeId {
    int party = 0;
    Polarization pol = Polarization::H;
    ModeKind kind = ModeKind::Signal;

    friend auto operator<=>(const ModeId&, const ModeId&) = default;
};

/// Ordered set of modes defining the circuit's coordinate system.
/// Signal modes come first, ordered (party0 H, party0 V, party1 H, ...),
/// followed by loss ancillas in the same ordering.
class ModeSpace {
public:
    ModeSpace() = default;

    static ModeSpace signals(int n_parties);
    static ModeSpace with_loss_ancillas(int n_parties);
    static ModeSpace from_modes(std::vector<ModeId> modes, int n_parties);

    int dimension() const { return static_cast<int>(modes_.size()); }
    int n_parties() const { return n_parties_; }
    int n_signal() const { return 2 * n_parties_; }
    bool has_ancillas() const { return dimension() > n_signal(); }

    const ModeId& mode(int index) const { return modes_[static_cast<std::size_t>(index)]; }
    const std::vector<ModeId>& modes() const { return modes_; }

    /// Index of a mode; throws ConfigError if the mode is not in this space.
    int index_of(const ModeId& id) const;

    int signal_index(int party, Polarization pol) const { return 2 * party + (pol == Polarization::V ? 1 : 0); }

    friend bool operator==(const ModeSpace& a, const ModeSpace& b) {
        return a.modes_ == b.modes_;
    }

private:
    std::vector<ModeId> modes_;
    int n_parties_ = 0;
};

/// Signal modes for n parties, plus one loss ancilla per lossy segment when
/// flagged (each party contributes an H delay segment and a V channel
/// segment, so there are 2n ancillas).
ModeSpace build_mode_space(int n_parties, bool with_loss_ancillas);

} // namespace ghznet::optics
