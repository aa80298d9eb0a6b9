#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace pottsgram {

// One symbol cell: sigma value in 1..K plus the terminal flag. A terminal
// cell a_k and a non-terminal cell A_k carry the same index k; the flag is
// the only difference.
struct SymbolCell {
    std::uint16_t index;
    bool terminal;

    bool operator==(const SymbolCell&) const = default;
};

// The system configuration: an ordered sequence of cells together with the
// set of positions that are still non-terminal (the rewritable sites).
class SentenceState {
public:
    SentenceState() = default;

    explicit SentenceState(std::vector<SymbolCell> cells) : cells_(std::move(cells)) {
        for (std::uint32_t i = 0; i < cells_.size(); ++i)
            if (!cells_[i].terminal) nt_positions_.push_back(i);
    }

    // A single non-terminal root cell.
    static SentenceState single(int root_index) {
        SentenceState s;
        s.cells_.push_back({static_cast<std::uint16_t>(root_index), false});
        s.nt_positions_.push_back(0);
        return s;
    }

    std::size_t size() const { return cells_.size(); }
    const SymbolCell& cell(std::size_t pos) const { return cells_[pos]; }
    const std::vector<SymbolCell>& cells() const { return cells_; }

    std::size_t nonterminal_count() const { return nt_positions_.size(); }

    // Position of the which-th non-terminal cell (arbitrary but stable
    // order; used for uniform site selection).
    std::size_t nonterminal_at(std::size_t which) const { return nt_positions_[which]; }

    void set_index(std::size_t pos, int k) {
        assert(!cells_[pos].terminal);
        cells_[pos].index = static_cast<std::uint16_t>(k);
    }

    void mark_terminal(std::size_t pos) {
        assert(!cells_[pos].terminal);
        cells_[pos].terminal = true;
        for (std::size_t i = 0; i < nt_positions_.size(); ++i) {
            if (nt_positions_[i] == pos) {
                nt_positions_[i] = nt_positions_.back();
                nt_positions_.pop_back();
                return;
            }
        }
        assert(false && "position was not registered as non-terminal");
    }

    // Replace the non-terminal cell at pos by two non-terminal cells (y, z).
    void branch(std::size_t pos, int y, int z) {
        assert(!cells_[pos].terminal);
        cells_[pos].index = static_cast<std::uint16_t>(y);
        cells_.insert(cells_.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                      {static_cast<std::uint16_t>(z), false});
        for (auto& p : nt_positions_)
            if (p > pos) ++p;
        nt_positions_.push_back(static_cast<std::uint32_t>(pos) + 1);
    }

    void append(const SymbolCell& c) {
        if (!c.terminal) nt_positions_.push_back(static_cast<std::uint32_t>(cells_.size()));
        cells_.push_back(c);
    }

    // Sorted non-terminal positions, for tests and invariant checks.
    std::vector<std::size_t> nonterminal_positions_sorted() const {
        std::vector<std::size_t> out(nt_positions_.begin(), nt_positions_.end());
        for (std::size_t i = 1; i < out.size(); ++i)
            for (std::size_t j = i; j > 0 && out[j - 1] > out[j]; --j)
                std::swap(out[j - 1], out[j]);
        return out;
    }

    bool operator==(const SentenceState& other) const { return cells_ == other.cells_; }

private:
    std::vector<SymbolCell> cells_;
    std::vector<std::uint32_t> nt_positions_;
};

}  // namespace pottsgram
