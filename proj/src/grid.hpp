#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace degenkit {

// One interval of the partition of [0, total]. The representative point is
// the interval midpoint and serves as the quadrature node.
struct Cell {
    double left = 0.0;
    double measure = 0.0;
    double representative = 0.0;
};

class Grid;
struct Refinement;
using GridPtr = std::shared_ptr<const Grid>;

// Immutable finite partition of [0, total] into contiguous cells of positive
// measure. Always handled through GridPtr so masks and functions can share it.
class Grid {
public:
    static GridPtr uniform(std::size_t n, double total = 1.0);
    // Contiguous cells starting at 0 with the given measures.
    static GridPtr from_measures(std::span<const double> measures);

    std::size_t size() const noexcept { return cells_.size(); }
    const Cell& cell(std::size_t i) const { return cells_.at(i); }
    std::span<const Cell> cells() const noexcept { return cells_; }
    // Cell measures in cell order; the quadrature weights.
    std::span<const double> weights() const noexcept { return weights_; }
    double total_measure() const noexcept { return total_; }

    // Same number of cells with identical boundaries.
    bool same_partition(const Grid& other) const noexcept;

private:
    friend Refinement refine_cells(const GridPtr& grid, std::span<const std::uint8_t> which);
    Grid(std::vector<Cell> cells, double total);

    std::vector<Cell> cells_;
    std::vector<double> weights_;
    double total_ = 0.0;
};

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept;

// Result of splitting cells: the fine grid plus, for every coarse cell i,
// the contiguous range [first_child[i], first_child[i+1]) of its children.
struct Refinement {
    GridPtr coarse;
    GridPtr fine;
    std::vector<std::size_t> first_child;

    std::size_t children_begin(std::size_t i) const { return first_child[i]; }
    std::size_t children_end(std::size_t i) const { return first_child[i + 1]; }
    // Coarse index of every fine cell.
    std::vector<std::size_t> parent_map() const;
};

// Splits every cell into two halves of equal measure.
Refinement refine(const GridPtr& grid);
// Splits only the cells with a nonzero flag; other cells map to themselves.
Refinement refine_cells(const GridPtr& grid, std::span<const std::uint8_t> which);
// Chains two refinements (first.fine must be second.coarse).
Refinement compose(const Refinement& first, const Refinement& second);
// Identity refinement of a grid onto itself.
Refinement identity_refinement(const GridPtr& grid);

// Measurable subset of the grid, realized as a union of cells.
class SubsetMask {
public:
    SubsetMask(GridPtr grid, std::vector<std::uint8_t> flags);

    static SubsetMask empty(const GridPtr& grid);
    static SubsetMask full(const GridPtr& grid);
    static SubsetMask single(const GridPtr& grid, std::size_t cell);
    // Cells whose representative lies in [lo, hi].
    static SubsetMask interval(const GridPtr& grid, double lo, double hi);

    const GridPtr& grid() const noexcept { return grid_; }
    std::span<const std::uint8_t> flags() const noexcept { return flags_; }
    bool contains(std::size_t i) const { return flags_.at(i) != 0; }
    std::size_t count() const noexcept;
    double measure() const noexcept;
    std::vector<std::size_t> members() const;

    SubsetMask complement() const;
    SubsetMask intersect(const SubsetMask& other) const;
    SubsetMask unite(const SubsetMask& other) const;
    bool disjoint_from(const SubsetMask& other) const;

    // Image of this mask on the fine grid of `ref`.
    SubsetMask transport(const Refinement& ref) const;

    bool operator==(const SubsetMask& other) const;

private:
    GridPtr grid_;
    std::vector<std::uint8_t> flags_;
};

struct EqualSplit {
    SubsetMask first;
    SubsetMask second;
    // Present when the grid had to be refined; both masks live on ref->fine.
    std::optional<Refinement> refinement;
};

// Divides a nonempty mask into two disjoint masks of equal measure. Uses whole
// cells when the members can be halved exactly, otherwise halves every member
// cell on a refined grid.
EqualSplit equal_split(const SubsetMask& mask);

}  // namespace degenkit
