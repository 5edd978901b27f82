#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "error.hpp"

namespace degenkit {

Grid::Grid(std::vector<Cell> cells, double total) : cells_(std::move(cells)), total_(total) {
    require(!cells_.empty(), "grid needs at least one cell");
    require(std::isfinite(total_) && total_ > 0.0, "grid total measure must be positive");
    weights_.reserve(cells_.size());
    double sum = 0.0;
    for (const auto& c : cells_) {
        require(c.measure > 0.0 && std::isfinite(c.measure), "cell measure must be positive");
        weights_.push_back(c.measure);
        sum += c.measure;
    }
    require(std::abs(sum - total_) <= 1e-12 * total_, "cell measures do not sum to total measure");
}

GridPtr Grid::uniform(std::size_t n, double total) {
    require(n >= 1, "uniform grid needs n >= 1");
    require(std::isfinite(total) && total > 0.0, "uniform grid needs total > 0");
    const double h = total / static_cast<double>(n);
    std::vector<Cell> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        cells[i].left = total * static_cast<double>(i) / static_cast<double>(n);
        cells[i].measure = h;
        cells[i].representative = cells[i].left + 0.5 * h;
    }
    return GridPtr(new Grid(std::move(cells), total));
}

GridPtr Grid::from_measures(std::span<const double> measures) {
    require(!measures.empty(), "grid needs at least one cell");
    std::vector<Cell> cells(measures.size());
    double left = 0.0;
    for (std::size_t i = 0; i < measures.size(); ++i) {
        require(measures[i] > 0.0 && std::isfinite(measures[i]), "cell measure must be positive");
        cells[i] = Cell{left, measures[i], left + 0.5 * measures[i]};
        left += measures[i];
    }
    return GridPtr(new Grid(std::move(cells), left));
}

bool Grid::same_partition(const Grid& other) const noexcept {
    if (cells_.size() != other.cells_.size() || total_ != other.total_) return false;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].left != other.cells_[i].left || cells_[i].measure != other.cells_[i].measure) {
            return false;
        }
    }
    return true;
}

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept {
    if (!a || !b) return false;
    return a.get() == b.get() || a->same_partition(*b);
}

std::vector<std::size_t> Refinement::parent_map() const {
    std::vector<std::size_t> parent(fine->size());
    for (std::size_t i = 0; i + 1 < first_child.size(); ++i) {
        for (std::size_t c = first_child[i]; c < first_child[i + 1]; ++c) parent[c] = i;
    }
    return parent;
}

Refinement refine_cells(const GridPtr& grid, std::span<const std::uint8_t> which) {
    require(grid != nullptr, "refine: null grid");
    require(which.size() == grid->size(), "refine: flag count does not match cell count");
    std::vector<Cell> cells;
    cells.reserve(grid->size() * 2);
    std::vector<std::size_t> first(grid->size() + 1);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        first[i] = cells.size();
        const Cell& c = grid->cell(i);
        if (which[i]) {
            const double half = 0.5 * c.measure;
            cells.push_back(Cell{c.left, half, c.left + 0.5 * half});
            cells.push_back(Cell{c.left + half, half, c.left + 1.5 * half});
        } else {
            cells.push_back(c);
        }
    }
    first[grid->size()] = cells.size();
    // total is carried over exactly; halving in binary floating point is exact
    auto fine = GridPtr(new Grid(std::move(cells), grid->total_measure()));
    return Refinement{grid, std::move(fine), std::move(first)};
}

Refinement refine(const GridPtr& grid) {
    require(grid != nullptr, "refine: null grid");
    std::vector<std::uint8_t> all(grid->size(), 1);
    return refine_cells(grid, all);
}

Refinement identity_refinement(const GridPtr& grid) {
    std::vector<std::size_t> first(grid->size() + 1);
    std::iota(first.begin(), first.end(), std::size_t{0});
    return Refinement{grid, grid, std::move(first)};
}

Refinement compose(const Refinement& a, const Refinement& b) {
    require(same_grid(a.fine, b.coarse), "compose: refinements do not chain");
    std::vector<std::size_t> first(a.coarse->size() + 1);
    for (std::size_t i = 0; i <= a.coarse->size(); ++i) {
        const std::size_t mid = a.first_child[i];
        first[i] = mid < b.first_child.size() ? b.first_child[mid] : b.fine->size();
    }
    return Refinement{a.coarse, b.fine, std::move(first)};
}

SubsetMask::SubsetMask(GridPtr grid, std::vector<std::uint8_t> flags)
    : grid_(std::move(grid)), flags_(std::move(flags)) {
    require(grid_ != nullptr, "mask: null grid");
    require(flags_.size() == grid_->size(), "mask: flag count does not match cell count");
    for (auto& f : flags_) f = f ? 1 : 0;
}

SubsetMask SubsetMask::empty(const GridPtr& grid) {
    return SubsetMask(grid, std::vector<std::uint8_t>(grid->size(), 0));
}

SubsetMask SubsetMask::full(const GridPtr& grid) {
    return SubsetMask(grid, std::vector<std::uint8_t>(grid->size(), 1));
}

SubsetMask SubsetMask::single(const GridPtr& grid, std::size_t cell) {
    require(cell < grid->size(), "mask: cell index out of range");
    std::vector<std::uint8_t> f(grid->size(), 0);
    f[cell] = 1;
    return SubsetMask(grid, std::move(f));
}

SubsetMask SubsetMask::interval(const GridPtr& grid, double lo, double hi) {
    std::vector<std::uint8_t> f(grid->size(), 0);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->cell(i).representative;
        f[i] = (r >= lo && r <= hi) ? 1 : 0;
    }
    return SubsetMask(grid, std::move(f));
}

std::size_t SubsetMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

double SubsetMask::measure() const noexcept {
    double m = 0.0;
    const auto w = grid_->weights();
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i]) m += w[i];
    }
    return m;
}

std::vector<std::size_t> SubsetMask::members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i]) out.push_back(i);
    }
    return out;
}

SubsetMask SubsetMask::complement() const {
    std::vector<std::uint8_t> f(flags_.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = flags_[i] ? 0 : 1;
    return SubsetMask(grid_, std::move(f));
}

SubsetMask SubsetMask::intersect(const SubsetMask& other) const {
    if (!same_grid(grid_, other.grid_)) fail(ErrorKind::GridMismatch, "mask intersection on different grids");
    std::vector<std::uint8_t> f(flags_.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = flags_[i] & other.flags_[i];
    return SubsetMask(grid_, std::move(f));
}

SubsetMask SubsetMask::unite(const SubsetMask& other) const {
    if (!same_grid(grid_, other.grid_)) fail(ErrorKind::GridMismatch, "mask union on different grids");
    std::vector<std::uint8_t> f(flags_.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = flags_[i] | other.flags_[i];
    return SubsetMask(grid_, std::move(f));
}

bool SubsetMask::disjoint_from(const SubsetMask& other) const {
    if (!same_grid(grid_, other.grid_)) fail(ErrorKind::GridMismatch, "mask comparison on different grids");
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i] && other.flags_[i]) return false;
    }
    return true;
}

SubsetMask SubsetMask::transport(const Refinement& ref) const {
    if (!same_grid(grid_, ref.coarse)) fail(ErrorKind::GridMismatch, "mask transport: refinement starts on another grid");
    std::vector<std::uint8_t> f(ref.fine->size(), 0);
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (!flags_[i]) continue;
        for (std::size_t c = ref.children_begin(i); c < ref.children_end(i); ++c) f[c] = 1;
    }
    return SubsetMask(ref.fine, std::move(f));
}

bool SubsetMask::operator==(const SubsetMask& other) const {
    return same_grid(grid_, other.grid_) && flags_ == other.flags_;
}

EqualSplit equal_split(const SubsetMask& mask) {
    const auto members = mask.members();
    require(!members.empty(), "equal_split: empty mask");
    const auto w = mask.grid()->weights();

    if (members.size() % 2 == 0) {
        const double ref = w[members.front()];
        const bool uniform = std::all_of(members.begin(), members.end(), [&](std::size_t i) {
            return std::abs(w[i] - ref) <= 1e-15 * ref;
        });
        if (uniform) {
            std::vector<std::uint8_t> a(w.size(), 0), b(w.size(), 0);
            const std::size_t half = members.size() / 2;
            for (std::size_t k = 0; k < members.size(); ++k) (k < half ? a : b)[members[k]] = 1;
            return EqualSplit{SubsetMask(mask.grid(), std::move(a)), SubsetMask(mask.grid(), std::move(b)),
                              std::nullopt};
        }
    }

    // Odd count or unequal cells: halve every member and deal the children out.
    Refinement ref = refine_cells(mask.grid(), mask.flags());
    std::vector<std::uint8_t> a(ref.fine->size(), 0), b(ref.fine->size(), 0);
    for (std::size_t i : members) {
        a[ref.children_begin(i)] = 1;
        b[ref.children_begin(i) + 1] = 1;
    }
    SubsetMask first(ref.fine, std::move(a));
    SubsetMask second(ref.fine, std::move(b));
    return EqualSplit{std::move(first), std::move(second), std::move(ref)};
}

}  // namespace degenkit
