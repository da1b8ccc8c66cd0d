#pragma once

// Geometric core: discrete matrices over a finite alphabet, sparse patterns
// with a pivot element, and the instantiation algebra that places patterns
// into matrix space and back.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace vouw {

using Symbol = std::uint32_t;

// --- Errors ---------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdjacencyViolation : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };
struct EmptyOverlay : Error { using Error::Error; };
struct OverlapError : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };
struct EmptyModel : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct InconsistentState : Error { using Error::Error; };
struct StaleCandidate : Error { using Error::Error; };
struct PlacementExhausted : Error { using Error::Error; };

struct ParseError : Error {
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
    std::size_t line_number;
};

// --- Basic coordinates ----------------------------------------------------

// Absolute grid position. Ordering is row-major (lexicographic).
struct RowCol {
    int row = 0;
    int col = 0;
    auto operator<=>(const RowCol&) const = default;
};

// Signed displacement between two positions, ordered lexicographically:
// (di, dj) < (di', dj') iff di < di' or (di == di' and dj < dj').
struct Offset {
    int di = 0;
    int dj = 0;
    auto operator<=>(const Offset&) const = default;
};

inline RowCol operator+(RowCol p, Offset d) { return {p.row + d.di, p.col + d.dj}; }
inline Offset operator-(RowCol a, RowCol b) { return {a.row - b.row, a.col - b.col}; }
inline Offset operator-(Offset d) { return {-d.di, -d.dj}; }

// --- Matrix -----------------------------------------------------------------

/// Dense M x N matrix of symbols drawn from a fixed alphabet [0, |S|).
/// Rows and columns are in a fixed ordering; immutable after construction.
class Matrix {
public:
    Matrix(int rows, int cols, int alphabet_size, std::vector<Symbol> cells)
        : rows_(rows), cols_(cols), alphabet_size_(alphabet_size), cells_(std::move(cells)) {
        if (rows_ < 1 || cols_ < 1)
            throw std::invalid_argument("Matrix: dimensions must be at least 1x1");
        if (alphabet_size_ < 1)
            throw std::invalid_argument("Matrix: alphabet must be non-empty");
        if (cells_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_))
            throw std::invalid_argument("Matrix: cell count does not match dimensions");
        for (Symbol s : cells_)
            if (s >= static_cast<Symbol>(alphabet_size_))
                throw std::invalid_argument("Matrix: symbol value outside alphabet");
    }

    static Matrix filled(int rows, int cols, int alphabet_size, Symbol value) {
        return Matrix(rows, cols, alphabet_size,
                      std::vector<Symbol>(static_cast<std::size_t>(rows) * cols, value));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int alphabet_size() const { return alphabet_size_; }
    std::int64_t cell_count() const { return static_cast<std::int64_t>(rows_) * cols_; }

    Symbol at(int i, int j) const { return cells_[static_cast<std::size_t>(i) * cols_ + j]; }
    std::span<const Symbol> cells() const { return cells_; }

    bool in_bounds(RowCol p) const {
        return p.row >= 0 && p.row < rows_ && p.col >= 0 && p.col < cols_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    int rows_, cols_, alphabet_size_;
    std::vector<Symbol> cells_;
};

// --- Pattern ----------------------------------------------------------------

struct PatternCell {
    int row = 0;
    int col = 0;
    Symbol symbol = 0;
    auto operator<=>(const PatternCell&) const = default;
};

/// Sparse submatrix: a set of cells inside a minimal bounding box. Every cell
/// is 8-adjacent to at least one other cell (singletons exempt), and no
/// bounding-box border row or column is empty. The pivot is the first cell in
/// row-major order. Equality covers geometry and symbols.
///
/// Construct through pattern_from_cells() or Pattern::singleton(); both
/// normalize translation and enforce the invariants.
class Pattern {
public:
    static Pattern singleton(Symbol s) { return Pattern(1, 1, {PatternCell{0, 0, s}}); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::int64_t bbox_area() const { return static_cast<std::int64_t>(rows_) * cols_; }
    std::int64_t cardinality() const { return static_cast<std::int64_t>(cells_.size()); }

    /// Cells sorted in row-major order; front() is the pivot.
    std::span<const PatternCell> cells() const { return cells_; }

    friend bool operator==(const Pattern&, const Pattern&) = default;
    // Fingerprint order: bounding box, then cell list (positions and symbols).
    friend auto operator<=>(const Pattern&, const Pattern&) = default;

private:
    Pattern(int rows, int cols, std::vector<PatternCell> cells)
        : rows_(rows), cols_(cols), cells_(std::move(cells)) {}

    friend Pattern pattern_from_cells(std::vector<PatternCell> cells);

    int rows_, cols_;
    std::vector<PatternCell> cells_;
};

namespace detail {

inline std::uint64_t pack_pos(int row, int col) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(row)) << 32) |
           static_cast<std::uint32_t>(col);
}

}  // namespace detail

/// Canonical pattern constructor. Shifts the cells so the minimal bounding box
/// starts at (0,0), then validates the pattern invariants.
///
/// Throws AdjacencyViolation if some cell has no 8-adjacent neighbour (only
/// possible for cardinality > 1), std::invalid_argument on empty input or
/// duplicate positions.
inline Pattern pattern_from_cells(std::vector<PatternCell> cells) {
    if (cells.empty())
        throw std::invalid_argument("pattern_from_cells: empty cell set");

    std::sort(cells.begin(), cells.end());
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i].row == cells[i - 1].row && cells[i].col == cells[i - 1].col)
            throw std::invalid_argument("pattern_from_cells: duplicate cell position");

    int min_row = cells.front().row, max_row = cells.front().row;
    int min_col = cells.front().col, max_col = cells.front().col;
    for (const PatternCell& c : cells) {
        min_row = std::min(min_row, c.row);
        max_row = std::max(max_row, c.row);
        min_col = std::min(min_col, c.col);
        max_col = std::max(max_col, c.col);
    }
    for (PatternCell& c : cells) {
        c.row -= min_row;
        c.col -= min_col;
    }

    if (cells.size() > 1) {
        std::unordered_set<std::uint64_t> occupied;
        occupied.reserve(cells.size() * 2);
        for (const PatternCell& c : cells) occupied.insert(detail::pack_pos(c.row, c.col));
        for (const PatternCell& c : cells) {
            bool has_neighbour = false;
            for (int dr = -1; dr <= 1 && !has_neighbour; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    if (occupied.count(detail::pack_pos(c.row + dr, c.col + dc))) {
                        has_neighbour = true;
                        break;
                    }
                }
            if (!has_neighbour)
                throw AdjacencyViolation("pattern cell (" + std::to_string(c.row) + "," +
                                         std::to_string(c.col) +
                                         ") has no 8-adjacent neighbour");
        }
    }

    return Pattern(max_row - min_row + 1, max_col - min_col + 1, std::move(cells));
}

/// First non-empty element in row-major order, in bounding-box coordinates.
inline RowCol pivot(const Pattern& p) {
    const PatternCell& c = p.cells().front();
    return {c.row, c.col};
}

// --- SparseOverlay ----------------------------------------------------------

struct OverlayEntry {
    int row = 0;
    int col = 0;
    Symbol symbol = 0;
    auto operator<=>(const OverlayEntry&) const = default;
};

/// A pattern instance projected onto full matrix coordinates: a sparse
/// M x N matrix holding only the occupied cells.
class SparseOverlay {
public:
    SparseOverlay(int rows, int cols, std::vector<OverlayEntry> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end());
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const OverlayEntry& e = entries_[i];
            if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_)
                throw OutOfBounds("overlay entry outside matrix bounds");
            if (i > 0 && e.row == entries_[i - 1].row && e.col == entries_[i - 1].col)
                throw std::invalid_argument("SparseOverlay: duplicate entry position");
        }
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::span<const OverlayEntry> entries() const { return entries_; }
    std::int64_t cardinality() const { return static_cast<std::int64_t>(entries_.size()); }

    friend bool operator==(const SparseOverlay&, const SparseOverlay&) = default;

private:
    int rows_, cols_;
    std::vector<OverlayEntry> entries_;
};

// --- Operations --------------------------------------------------------------

/// Place p so that its pivot lands at `at`, preserving all relative distances.
/// Throws OutOfBounds if any element would fall outside [0,rows) x [0,cols).
inline SparseOverlay instantiate(const Pattern& p, RowCol at, int rows, int cols) {
    const RowCol pv = pivot(p);
    std::vector<OverlayEntry> entries;
    entries.reserve(p.cells().size());
    for (const PatternCell& c : p.cells()) {
        const int r = at.row + (c.row - pv.row);
        const int j = at.col + (c.col - pv.col);
        if (r < 0 || r >= rows || j < 0 || j >= cols)
            throw OutOfBounds("instance element (" + std::to_string(r) + "," +
                              std::to_string(j) + ") outside matrix");
        entries.push_back({r, j, c.symbol});
    }
    return SparseOverlay(rows, cols, std::move(entries));
}

/// Inverse of instantiate: strip all empty rows/columns. Returns the pattern
/// plus the absolute position of its pivot.
inline std::pair<Pattern, Offset> deinstantiate(const SparseOverlay& o) {
    if (o.entries().empty())
        throw EmptyOverlay("deinstantiate: overlay has no entries");
    std::vector<PatternCell> cells;
    cells.reserve(o.entries().size());
    for (const OverlayEntry& e : o.entries()) cells.push_back({e.row, e.col, e.symbol});
    // Entries are sorted row-major, so the first one is the pivot.
    const OverlayEntry& first = o.entries().front();
    return {pattern_from_cells(std::move(cells)), Offset{first.row, first.col}};
}

/// Element-wise sum of two overlays. Fails with OverlapError if any position
/// occurs in both; on success the cardinality is |a| + |b|.
inline SparseOverlay superpose(const SparseOverlay& a, const SparseOverlay& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimMismatch("superpose: overlay dimensions differ");
    std::vector<OverlayEntry> merged;
    merged.reserve(a.entries().size() + b.entries().size());
    merged.insert(merged.end(), a.entries().begin(), a.entries().end());
    merged.insert(merged.end(), b.entries().begin(), b.entries().end());
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 1; i < merged.size(); ++i)
        if (merged[i].row == merged[i - 1].row && merged[i].col == merged[i - 1].col)
            throw OverlapError("superpose: overlapping entry at (" +
                               std::to_string(merged[i].row) + "," +
                               std::to_string(merged[i].col) + ")");
    return SparseOverlay(a.rows(), a.cols(), std::move(merged));
}

/// Union of x at the origin and y displaced by the pivot-to-pivot offset
/// delta. When delta is lexicographically positive the result pivots on x's
/// pivot element. Throws OverlapError on colliding cells and
/// AdjacencyViolation when the union is not a valid pattern.
inline Pattern union_pattern(const Pattern& x, const Pattern& y, Offset delta) {
    const RowCol px = pivot(x), py = pivot(y);
    std::vector<PatternCell> cells;
    cells.reserve(x.cells().size() + y.cells().size());
    for (const PatternCell& c : x.cells())
        cells.push_back({c.row - px.row, c.col - px.col, c.symbol});
    for (const PatternCell& c : y.cells())
        cells.push_back({delta.di + c.row - py.row, delta.dj + c.col - py.col, c.symbol});

    std::vector<PatternCell> sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].row == sorted[i - 1].row && sorted[i].col == sorted[i - 1].col)
            throw OverlapError("union_pattern: patterns collide at relative (" +
                               std::to_string(sorted[i].row) + "," +
                               std::to_string(sorted[i].col) + ")");

    return pattern_from_cells(std::move(sorted));
}

}  // namespace vouw
