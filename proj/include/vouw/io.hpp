#pragma once

// Text file formats for matrices, ground-truth masks, and mined pattern
// sets. All formats are line-oriented so they diff cleanly; parse errors
// carry the offending line number.

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "grid.hpp"
#include "miner.hpp"

namespace vouw {

// --- In-memory representations ------------------------------------------------

struct MaskFile {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> mask;

    friend bool operator==(const MaskFile&, const MaskFile&) = default;
};

struct PatternSetEntry {
    Pattern pattern;
    std::int64_t usage = 0;

    friend bool operator==(const PatternSetEntry&, const PatternSetEntry&) = default;
};

struct PatternInstance {
    int row = 0;
    int col = 0;
    int pattern_index = 0;  // 0-based index into `patterns`

    friend bool operator==(const PatternInstance&, const PatternInstance&) = default;
};

/// Model plus instantiation in serializable form. A set written from a
/// mining state reconstructs its source matrix exactly.
struct PatternSet {
    std::vector<PatternSetEntry> patterns;
    std::vector<PatternInstance> instances;

    friend bool operator==(const PatternSet&, const PatternSet&) = default;
};

inline PatternSet pattern_set_from_state(const MiningState& s) {
    PatternSet set;
    std::vector<int> index_of(s.pool.size(), -1);
    for (PatternId id : s.model_ids()) {
        index_of[static_cast<std::size_t>(id)] = static_cast<int>(set.patterns.size());
        set.patterns.push_back({s.pool[id], s.usage_of(id)});
    }
    for (std::int32_t p = 0; p < static_cast<std::int32_t>(s.inst.size()); ++p) {
        const PatternId id = s.inst[static_cast<std::size_t>(p)];
        if (id == kNoPattern) continue;
        const RowCol at = s.position(p);
        set.instances.push_back({at.row, at.col, index_of[static_cast<std::size_t>(id)]});
    }
    return set;
}

/// Rebuild the dense matrix described by a pattern set. Dimensions are
/// inferred from the covered cells; the alphabet defaults to the smallest one
/// containing every symbol unless a larger hint is given. Throws on
/// overlapping or missing cells.
inline Matrix reconstruct(const PatternSet& set, int alphabet_size_hint = 0) {
    int rows = 0, cols = 0;
    Symbol max_symbol = 0;
    struct Cell {
        int row, col;
        Symbol symbol;
    };
    std::vector<Cell> cells;
    for (const PatternInstance& inst : set.instances) {
        if (inst.pattern_index < 0 ||
            inst.pattern_index >= static_cast<int>(set.patterns.size()))
            throw Error("reconstruct: instance references unknown pattern");
        const Pattern& p = set.patterns[static_cast<std::size_t>(inst.pattern_index)].pattern;
        const RowCol pv = pivot(p);
        for (const PatternCell& c : p.cells()) {
            const int r = inst.row + c.row - pv.row;
            const int j = inst.col + c.col - pv.col;
            if (r < 0 || j < 0) throw Error("reconstruct: instance leaves the matrix");
            rows = std::max(rows, r + 1);
            cols = std::max(cols, j + 1);
            max_symbol = std::max(max_symbol, c.symbol);
            cells.push_back({r, j, c.symbol});
        }
    }
    if (cells.empty()) throw Error("reconstruct: pattern set has no instances");

    const int alphabet =
        std::max(alphabet_size_hint, static_cast<int>(max_symbol) + 1);
    std::vector<Symbol> dense(static_cast<std::size_t>(rows) * cols, 0);
    std::vector<std::uint8_t> written(dense.size(), 0);
    for (const Cell& c : cells) {
        const std::size_t idx = static_cast<std::size_t>(c.row) * cols + c.col;
        if (written[idx]) throw Error("reconstruct: overlapping instances");
        written[idx] = 1;
        dense[idx] = c.symbol;
    }
    for (std::uint8_t w : written)
        if (!w) throw Error("reconstruct: uncovered cell");
    return Matrix(rows, cols, alphabet, std::move(dense));
}

// --- Line-oriented readers ------------------------------------------------------

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::size_t line_number() const { return line_; }

    std::string next_line() {
        std::string line;
        if (!std::getline(in_, line))
            throw ParseError(line_ + 1, "unexpected end of file");
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    /// Parse exactly `count` whitespace-separated integers from the next line.
    std::vector<std::int64_t> next_ints(std::size_t count, const char* what) {
        const std::string line = next_line();
        std::istringstream ss(line);
        std::vector<std::int64_t> values(count);
        for (std::size_t i = 0; i < count; ++i)
            if (!(ss >> values[i]))
                throw ParseError(line_, std::string("expected ") + what);
        std::string rest;
        if (ss >> rest) throw ParseError(line_, std::string("trailing data after ") + what);
        return values;
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

inline void expect_tag(LineReader& reader, std::istringstream& ss, const char* tag) {
    std::string found;
    if (!(ss >> found) || found != tag)
        throw ParseError(reader.line_number(), std::string("expected '") + tag + "' header");
}

}  // namespace detail

// --- Matrix format ---------------------------------------------------------------
//
//   VOUW-MATRIX <M> <N> <|S|>
//   followed by M lines of N space-separated symbol values.

inline void write_matrix(std::ostream& out, const Matrix& m) {
    out << "VOUW-MATRIX " << m.rows() << ' ' << m.cols() << ' ' << m.alphabet_size()
        << '\n';
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << m.at(i, j);
        }
        out << '\n';
    }
}

inline Matrix read_matrix(std::istream& in) {
    detail::LineReader reader(in);
    std::istringstream header(reader.next_line());
    detail::expect_tag(reader, header, "VOUW-MATRIX");
    std::int64_t rows, cols, alphabet;
    if (!(header >> rows >> cols >> alphabet))
        throw ParseError(reader.line_number(), "expected '<M> <N> <|S|>' after header tag");
    if (rows < 1 || cols < 1 || alphabet < 1)
        throw ParseError(reader.line_number(), "matrix dimensions and alphabet must be positive");

    std::vector<Symbol> cells;
    cells.reserve(static_cast<std::size_t>(rows * cols));
    for (std::int64_t i = 0; i < rows; ++i) {
        const auto values =
            reader.next_ints(static_cast<std::size_t>(cols), "a row of symbol values");
        for (std::int64_t v : values) {
            if (v < 0 || v >= alphabet)
                throw ParseError(reader.line_number(), "symbol value outside alphabet");
            cells.push_back(static_cast<Symbol>(v));
        }
    }
    return Matrix(static_cast<int>(rows), static_cast<int>(cols),
                  static_cast<int>(alphabet), std::move(cells));
}

// --- Mask format -----------------------------------------------------------------
//
//   VOUW-MASK <M> <N>
//   followed by M lines of N space-separated 0/1 flags.

inline void write_mask(std::ostream& out, int rows, int cols,
                       std::span<const std::uint8_t> mask) {
    out << "VOUW-MASK " << rows << ' ' << cols << '\n';
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (j) out << ' ';
            out << (mask[static_cast<std::size_t>(i) * cols + j] ? 1 : 0);
        }
        out << '\n';
    }
}

inline MaskFile read_mask(std::istream& in) {
    detail::LineReader reader(in);
    std::istringstream header(reader.next_line());
    detail::expect_tag(reader, header, "VOUW-MASK");
    std::int64_t rows, cols;
    if (!(header >> rows >> cols))
        throw ParseError(reader.line_number(), "expected '<M> <N>' after header tag");
    if (rows < 1 || cols < 1)
        throw ParseError(reader.line_number(), "mask dimensions must be positive");

    MaskFile mask;
    mask.rows = static_cast<int>(rows);
    mask.cols = static_cast<int>(cols);
    mask.mask.reserve(static_cast<std::size_t>(rows * cols));
    for (std::int64_t i = 0; i < rows; ++i) {
        const auto values = reader.next_ints(static_cast<std::size_t>(cols), "a mask row");
        for (std::int64_t v : values) {
            if (v != 0 && v != 1)
                throw ParseError(reader.line_number(), "mask values must be 0 or 1");
            mask.mask.push_back(static_cast<std::uint8_t>(v));
        }
    }
    return mask;
}

// --- Pattern set format ------------------------------------------------------------
//
//   VOUW-PATTERNS <count>
//   per pattern:  P <M_X> <N_X> <|X|> <usage>
//                 |X| lines of <row> <col> <symbol>
//   then:         I <count>
//                 count lines of <i> <j> <pattern-index>

inline void write_pattern_set(std::ostream& out, const PatternSet& set) {
    out << "VOUW-PATTERNS " << set.patterns.size() << '\n';
    for (const PatternSetEntry& e : set.patterns) {
        out << "P " << e.pattern.rows() << ' ' << e.pattern.cols() << ' '
            << e.pattern.cardinality() << ' ' << e.usage << '\n';
        for (const PatternCell& c : e.pattern.cells())
            out << c.row << ' ' << c.col << ' ' << c.symbol << '\n';
    }
    out << "I " << set.instances.size() << '\n';
    for (const PatternInstance& inst : set.instances)
        out << inst.row << ' ' << inst.col << ' ' << inst.pattern_index << '\n';
}

inline PatternSet read_pattern_set(std::istream& in) {
    detail::LineReader reader(in);
    std::istringstream header(reader.next_line());
    detail::expect_tag(reader, header, "VOUW-PATTERNS");
    std::int64_t count;
    if (!(header >> count) || count < 0)
        throw ParseError(reader.line_number(), "expected pattern count after header tag");

    PatternSet set;
    for (std::int64_t k = 0; k < count; ++k) {
        std::istringstream p_header(reader.next_line());
        detail::expect_tag(reader, p_header, "P");
        std::int64_t rows, cols, card, usage;
        if (!(p_header >> rows >> cols >> card >> usage))
            throw ParseError(reader.line_number(),
                             "expected 'P <M_X> <N_X> <|X|> <usage>'");
        if (card < 1 || usage < 1)
            throw ParseError(reader.line_number(),
                             "pattern cardinality and usage must be positive");
        std::vector<PatternCell> cells;
        cells.reserve(static_cast<std::size_t>(card));
        for (std::int64_t c = 0; c < card; ++c) {
            const auto v = reader.next_ints(3, "'<row> <col> <symbol>'");
            if (v[0] < 0 || v[0] >= rows || v[1] < 0 || v[1] >= cols)
                throw ParseError(reader.line_number(), "pattern cell outside bounding box");
            if (v[2] < 0)
                throw ParseError(reader.line_number(), "symbol must be non-negative");
            cells.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]),
                             static_cast<Symbol>(v[2])});
        }
        Pattern pattern = [&] {
            try {
                return pattern_from_cells(std::move(cells));
            } catch (const std::exception& e) {
                throw ParseError(reader.line_number(),
                                 std::string("invalid pattern: ") + e.what());
            }
        }();
        if (pattern.rows() != rows || pattern.cols() != cols)
            throw ParseError(reader.line_number(),
                             "pattern bounding box does not match its cells");
        set.patterns.push_back({std::move(pattern), usage});
    }

    std::istringstream i_header(reader.next_line());
    detail::expect_tag(reader, i_header, "I");
    std::int64_t instances;
    if (!(i_header >> instances) || instances < 0)
        throw ParseError(reader.line_number(), "expected instance count after 'I'");
    for (std::int64_t k = 0; k < instances; ++k) {
        const auto v = reader.next_ints(3, "'<i> <j> <pattern-index>'");
        if (v[2] < 0 || v[2] >= count)
            throw ParseError(reader.line_number(), "instance references unknown pattern");
        set.instances.push_back(
            {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])});
    }
    return set;
}

// --- File helpers --------------------------------------------------------------------

template <typename WriteFn>
void write_file(const std::string& path, WriteFn&& fn) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    fn(out);
    out.flush();
    if (!out) throw Error("failed writing '" + path + "'");
}

template <typename ReadFn>
auto read_file(const std::string& path, ReadFn&& fn) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return fn(in);
}

}  // namespace vouw
