#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "madc/errors.hpp"

namespace madc {

// One cell of a placement delivery array: a star or a positive integer label.
class pda_entry {
  public:
    constexpr pda_entry() = default;  // star

    static constexpr pda_entry star() { return {}; }

    static pda_entry label(int value) {
        if (value < 1) throw param_error("pda_entry label must be >= 1");
        pda_entry e;
        e.value_ = value;
        return e;
    }

    constexpr bool is_star() const { return value_ == 0; }

    int label_value() const {
        if (is_star()) throw param_error("pda_entry: star has no label");
        return value_;
    }

    friend constexpr bool operator==(pda_entry, pda_entry) = default;

  private:
    int value_ = 0;
};

// Dense F x K array, 1-based indices throughout to match the usual notation
// for these arrays.
class pda_array {
  public:
    pda_array(int rows, int cols)
        : rows_(rows), cols_(cols),
          cells_(check_dims(rows, cols) * static_cast<std::size_t>(cols)) {}

    static pda_array from_rows(const std::vector<std::vector<pda_entry>>& rows) {
        if (rows.empty() || rows[0].empty()) throw param_error("pda_array: empty row set");
        pda_array a(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
        for (std::size_t f = 0; f < rows.size(); ++f) {
            if (rows[f].size() != rows[0].size())
                throw param_error("pda_array: ragged rows");
            for (std::size_t k = 0; k < rows[f].size(); ++k)
                a.cells_[f * rows[f].size() + k] = rows[f][k];
        }
        return a;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    pda_entry at(int f, int k) const { return cells_[index(f, k)]; }
    void set(int f, int k, pda_entry e) { cells_[index(f, k)] = e; }

    friend bool operator==(const pda_array&, const pda_array&) = default;

  private:
    static std::size_t check_dims(int rows, int cols) {
        if (rows < 1 || cols < 1) throw param_error("pda_array: dimensions must be positive");
        return static_cast<std::size_t>(rows);
    }

    std::size_t index(int f, int k) const {
        if (f < 1 || f > rows_ || k < 1 || k > cols_)
            throw out_of_range_error("pda_array: cell (" + std::to_string(f) + "," +
                                     std::to_string(k) + ") outside " + std::to_string(rows_) +
                                     "x" + std::to_string(cols_));
        return static_cast<std::size_t>(f - 1) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(k - 1);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<pda_entry> cells_;
};

struct pda_params {
    int k = 0;  // columns
    int f = 0;  // rows
    int z = 0;  // stars per column
    int s = 0;  // number of distinct labels
    std::optional<int> g;  // occurrences per label, when uniform
    std::optional<int> l;  // star-pattern shift between adjacent columns, when one exists
};

// Cells (row, col) holding each label; index 0 unused.
inline std::vector<std::vector<std::pair<int, int>>> label_cells(const pda_array& a, int max_label) {
    std::vector<std::vector<std::pair<int, int>>> cells(static_cast<std::size_t>(max_label) + 1);
    for (int f = 1; f <= a.rows(); ++f)
        for (int k = 1; k <= a.cols(); ++k) {
            pda_entry e = a.at(f, k);
            if (!e.is_star() && e.label_value() <= max_label)
                cells[static_cast<std::size_t>(e.label_value())].push_back({f, k});
        }
    return cells;
}

// Checks the three defining conditions and returns the (K, F, Z, S) profile.
//
//  A1: every column holds the same number of stars.
//  A2: the labels are exactly 1..S, each present somewhere.
//  A3: two cells sharing a label lie in distinct rows and distinct columns,
//      and both cross cells are stars.
inline pda_params verify_pda(const pda_array& a) {
    int common_stars = -1;
    int max_label = 0;
    for (int k = 1; k <= a.cols(); ++k) {
        int stars = 0;
        for (int f = 1; f <= a.rows(); ++f) {
            pda_entry e = a.at(f, k);
            if (e.is_star())
                ++stars;
            else if (e.label_value() > max_label)
                max_label = e.label_value();
        }
        if (common_stars < 0)
            common_stars = stars;
        else if (stars != common_stars)
            throw a1_violation(k, stars, common_stars);
    }

    auto cells = label_cells(a, max_label);
    for (int s = 1; s <= max_label; ++s)
        if (cells[static_cast<std::size_t>(s)].empty())
            throw a2_violation(s, "A2 violated: label " + std::to_string(s) +
                                      " missing, labels are not 1.." + std::to_string(max_label));

    for (int s = 1; s <= max_label; ++s) {
        const auto& occ = cells[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < occ.size(); ++i)
            for (std::size_t j = i + 1; j < occ.size(); ++j) {
                auto [f1, k1] = occ[i];
                auto [f2, k2] = occ[j];
                if (f1 == f2) throw a3_violation(s, f1, k1, f2, k2, "entries share a row");
                if (k1 == k2) throw a3_violation(s, f1, k1, f2, k2, "entries share a column");
                if (!a.at(f1, k2).is_star())
                    throw a3_violation(s, f1, k1, f2, k2,
                                       "cross cell (" + std::to_string(f1) + "," +
                                           std::to_string(k2) + ") is not a star");
                if (!a.at(f2, k1).is_star())
                    throw a3_violation(s, f1, k1, f2, k2,
                                       "cross cell (" + std::to_string(f2) + "," +
                                           std::to_string(k1) + ") is not a star");
            }
    }

    pda_params p;
    p.k = a.cols();
    p.f = a.rows();
    p.z = common_stars;
    p.s = max_label;
    return p;
}

// The common number of occurrences per label, if every label has the same;
// nullopt for non-uniform arrays and for arrays without labels.
inline std::optional<int> check_regularity(const pda_array& a) {
    pda_params p = verify_pda(a);
    if (p.s == 0) return std::nullopt;
    auto cells = label_cells(a, p.s);
    std::size_t g = cells[1].size();
    for (int s = 2; s <= p.s; ++s)
        if (cells[static_cast<std::size_t>(s)].size() != g) return std::nullopt;
    return static_cast<int>(g);
}

namespace detail {

inline std::vector<bool> star_mask(const pda_array& a, int col) {
    std::vector<bool> mask(static_cast<std::size_t>(a.rows()) + 1, false);
    for (int f = 1; f <= a.rows(); ++f)
        if (a.at(f, col).is_star()) mask[static_cast<std::size_t>(f)] = true;
    return mask;
}

// True when the marked rows form one cyclically consecutive run (or are empty,
// or cover every row).
inline bool single_cyclic_run(const std::vector<bool>& mask, int rows) {
    int marked = 0, run_starts = 0;
    for (int r = 1; r <= rows; ++r) {
        if (!mask[static_cast<std::size_t>(r)]) continue;
        ++marked;
        int prev = r == 1 ? rows : r - 1;
        if (!mask[static_cast<std::size_t>(prev)]) ++run_starts;
    }
    if (marked == 0 || marked == rows) return true;
    return run_starts == 1;
}

}  // namespace detail

// True when every column's stars form one cyclic run of rows and each column's
// run is the previous column's shifted down by l (modulo the row count).
inline bool check_l_cyclic(const pda_array& a, int l) {
    if (l < 0) throw param_error("check_l_cyclic: shift must be >= 0");
    int rows = a.rows();
    std::vector<bool> prev;
    for (int k = 1; k <= a.cols(); ++k) {
        std::vector<bool> mask = detail::star_mask(a, k);
        if (!detail::single_cyclic_run(mask, rows)) return false;
        if (k > 1) {
            for (int r = 1; r <= rows; ++r) {
                int shifted = (r - 1 + l) % rows + 1;
                if (prev[static_cast<std::size_t>(r)] != mask[static_cast<std::size_t>(shifted)])
                    return false;
            }
        }
        prev = std::move(mask);
    }
    return true;
}

// Smallest shift in [0, rows) under which the array is cyclic, if any.
inline std::optional<int> find_cyclic_shift(const pda_array& a) {
    for (int l = 0; l < a.rows(); ++l)
        if (check_l_cyclic(a, l)) return l;
    return std::nullopt;
}

inline pda_array transpose(const pda_array& a) {
    pda_array t(a.cols(), a.rows());
    for (int f = 1; f <= a.rows(); ++f)
        for (int k = 1; k <= a.cols(); ++k) t.set(k, f, a.at(f, k));
    return t;
}

// Convenience for reporting: verification plus the optional g and l attributes.
inline pda_params inspect_pda(const pda_array& a) {
    pda_params p = verify_pda(a);
    p.g = check_regularity(a);
    p.l = find_cyclic_shift(a);
    return p;
}

// Text form: one row per line, cells separated by spaces, `*` for stars.
// Blank lines and lines starting with `#` are ignored on input.
inline std::string serialize_pda_text(const pda_array& a) {
    std::string out;
    for (int f = 1; f <= a.rows(); ++f) {
        for (int k = 1; k <= a.cols(); ++k) {
            if (k > 1) out.push_back(' ');
            pda_entry e = a.at(f, k);
            out += e.is_star() ? "*" : std::to_string(e.label_value());
        }
        out.push_back('\n');
    }
    return out;
}

inline pda_array parse_pda_text(const std::string& text) {
    std::vector<std::vector<pda_entry>> rows;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::istringstream toks(line);
        std::string tok;
        std::vector<pda_entry> row;
        while (toks >> tok) {
            if (tok[0] == '#') break;
            if (tok == "*") {
                row.push_back(pda_entry::star());
                continue;
            }
            std::size_t used = 0;
            int value = 0;
            try {
                value = std::stoi(tok, &used);
            } catch (const std::exception&) {
                throw parse_error(lineno, "expected `*` or a positive integer, got `" + tok + "`");
            }
            if (used != tok.size() || value < 1)
                throw parse_error(lineno, "expected `*` or a positive integer, got `" + tok + "`");
            row.push_back(pda_entry::label(value));
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows[0].size())
            throw parse_error(lineno, "row has " + std::to_string(row.size()) +
                                          " cells, expected " + std::to_string(rows[0].size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error(lineno, "no rows found");
    return pda_array::from_rows(rows);
}

}  // namespace madc
