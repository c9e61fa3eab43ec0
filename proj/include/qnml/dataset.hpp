#pragma once

// Categorical datasets, CSV ingestion and contingency counting.

#include <qnml/error.hpp>
#include <qnml/numeric.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace qnml {

using Category = std::uint32_t;

/// Default label for category k of a variable with `arity` values: the index
/// zero-padded so that lexicographic order equals index order.
inline std::string index_label(std::size_t k, std::size_t arity) {
    std::string digits = std::to_string(k);
    const std::size_t width = std::to_string(arity > 0 ? arity - 1 : 0).size();
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return digits;
}

inline std::vector<std::string> index_labels(std::size_t arity) {
    std::vector<std::string> out;
    out.reserve(arity);
    for (std::size_t k = 0; k < arity; ++k) out.push_back(index_label(k, arity));
    return out;
}

/// N x n matrix of category indices, stored column-major.
class Dataset {
public:
    Dataset() = default;

    /// Builds from column-major storage. Throws DataError on invariant violations.
    Dataset(std::vector<std::string> names, std::vector<std::size_t> arities,
            std::vector<Category> column_major, std::size_t rows,
            std::vector<std::vector<std::string>> labels = {})
        : names_(std::move(names)),
          arities_(std::move(arities)),
          cells_(std::move(column_major)),
          rows_(rows),
          labels_(std::move(labels)) {
        validate();
    }

    static Dataset from_rows(std::vector<std::string> names, std::vector<std::size_t> arities,
                             const std::vector<std::vector<Category>>& rows) {
        const std::size_t n = arities.size();
        std::vector<Category> cells(n * rows.size());
        for (std::size_t t = 0; t < rows.size(); ++t) {
            if (rows[t].size() != n) detail::data_error("row " + std::to_string(t) + " has wrong width");
            for (std::size_t i = 0; i < n; ++i) cells[i * rows.size() + t] = rows[t][i];
        }
        if (names.empty())
            for (std::size_t i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
        return Dataset(std::move(names), std::move(arities), std::move(cells), rows.size());
    }

    std::size_t num_rows() const noexcept { return rows_; }
    std::size_t num_vars() const noexcept { return arities_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<std::size_t>& arities() const noexcept { return arities_; }
    std::size_t arity(std::size_t i) const { return arities_.at(i); }

    Category at(std::size_t row, std::size_t var) const { return cells_[var * rows_ + row]; }
    std::span<const Category> column(std::size_t var) const {
        return {cells_.data() + var * rows_, rows_};
    }
    std::vector<Category> row(std::size_t t) const {
        std::vector<Category> out(num_vars());
        for (std::size_t i = 0; i < num_vars(); ++i) out[i] = at(t, i);
        return out;
    }

    /// Label of category k of variable i; falls back to the padded index.
    std::string label(std::size_t var, std::size_t k) const {
        if (var < labels_.size() && k < labels_[var].size()) return labels_[var][k];
        return index_label(k, arities_[var]);
    }
    std::vector<std::string> labels(std::size_t var) const {
        std::vector<std::string> out;
        for (std::size_t k = 0; k < arities_[var]; ++k) out.push_back(label(var, k));
        return out;
    }

    /// New dataset holding the given rows in the given order.
    Dataset select_rows(std::span<const std::size_t> idx) const {
        std::vector<Category> cells(num_vars() * idx.size());
        for (std::size_t i = 0; i < num_vars(); ++i)
            for (std::size_t t = 0; t < idx.size(); ++t) cells[i * idx.size() + t] = at(idx[t], i);
        return Dataset(names_, arities_, std::move(cells), idx.size(), labels_);
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    void validate() const {
        if (arities_.empty()) detail::data_error("dataset needs at least one variable");
        if (names_.size() != arities_.size()) detail::data_error("names and arities differ in length");
        if (cells_.size() != rows_ * arities_.size()) detail::data_error("cell storage has wrong size");
        for (std::size_t i = 0; i < arities_.size(); ++i) {
            if (arities_[i] < 1) detail::data_error("variable '" + names_[i] + "' has arity 0");
            for (Category v : column(i))
                if (v >= arities_[i])
                    detail::data_error("value " + std::to_string(v) + " out of range for variable '" +
                                       names_[i] + "' (arity " + std::to_string(arities_[i]) + ")");
        }
    }

    std::vector<std::string> names_;
    std::vector<std::size_t> arities_;
    std::vector<Category> cells_;
    std::size_t rows_ = 0;
    std::vector<std::vector<std::string>> labels_;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in, const std::string& source = "<stream>") {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            detail::data_error(source + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(table.header.size()) + " fields, got " +
                               std::to_string(fields.size()));
        for (const auto& f : fields)
            if (f.empty()) detail::data_error(source + ":" + std::to_string(lineno) + ": empty cell");
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) detail::data_error(source + ": empty file");
    for (const auto& h : table.header)
        if (h.empty()) detail::data_error(source + ": empty variable name in header");
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::data_error("cannot open '" + path + "'");
    return parse_csv(in, path);
}

/// Per-column mapping from strings to category indices.
struct Vocabulary {
    std::vector<std::string> labels;  // index -> label

    std::optional<Category> find(const std::string& s) const {
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (labels[k] == s) return static_cast<Category>(k);
        return std::nullopt;
    }
};

namespace detail {

inline std::size_t resolve_arity(const std::string& name, std::size_t observed,
                                 const std::optional<std::vector<std::size_t>>& declared, std::size_t col) {
    if (!declared) return observed;
    const std::size_t d = declared->at(col);
    if (d < observed)
        data_error("declared arity " + std::to_string(d) + " of '" + name + "' is smaller than the " +
                   std::to_string(observed) + " observed values");
    return d;
}

/// Builds sorted vocabularies over the union of all tables' values.
inline std::vector<std::vector<std::string>> sorted_vocabularies(std::span<const CsvTable> tables) {
    const std::size_t n = tables.front().header.size();
    std::vector<std::vector<std::string>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::set<std::string> seen;
        for (const auto& t : tables)
            for (const auto& r : t.rows) seen.insert(r[i]);
        out[i].assign(seen.begin(), seen.end());
    }
    return out;
}

inline Dataset build_dataset(const CsvTable& table, const std::vector<std::vector<std::string>>& vocab,
                             const std::optional<std::vector<std::size_t>>& declared) {
    const std::size_t n = table.header.size();
    const std::size_t N = table.rows.size();
    if (declared && declared->size() != n)
        data_error("declared arities cover " + std::to_string(declared->size()) + " of " +
                   std::to_string(n) + " columns");
    std::vector<std::size_t> arities(n);
    std::vector<std::vector<std::string>> labels(n);
    std::vector<Category> cells(n * N);
    for (std::size_t i = 0; i < n; ++i) {
        std::map<std::string, Category> index;
        for (std::size_t k = 0; k < vocab[i].size(); ++k) index.emplace(vocab[i][k], static_cast<Category>(k));
        if (N > 0 && vocab[i].empty()) data_error("column '" + table.header[i] + "' has no values");
        arities[i] = resolve_arity(table.header[i], vocab[i].size(), declared, i);
        if (arities[i] == 0) arities[i] = 1;
        labels[i] = vocab[i];
        for (std::size_t k = labels[i].size(); k < arities[i]; ++k) labels[i].push_back("#" + std::to_string(k));
        for (std::size_t t = 0; t < N; ++t) {
            auto it = index.find(table.rows[t][i]);
            if (it == index.end())
                data_error("value '" + table.rows[t][i] + "' not in the vocabulary of '" + table.header[i] + "'");
            cells[i * N + t] = it->second;
        }
    }
    return Dataset(table.header, std::move(arities), std::move(cells), N, std::move(labels));
}

}  // namespace detail

/// Loads a CSV file. Category indices follow the lexicographic order of the
/// distinct strings in each column; declared arities may add unseen categories.
inline Dataset load_dataset(const std::string& path,
                            const std::optional<std::vector<std::size_t>>& declared_arities = std::nullopt) {
    const CsvTable table = read_csv_file(path);
    const std::vector<CsvTable> tables{table};
    return detail::build_dataset(table, detail::sorted_vocabularies(tables), declared_arities);
}

inline Dataset parse_dataset(std::istream& in,
                             const std::optional<std::vector<std::size_t>>& declared_arities = std::nullopt) {
    const CsvTable table = parse_csv(in);
    const std::vector<CsvTable> tables{table};
    return detail::build_dataset(table, detail::sorted_vocabularies(tables), declared_arities);
}

/// Loads a CSV file against fixed per-column vocabularies (index = position).
/// Column order in the file may differ from the vocabulary order; columns are
/// matched by name and the result follows `names`.
inline Dataset load_dataset_with_vocabulary(const std::string& path, const std::vector<std::string>& names,
                                            const std::vector<std::vector<std::string>>& vocab) {
    CsvTable raw = read_csv_file(path);
    CsvTable table;
    table.header = names;
    std::vector<std::size_t> src(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto it = std::find(raw.header.begin(), raw.header.end(), names[i]);
        if (it == raw.header.end()) detail::data_error(path + ": missing column '" + names[i] + "'");
        src[i] = static_cast<std::size_t>(it - raw.header.begin());
    }
    for (auto& r : raw.rows) {
        std::vector<std::string> row(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) row[i] = r[src[i]];
        table.rows.push_back(std::move(row));
    }
    std::vector<std::size_t> arities;
    for (const auto& v : vocab) arities.push_back(v.size());
    return detail::build_dataset(table, vocab, arities);
}

/// Loads several CSV files with identical headers using one shared sorted
/// vocabulary per column, so that category indices agree across files.
inline std::vector<Dataset> load_datasets_jointly(std::span<const std::string> paths) {
    std::vector<CsvTable> tables;
    for (const auto& p : paths) tables.push_back(read_csv_file(p));
    for (std::size_t f = 1; f < tables.size(); ++f)
        if (tables[f].header != tables[0].header)
            detail::data_error(paths[f] + ": header differs from " + paths[0]);
    const auto vocab = detail::sorted_vocabularies(tables);
    std::vector<Dataset> out;
    for (const auto& t : tables) out.push_back(detail::build_dataset(t, vocab, std::nullopt));
    return out;
}

inline void write_csv(const Dataset& data, std::ostream& out) {
    for (std::size_t i = 0; i < data.num_vars(); ++i) out << (i ? "," : "") << data.names()[i];
    out << '\n';
    for (std::size_t t = 0; t < data.num_rows(); ++t) {
        for (std::size_t i = 0; i < data.num_vars(); ++i) out << (i ? "," : "") << data.label(i, data.at(t, i));
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Contingency tables

/// Counts N_ijk for one (child, parent set) pair. Only observed parent
/// configurations are stored; unobserved ones have all-zero counts.
class ContingencyTable {
public:
    std::size_t child = 0;
    std::vector<std::size_t> parents;        // ascending
    std::size_t r = 1;                       // child arity
    std::uint64_t q = 1;                     // number of parent configurations
    std::size_t N = 0;
    std::vector<std::uint64_t> configs;      // observed j, ascending
    std::vector<std::uint32_t> cells;        // configs.size() x r, row-major
    std::vector<std::uint32_t> totals;       // N_ij per observed j

    std::size_t observed() const noexcept { return configs.size(); }

    std::span<const std::uint32_t> observed_row(std::size_t idx) const { return {cells.data() + idx * r, r}; }

    std::uint32_t count(std::uint64_t j, std::size_t k) const {
        auto it = std::lower_bound(configs.begin(), configs.end(), j);
        if (it == configs.end() || *it != j) return 0;
        return cells[static_cast<std::size_t>(it - configs.begin()) * r + k];
    }
    std::uint32_t row_total(std::uint64_t j) const {
        auto it = std::lower_bound(configs.begin(), configs.end(), j);
        if (it == configs.end() || *it != j) return 0;
        return totals[static_cast<std::size_t>(it - configs.begin())];
    }

    /// Full q x r count matrix; refuses tables with more than 2^24 rows.
    std::vector<std::vector<std::uint32_t>> dense() const {
        if (q > (1u << 24)) detail::resource_error("contingency table too large to densify");
        std::vector<std::vector<std::uint32_t>> out(q, std::vector<std::uint32_t>(r, 0));
        for (std::size_t a = 0; a < configs.size(); ++a)
            for (std::size_t k = 0; k < r; ++k) out[configs[a]][k] = cells[a * r + k];
        return out;
    }

    friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

inline constexpr std::uint64_t max_configurations = std::uint64_t{1} << 62;

/// Number of joint configurations of `vars`; ResourceError beyond 2^62.
inline std::uint64_t configuration_count(const Dataset& data, std::span<const std::size_t> vars) {
    std::uint64_t q = 1;
    for (std::size_t v : vars)
        if (!numeric::mul_bounded(q, data.arity(v), max_configurations, q))
            detail::resource_error("parent configuration count exceeds 2^62");
    return q;
}

/// Parent configuration index of row t: ascending parents, last one fastest.
inline std::uint64_t parent_configuration(const Dataset& data, std::span<const std::size_t> parents, std::size_t t) {
    std::uint64_t j = 0;
    for (std::size_t p : parents) j = j * data.arity(p) + data.at(t, p);
    return j;
}

inline ContingencyTable contingency(const Dataset& data, std::size_t child, std::vector<std::size_t> parents) {
    const std::size_t n = data.num_vars();
    if (child >= n) detail::data_error("child index " + std::to_string(child) + " out of range");
    std::sort(parents.begin(), parents.end());
    for (std::size_t a = 0; a < parents.size(); ++a) {
        if (parents[a] >= n) detail::data_error("parent index " + std::to_string(parents[a]) + " out of range");
        if (parents[a] == child) detail::data_error("child appears among its own parents");
        if (a > 0 && parents[a] == parents[a - 1]) detail::data_error("duplicate parent index");
    }

    ContingencyTable tab;
    tab.child = child;
    tab.parents = std::move(parents);
    tab.r = data.arity(child);
    tab.q = configuration_count(data, tab.parents);
    tab.N = data.num_rows();
    std::uint64_t cells_total = 0;
    if (!numeric::mul_bounded(tab.q, tab.r, max_configurations, cells_total))
        detail::resource_error("joint configuration count exceeds 2^62");

    const std::size_t N = tab.N;
    const auto child_col = data.column(child);
    std::vector<std::uint64_t> codes(N, 0);
    for (std::size_t p : tab.parents) {
        const auto col = data.column(p);
        const std::uint64_t a = data.arity(p);
        for (std::size_t t = 0; t < N; ++t) codes[t] = codes[t] * a + col[t];
    }
    for (std::size_t t = 0; t < N; ++t) codes[t] = codes[t] * tab.r + child_col[t];

    auto push = [&](std::uint64_t code, std::uint32_t c) {
        const std::uint64_t j = code / tab.r;
        const std::size_t k = static_cast<std::size_t>(code % tab.r);
        if (tab.configs.empty() || tab.configs.back() != j) {
            tab.configs.push_back(j);
            tab.cells.resize(tab.cells.size() + tab.r, 0);
            tab.totals.push_back(0);
        }
        tab.cells[(tab.configs.size() - 1) * tab.r + k] += c;
        tab.totals.back() += c;
    };

    if (cells_total <= std::max<std::uint64_t>(4 * N, 1u << 16)) {
        std::vector<std::uint32_t> dense(static_cast<std::size_t>(cells_total), 0);
        for (auto c : codes) ++dense[c];
        for (std::uint64_t c = 0; c < cells_total; ++c)
            if (dense[c]) push(c, dense[c]);
    } else {
        std::sort(codes.begin(), codes.end());
        for (std::size_t t = 0; t < N;) {
            std::size_t u = t;
            while (u < N && codes[u] == codes[t]) ++u;
            push(codes[t], static_cast<std::uint32_t>(u - t));
            t = u;
        }
    }
    return tab;
}

/// Maximized conditional log-likelihood Σ N_ijk ln(N_ijk / N_ij), natural log.
inline double max_loglik_conditional(const ContingencyTable& tab) {
    double s = 0.0;
    for (std::size_t a = 0; a < tab.observed(); ++a) {
        const double nij = tab.totals[a];
        for (auto c : tab.observed_row(a)) s += numeric::xlogx(c);
        s -= numeric::xlogx(nij);
    }
    return std::min(s, 0.0);
}

/// H_N(X_child | X_parents) in nats.
inline double empirical_cond_entropy(const Dataset& data, std::size_t child, std::vector<std::size_t> parents) {
    if (data.num_rows() == 0) detail::data_error("empirical entropy undefined for an empty dataset");
    const auto tab = contingency(data, child, std::move(parents));
    return -max_loglik_conditional(tab) / static_cast<double>(data.num_rows());
}

}  // namespace qnml
