#include "iotids/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "iotids/errors.hpp"
#include "iotids/rng.hpp"

namespace iotids {

int RawTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

LabelEncoder LabelEncoder::fit(const std::vector<std::string>& values) {
    std::set<std::string> distinct(values.begin(), values.end());
    LabelEncoder enc;
    enc.categories.assign(distinct.begin(), distinct.end());
    return enc;
}

int LabelEncoder::encode(const std::string& value) const {
    auto it = std::lower_bound(categories.begin(), categories.end(), value);
    if (it == categories.end() || *it != value)
        throw DataError("unknown category '" + value + "'");
    return static_cast<int>(it - categories.begin());
}

const std::string& LabelEncoder::decode(int code) const {
    if (code < 0 || code >= n_categories())
        throw DataError("category code out of range: " + std::to_string(code));
    return categories[static_cast<std::size_t>(code)];
}

std::vector<std::int64_t> Dataset::class_counts() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_classes()), 0);
    for (Eigen::Index i = 0; i < n(); ++i) counts[static_cast<std::size_t>(y[i])]++;
    return counts;
}

Dataset Dataset::select_rows(const std::vector<Eigen::Index>& idx) const {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), d());
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
        out.y[static_cast<Eigen::Index>(i)] = y[idx[i]];
    }
    out.feature_names = feature_names;
    out.class_names = class_names;
    return out;
}

Dataset Dataset::select_columns(const std::vector<int>& cols) const {
    Dataset out;
    out.X.resize(n(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] < 0 || cols[j] >= d())
            throw DataError("column index out of range: " + std::to_string(cols[j]));
        out.X.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
        out.feature_names.push_back(feature_names[static_cast<std::size_t>(cols[j])]);
    }
    out.y = y;
    out.class_names = class_names;
    return out;
}

void Dataset::validate() const {
    if (n() < 1 || d() < 1) throw DataError("dataset is empty");
    if (y.size() != n()) throw DataError("label vector length does not match row count");
    if (static_cast<Eigen::Index>(feature_names.size()) != d())
        throw DataError("feature name count does not match column count");
    if (!X.allFinite()) throw DataError("dataset contains NaN or Inf cells");
    const int c = n_classes();
    for (Eigen::Index i = 0; i < n(); ++i)
        if (y[i] < 0 || y[i] >= c)
            throw DataError("label out of range at row " + std::to_string(i));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

RawTable load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    RawTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_csv_line(line);
    if (table.header.empty()) throw DataError("empty header in " + path);

    {
        std::set<std::string> seen;
        for (const auto& h : table.header)
            if (!seen.insert(h).second) throw DataError("duplicate column name '" + h + "'");
    }

    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != table.header.size())
            throw DataError("row " + std::to_string(row_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.rows.empty()) throw DataError("no data rows in " + path);
    return table;
}

RawTable load_dataset(const std::string& path, const std::string& target_column,
                      const std::vector<std::string>& categorical_columns) {
    RawTable table = load_table(path);
    if (table.column_index(target_column) < 0)
        throw DataError("target column '" + target_column + "' not found");
    for (const auto& c : categorical_columns)
        if (table.column_index(c) < 0)
            throw DataError("categorical column '" + c + "' not found");
    return table;
}

EncodeResult encode(const RawTable& table, const std::string& target_column,
                    const std::vector<std::string>& categorical_columns) {
    const int target_idx = table.column_index(target_column);
    if (target_idx < 0) throw DataError("target column '" + target_column + "' not found");

    std::vector<bool> is_categorical(table.n_cols(), false);
    for (const auto& c : categorical_columns) {
        const int idx = table.column_index(c);
        if (idx < 0) throw DataError("categorical column '" + c + "' not found");
        is_categorical[static_cast<std::size_t>(idx)] = true;
    }

    EncodeResult result;
    const std::size_t n = table.n_rows();

    std::vector<std::string> target_values(n);
    for (std::size_t i = 0; i < n; ++i)
        target_values[i] = table.rows[i][static_cast<std::size_t>(target_idx)];
    result.target_encoder = LabelEncoder::fit(target_values);

    std::vector<int> feature_cols;
    for (std::size_t j = 0; j < table.n_cols(); ++j)
        if (static_cast<int>(j) != target_idx) feature_cols.push_back(static_cast<int>(j));

    Dataset& ds = result.dataset;
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_cols.size()));
    ds.y.resize(static_cast<Eigen::Index>(n));
    for (int j : feature_cols) ds.feature_names.push_back(table.header[static_cast<std::size_t>(j)]);
    ds.class_names = result.target_encoder.categories;

    for (std::size_t out_j = 0; out_j < feature_cols.size(); ++out_j) {
        const std::size_t j = static_cast<std::size_t>(feature_cols[out_j]);
        if (is_categorical[j]) {
            std::vector<std::string> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = table.rows[i][j];
            LabelEncoder enc = LabelEncoder::fit(col);
            for (std::size_t i = 0; i < n; ++i)
                ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out_j)) =
                    static_cast<double>(enc.encode(col[i]));
            result.feature_encoders.emplace(table.header[j], std::move(enc));
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const std::string& cell = table.rows[i][j];
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
                    throw DataError("cannot parse numeric cell at row " + std::to_string(i + 1) +
                                    ", column '" + table.header[j] + "': '" + cell + "'");
                ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out_j)) = v;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        ds.y[static_cast<Eigen::Index>(i)] = result.target_encoder.encode(target_values[i]);

    ds.validate();
    return result;
}

SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    ds.validate();
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw UsageError("test_fraction must lie in (0, 1)");

    const int c = ds.n_classes();
    std::vector<std::vector<Eigen::Index>> by_class(static_cast<std::size_t>(c));
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        by_class[static_cast<std::size_t>(ds.y[i])].push_back(i);

    std::vector<Eigen::Index> train_idx, test_idx;
    for (int cls = 0; cls < c; ++cls) {
        auto& rows = by_class[static_cast<std::size_t>(cls)];
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(cls)));
        rng.shuffle(rows);
        const std::size_t n_test =
            static_cast<std::size_t>(std::floor(static_cast<double>(rows.size()) * test_fraction));
        for (std::size_t i = 0; i < rows.size(); ++i)
            (i < n_test ? test_idx : train_idx).push_back(rows[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    SplitPair split;
    split.train = ds.select_rows(train_idx);
    split.test = ds.select_rows(test_idx);
    split.test_fraction = test_fraction;
    split.seed = seed;
    return split;
}

}  // namespace iotids
