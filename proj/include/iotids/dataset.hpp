#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace iotids {

// Raw CSV contents: header plus string cells, nothing parsed yet.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return header.size(); }
    int column_index(const std::string& name) const;  // -1 if absent
};

// Maps category strings to ordinals [0, C) in lexicographic order.
struct LabelEncoder {
    std::vector<std::string> categories;  // sorted

    static LabelEncoder fit(const std::vector<std::string>& values);
    int encode(const std::string& value) const;  // throws DataError on unknown
    const std::string& decode(int code) const;
    int n_categories() const { return static_cast<int>(categories.size()); }
};

struct Dataset {
    Eigen::MatrixXd X;   // n x d
    Eigen::VectorXi y;   // n, values in [0, C)
    std::vector<std::string> feature_names;  // size d
    std::vector<std::string> class_names;    // size C

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
    int n_classes() const { return static_cast<int>(class_names.size()); }

    std::vector<std::int64_t> class_counts() const;
    Dataset select_rows(const std::vector<Eigen::Index>& idx) const;
    Dataset select_columns(const std::vector<int>& cols) const;

    // no NaN/Inf, labels in range, shape consistency; throws DataError
    void validate() const;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    double test_fraction = 0.2;
    std::uint64_t seed = 42;
};

struct EncodeResult {
    Dataset dataset;
    std::map<std::string, LabelEncoder> feature_encoders;  // categorical cols
    LabelEncoder target_encoder;
};

// Reads a comma-delimited CSV with a header row. Ragged rows are reported
// with their 1-based data row number.
RawTable load_table(const std::string& path);

// load_table plus a check that the named columns exist.
RawTable load_dataset(const std::string& path, const std::string& target_column,
                      const std::vector<std::string>& categorical_columns);

// Categorical features become their lexicographic ordinal codes; everything
// else must parse as a real. Target strings map to [0, C) in sorted order.
EncodeResult encode(const RawTable& table, const std::string& target_column,
                    const std::vector<std::string>& categorical_columns);

// Per class: floor(n_c * test_fraction) rows to test by seeded shuffle,
// remainder to train. Row order within each side follows the original order.
SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

}  // namespace iotids
