#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "iotids/errors.hpp"

namespace iotids::detail {

using nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_hint = -1) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = cols_hint;
    if (rows > 0) cols = static_cast<Eigen::Index>(j.at(0).size());
    if (cols < 0) throw DataError("cannot infer matrix width from empty JSON array");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw DataError("ragged matrix row in JSON document");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

inline json ivector_to_json(const Eigen::VectorXi& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

inline Eigen::VectorXi ivector_from_json(const json& j) {
    Eigen::VectorXi v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = j.at(static_cast<std::size_t>(i)).get<int>();
    return v;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace iotids::detail
