#pragma once

// Test-side oracles, kept independent of the power-iteration path they
// check: a dense SVD via Eigen and a mean-rank baseline. Only the singular
// vector computation is replaced; the rank matrices under test are the
// library's own.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "viewfuse/aggregation.hpp"

namespace oracle {

inline std::vector<double> dense_leading_left_singular_vector(
    const std::vector<std::vector<double>>& columns) {
  const Eigen::Index rows = static_cast<Eigen::Index>(columns.front().size());
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(columns.size()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      m(r, c) = columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  Eigen::VectorXd u = svd.matrixU().col(0);
  Eigen::Index dominant = 0;
  u.cwiseAbs().maxCoeff(&dominant);
  if (u(dominant) < 0.0) u = -u;
  std::vector<double> out(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) out[static_cast<std::size_t>(r)] = u(r);
  return out;
}

// Smallest-entry-first ordering with the documented tie rule: entries within
// 1e-12 are tied and fall back to target position (= universe order).
inline std::vector<std::string> order_by_entries(
    const std::vector<std::string>& targets, const std::vector<double>& entries) {
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (entries[a] != entries[b]) return entries[a] < entries[b];
    return a < b;
  });
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i == order.size() || entries[order[i]] - entries[order[i - 1]] > 1e-12) {
      if (i - run_start > 1) std::sort(order.begin() + run_start, order.begin() + i);
      run_start = i;
    }
  }
  std::vector<std::string> out;
  out.reserve(order.size());
  for (std::size_t index : order) out.push_back(targets[index]);
  return out;
}

inline std::vector<std::string> neighbour_set(const viewfuse::RankMatrix& matrix,
                                              int k) {
  auto order = order_by_entries(
      matrix.targets, dense_leading_left_singular_vector(matrix.columns));
  if (order.size() > static_cast<std::size_t>(k)) {
    order.resize(static_cast<std::size_t>(k));
  }
  return order;
}

// Mean of the normalised rank columns, smaller is better.
inline std::vector<std::string> mean_rank_neighbour_set(
    const viewfuse::RankMatrix& matrix, int k) {
  std::vector<double> mean(matrix.targets.size(), 0.0);
  for (const auto& column : matrix.columns) {
    for (std::size_t r = 0; r < column.size(); ++r) mean[r] += column[r];
  }
  for (double& value : mean) value /= static_cast<double>(matrix.columns.size());
  auto order = order_by_entries(matrix.targets, mean);
  if (order.size() > static_cast<std::size_t>(k)) {
    order.resize(static_cast<std::size_t>(k));
  }
  return order;
}

inline double cosine_between(const std::vector<double>& a,
                             const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace oracle
