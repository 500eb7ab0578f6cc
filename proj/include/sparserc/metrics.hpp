#pragma once

#include "sparserc/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparserc {

using BinaryMatrix = Eigen::MatrixXi;

struct MetricsReport {
  std::string method = "sparserc";
  std::uint64_t seed = 0;
  Index d = 0;
  Index n = 0;
  long shd = 0;
  std::optional<long> sid;
  std::optional<double> tpr;
  double fpr = 0.0;
  long total_edges = 0;
  std::optional<double> nmse_weights;
  std::optional<double> avg_l1;
  std::optional<double> max_l1;
  std::optional<double> avg_l2;
  std::optional<double> c_tpr;
  std::optional<double> c_fpr;
  std::optional<double> c_nmse;
  std::optional<double> varsortability;
  double runtime_seconds = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

/// Column order of the serialized report.
const std::vector<std::string>& metrics_columns();
std::vector<std::string> to_csv_fields(const MetricsReport& report);
MetricsReport metrics_from_csv_fields(const std::vector<std::string>& fields);

/// Structural Hamming distance over unordered node pairs; a reversal costs 1.
long shd(const BinaryMatrix& est, const BinaryMatrix& truth);

/// Structural intervention distance. Absent when `est` has a cycle.
std::optional<long> sid(const BinaryMatrix& est, const BinaryMatrix& truth);

struct EdgeRates {
  std::optional<double> tpr;  ///< absent when truth has no edges
  double fpr;
  long total_edges;
};

EdgeRates edge_rates(const BinaryMatrix& est, const BinaryMatrix& truth);

struct WeightLosses {
  double avg_l1;
  double max_l1;
  double avg_l2;
  double nmse;
};

WeightLosses weight_losses(const Matrix& est, const Matrix& truth, long edge_count);

/// Fraction of path-connected pairs (counted once per path length) whose
/// variance increases along the path; ties within relative `tol` count 1/2.
double varsortability(const Matrix& x, const BinaryMatrix& truth, double tol = 1e-9);

struct RootCauseScores {
  double c_tpr;
  double c_fpr;
  double c_nmse;
};

RootCauseScores root_cause_metrics(const Matrix& c_est, const Matrix& c_true,
                                   double support_frac = 0.1);

}  // namespace sparserc
