#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "encounter/errors.hpp"

namespace encounter::analytics {

/// n scenarios x d named feature columns. All entries finite.
struct FeatureMatrix {
  std::vector<std::string> column_names;
  std::vector<std::string> row_ids;
  Eigen::MatrixXd values;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  void validate() const;
};

struct ZScoreParams {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;  // sample standard deviation (ddof = 1)
  std::vector<int> constant_columns;  // sigma below 1e-12
};

ZScoreParams zscore_fit(const FeatureMatrix& m);

/// (x - mu) / sigma per column; constant columns map to all-zeros and emit a
/// warning instead of dividing by ~0.
FeatureMatrix zscore_apply(const FeatureMatrix& m, const ZScoreParams& params,
                           std::vector<std::string>* warnings = nullptr);

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;          // d x m, orthonormal columns
  Eigen::VectorXd explained_variance;  // m, non-increasing
};

/// Top-m eigenvectors of the population covariance (ddof = 0). Each
/// component's largest-magnitude coordinate is made positive so results are
/// stable run to run.
PcaModel pca_fit(const FeatureMatrix& m, int components = 2);

/// Projection (x - mean) * components; output columns named PC_0, PC_1, ...
FeatureMatrix pca_transform(const FeatureMatrix& m, const PcaModel& model);

struct Clustering {
  int k = 0;
  Eigen::MatrixXd centroids;  // k x m
  std::vector<int> labels;    // n, in [0, k)
  double inertia = 0.0;       // sum of squared distances to assigned centroid
  std::uint64_t seed = 0;
  int iterations = 0;
};

/// Lloyd iterations from a k-means++ start. Deterministic given
/// (data, k, seed); empty clusters are re-seeded to the farthest point. The
/// per-iteration inertia sequence is checked to be non-increasing; a
/// violation is an Internal error. Pass inertia_trace to capture it.
Clustering kmeans(const FeatureMatrix& m, int k, std::uint64_t seed, int max_iter = 300,
                  double tol = 1e-6, std::vector<double>* inertia_trace = nullptr);

/// Empirical cumulative distribution function of a sample.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);

  /// F(x) = (#values <= x) / n.
  double operator()(double x) const;
  const std::vector<double>& sorted_values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

struct KsResult {
  double d_n = 0.0;     // sup |F_a - F_b|, exact over the merged sample points
  double p_value = 1.0;  // asymptotic two-sample Kolmogorov distribution
};

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

/// Asymptotic p-value with effective n = na*nb/(na+nb) and
/// lambda = (sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) * d_n.
double ks_asymptotic_p(double d_n, std::size_t na, std::size_t nb);

/// W_1 = integral of |F_a - F_b| over the merged support, exact piecewise.
double wasserstein1(const std::vector<double>& a, const std::vector<double>& b);

struct PairPower {
  int cluster_a = 0;
  int cluster_b = 0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double d_n = 0.0;
  double p_value = 1.0;
  double w1 = 0.0;
};

struct PowerReport {
  std::vector<PairPower> pairs;  // every eligible cluster pair, ordered
  PairPower max_pair;            // largest d_n
  PairPower min_pair;            // smallest d_n
  std::vector<int> excluded_clusters;  // fewer than 2 members
  std::vector<std::string> warnings;
};

/// Pairwise KS statistic and W_1 between the clusters' d_robot distributions.
/// Fewer than 2 eligible clusters is an InsufficientClusters error.
PowerReport discriminatory_power(const std::vector<int>& labels,
                                 const std::vector<double>& d_robot);

struct KReportRow {
  int k = 0;
  double inertia = 0.0;
  int iterations = 0;
  std::uint64_t restart_seed = 0;
  std::vector<int> labels;
  bool power_available = false;
  std::optional<PowerReport> power;
  std::string power_note;  // reason when unavailable
};

struct KSelection {
  int best_k = 0;
  bool any_power_available = false;
  bool non_discriminative = false;  // every max d_n is (numerically) zero
  std::vector<KReportRow> per_k;
};

/// Best-of-restarts K-means per k (restart seeds derived from seed, k,
/// restart), scored by the maximum pairwise KS statistic of d_robot across
/// clusters. best_k maximizes that score; ties break toward smaller k.
KSelection select_k(const FeatureMatrix& prepared, const std::vector<double>& d_robot,
                    std::pair<int, int> k_range, std::uint64_t seed, int restarts = 10);

struct PartitionComparison {
  std::optional<PowerReport> power_a;
  std::optional<PowerReport> power_b;
  std::string power_a_note;
  std::string power_b_note;
  std::vector<int> labels_a_values;  // sorted distinct labels of each side
  std::vector<int> labels_b_values;
  std::vector<std::vector<std::size_t>> counts;  // [a_index][b_index]
  std::vector<std::vector<double>> row_ratios;   // counts normalized per a row
};

/// Discriminatory power of two partitions of the same rows plus their
/// cross-tabulation. Label vectors must have equal length.
PartitionComparison compare_partitions(const std::vector<int>& labels_a,
                                       const std::vector<int>& labels_b,
                                       const std::vector<double>& d_robot);

}  // namespace encounter::analytics
