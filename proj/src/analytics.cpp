#include "encounter/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "encounter/rng.hpp"

namespace encounter::analytics {

namespace {

constexpr double kSigmaFloor = 1e-12;

void require_nonempty(const std::vector<double>& v, const char* name) {
  if (v.empty()) raise(ErrorCode::InsufficientData, std::string(name) + ": empty sample");
}

}  // namespace

void FeatureMatrix::validate() const {
  if (static_cast<std::size_t>(values.cols()) != column_names.size())
    raise(ErrorCode::InvalidArgument, "feature matrix: column name count mismatch");
  if (!row_ids.empty() && row_ids.size() != static_cast<std::size_t>(values.rows()))
    raise(ErrorCode::InvalidArgument, "feature matrix: row id count mismatch");
  std::set<std::string> unique(column_names.begin(), column_names.end());
  if (unique.size() != column_names.size())
    raise(ErrorCode::InvalidArgument, "feature matrix: duplicate column names");
  if (!values.allFinite())
    raise(ErrorCode::InvalidArgument, "feature matrix: non-finite entries");
}

ZScoreParams zscore_fit(const FeatureMatrix& m) {
  m.validate();
  const auto n = m.values.rows();
  if (n < 2) raise(ErrorCode::InsufficientData, "z-score needs at least 2 rows");

  ZScoreParams params;
  params.mu = m.values.colwise().mean();
  params.sigma.resize(m.values.cols());
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
    double ss = (m.values.col(c).array() - params.mu(c)).square().sum();
    params.sigma(c) = std::sqrt(ss / static_cast<double>(n - 1));
    if (params.sigma(c) < kSigmaFloor) params.constant_columns.push_back(static_cast<int>(c));
  }
  return params;
}

FeatureMatrix zscore_apply(const FeatureMatrix& m, const ZScoreParams& params,
                           std::vector<std::string>* warnings) {
  m.validate();
  if (params.mu.size() != m.values.cols())
    raise(ErrorCode::InvalidArgument, "z-score params do not match matrix columns");

  FeatureMatrix out{m.column_names, m.row_ids, m.values};
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
    if (params.sigma(c) < kSigmaFloor) {
      out.values.col(c).setZero();
      if (warnings)
        warnings->push_back("column '" + m.column_names[static_cast<std::size_t>(c)] +
                            "' is constant; normalized to zeros");
    } else {
      out.values.col(c) = (m.values.col(c).array() - params.mu(c)) / params.sigma(c);
    }
  }
  return out;
}

PcaModel pca_fit(const FeatureMatrix& m, int components) {
  m.validate();
  const auto n = m.values.rows();
  const auto d = m.values.cols();
  if (n < 2) raise(ErrorCode::InsufficientData, "PCA needs at least 2 rows");
  if (components < 1 || components > d)
    raise(ErrorCode::InvalidArgument, "PCA component count out of range");

  PcaModel model;
  model.mean = m.values.colwise().mean();
  Eigen::MatrixXd centered = m.values.rowwise() - model.mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    raise(ErrorCode::Internal, "eigendecomposition failed");

  // Eigen reports eigenvalues ascending; take the top `components` reversed.
  model.components.resize(d, components);
  model.explained_variance.resize(components);
  for (int j = 0; j < components; ++j) {
    Eigen::Index src = d - 1 - j;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    model.components.col(j) = v;
    model.explained_variance(j) = std::max(solver.eigenvalues()(src), 0.0);
  }
  return model;
}

FeatureMatrix pca_transform(const FeatureMatrix& m, const PcaModel& model) {
  m.validate();
  if (m.values.cols() != model.components.rows())
    raise(ErrorCode::InvalidArgument, "PCA model does not match matrix columns");

  FeatureMatrix out;
  out.row_ids = m.row_ids;
  for (Eigen::Index j = 0; j < model.components.cols(); ++j)
    out.column_names.push_back("PC_" + std::to_string(j));
  out.values = (m.values.rowwise() - model.mean.transpose()) * model.components;
  return out;
}

namespace {

double clustering_inertia(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids,
                          const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    total += (data.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

void assign_nearest(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids,
                    std::vector<int>& labels) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
      double d = (data.row(i) - centroids.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
  }
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& data, int k, Rng& rng) {
  const auto n = data.rows();
  Eigen::MatrixXd centroids(k, data.cols());
  std::vector<double> dist_sq(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());

  Eigen::Index first = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n)));
  centroids.row(0) = data.row(first);
  for (int j = 1; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = (data.row(i) - centroids.row(j - 1)).squaredNorm();
      auto ui = static_cast<std::size_t>(i);
      if (d < dist_sq[ui]) dist_sq[ui] = d;
    }
    centroids.row(j) = data.row(static_cast<Eigen::Index>(rng.weighted_index(dist_sq)));
  }
  return centroids;
}

}  // namespace

Clustering kmeans(const FeatureMatrix& m, int k, std::uint64_t seed, int max_iter, double tol,
                  std::vector<double>* inertia_trace) {
  m.validate();
  const auto n = m.values.rows();
  if (k < 1) raise(ErrorCode::InvalidK, "k must be at least 1");
  if (static_cast<Eigen::Index>(k) > n)
    raise(ErrorCode::InvalidK,
          "k = " + std::to_string(k) + " exceeds row count " + std::to_string(n));

  Rng rng(seed);
  Eigen::MatrixXd centroids = kmeanspp_init(m.values, k, rng);
  std::vector<int> labels(static_cast<std::size_t>(n), 0);

  double prev_inertia = std::numeric_limits<double>::infinity();
  int iterations = 0;
  while (iterations < max_iter) {
    ++iterations;
    assign_nearest(m.values, centroids, labels);

    // Re-seed empty clusters to the point farthest from its assigned centroid
    // (stealing only from clusters that keep at least one member).
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      double worst = -1.0;
      Eigen::Index pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        auto ui = static_cast<std::size_t>(i);
        if (counts[static_cast<std::size_t>(labels[ui])] <= 1) continue;
        double d = (m.values.row(i) - centroids.row(labels[ui])).squaredNorm();
        if (d > worst) {
          worst = d;
          pick = i;
        }
      }
      if (pick < 0) continue;
      auto up = static_cast<std::size_t>(pick);
      --counts[static_cast<std::size_t>(labels[up])];
      labels[up] = j;
      counts[static_cast<std::size_t>(j)] = 1;
      centroids.row(j) = m.values.row(pick);
    }

    double inertia = clustering_inertia(m.values, centroids, labels);
    if (inertia_trace) inertia_trace->push_back(inertia);
    if (inertia > prev_inertia + 1e-9 * std::max(1.0, prev_inertia))
      raise(ErrorCode::Internal, "k-means inertia increased across iterations");
    prev_inertia = inertia;

    Eigen::MatrixXd updated = Eigen::MatrixXd::Zero(k, m.values.cols());
    std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      updated.row(labels[static_cast<std::size_t>(i)]) += m.values.row(i);
      sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1.0;
    }
    double movement = 0.0;
    for (int j = 0; j < k; ++j) {
      if (sizes[static_cast<std::size_t>(j)] > 0.0)
        updated.row(j) /= sizes[static_cast<std::size_t>(j)];
      else
        updated.row(j) = centroids.row(j);
      movement = std::max(movement, (updated.row(j) - centroids.row(j)).norm());
    }
    centroids = std::move(updated);
    if (movement < tol) break;
  }

  // Final assignment so labels satisfy the nearest-centroid property exactly.
  assign_nearest(m.values, centroids, labels);

  Clustering result;
  result.k = k;
  result.centroids = std::move(centroids);
  result.labels = std::move(labels);
  result.inertia = clustering_inertia(m.values, result.centroids, result.labels);
  result.seed = seed;
  result.iterations = iterations;
  return result;
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  require_nonempty(sorted_, "ecdf");
  for (double v : sorted_)
    if (!std::isfinite(v)) raise(ErrorCode::InvalidArgument, "ecdf: non-finite value");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  require_nonempty(a, "ks_two_sample");
  require_nonempty(b, "ks_two_sample");

  std::vector<double> sa(a), sb(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double v;
    if (i < sa.size() && j < sb.size())
      v = std::min(sa[i], sb[j]);
    else
      v = i < sa.size() ? sa[i] : sb[j];
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_asymptotic_p(d, sa.size(), sb.size())};
}

double ks_asymptotic_p(double d_n, std::size_t na, std::size_t nb) {
  if (na == 0 || nb == 0) raise(ErrorCode::InsufficientData, "ks p-value: empty sample");
  if (d_n <= 0.0) return 1.0;

  double n_eff = static_cast<double>(na) * static_cast<double>(nb) /
                 static_cast<double>(na + nb);
  double sq = std::sqrt(n_eff);
  double lambda = (sq + 0.12 + 0.11 / sq) * d_n;

  // Q(lambda) = 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2); the series is
  // treated as 1 when it fails to converge (lambda near 0).
  const double a2 = -2.0 * lambda * lambda;
  double sum = 0.0, fac = 2.0, prev_term = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = fac * std::exp(a2 * j * j);
    sum += term;
    if (std::fabs(term) <= 0.001 * prev_term || std::fabs(term) <= 1e-12 * sum)
      return std::clamp(sum, 0.0, 1.0);
    fac = -fac;
    prev_term = std::fabs(term);
  }
  return 1.0;
}

double wasserstein1(const std::vector<double>& a, const std::vector<double>& b) {
  require_nonempty(a, "wasserstein1");
  require_nonempty(b, "wasserstein1");

  std::vector<double> sa(a), sb(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double total = 0.0;
  double prev = std::min(sa.front(), sb.front());
  while (i < sa.size() || j < sb.size()) {
    double v;
    if (i < sa.size() && j < sb.size())
      v = std::min(sa[i], sb[j]);
    else
      v = i < sa.size() ? sa[i] : sb[j];
    total += std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (v - prev);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    prev = v;
  }
  return total;
}

PowerReport discriminatory_power(const std::vector<int>& labels,
                                 const std::vector<double>& d_robot) {
  if (labels.size() != d_robot.size())
    raise(ErrorCode::InvalidArgument, "labels and d_robot lengths differ");

  std::map<int, std::vector<double>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(d_robot[i]);

  PowerReport report;
  std::vector<int> eligible;
  for (const auto& [label, values] : groups) {
    if (values.size() >= 2) {
      eligible.push_back(label);
    } else {
      report.excluded_clusters.push_back(label);
      report.warnings.push_back("cluster " + std::to_string(label) +
                                " excluded from KS comparison (fewer than 2 members)");
    }
  }
  if (eligible.size() < 2)
    raise(ErrorCode::InsufficientClusters,
          "need at least 2 clusters with 2+ members for discriminatory power");

  for (std::size_t x = 0; x < eligible.size(); ++x) {
    for (std::size_t y = x + 1; y < eligible.size(); ++y) {
      const auto& va = groups[eligible[x]];
      const auto& vb = groups[eligible[y]];
      KsResult ks = ks_two_sample(va, vb);
      PairPower pair{eligible[x], eligible[y], va.size(), vb.size(),
                     ks.d_n,      ks.p_value,  wasserstein1(va, vb)};
      report.pairs.push_back(pair);
    }
  }

  report.max_pair = report.pairs.front();
  report.min_pair = report.pairs.front();
  for (const auto& p : report.pairs) {
    if (p.d_n > report.max_pair.d_n) report.max_pair = p;
    if (p.d_n < report.min_pair.d_n) report.min_pair = p;
  }
  return report;
}

KSelection select_k(const FeatureMatrix& prepared, const std::vector<double>& d_robot,
                    std::pair<int, int> k_range, std::uint64_t seed, int restarts) {
  prepared.validate();
  if (prepared.rows() != d_robot.size())
    raise(ErrorCode::InvalidArgument, "d_robot length does not match matrix rows");
  if (k_range.first < 1 || k_range.second < k_range.first)
    raise(ErrorCode::InvalidK, "invalid k range");
  if (static_cast<std::size_t>(k_range.second) > prepared.rows())
    raise(ErrorCode::InvalidK, "k range exceeds row count");
  if (restarts < 1) raise(ErrorCode::InvalidArgument, "restarts must be at least 1");

  KSelection sel;
  for (int k = k_range.first; k <= k_range.second; ++k) {
    std::optional<Clustering> best;
    std::uint64_t best_seed = 0;
    for (int r = 0; r < restarts; ++r) {
      std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(k),
                                     static_cast<std::uint64_t>(r));
      Clustering c = kmeans(prepared, k, rs);
      if (!best || c.inertia < best->inertia) {
        best_seed = rs;
        best = std::move(c);
      }
    }

    KReportRow row;
    row.k = k;
    row.inertia = best->inertia;
    row.iterations = best->iterations;
    row.restart_seed = best_seed;
    row.labels = best->labels;
    try {
      row.power = discriminatory_power(row.labels, d_robot);
      row.power_available = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientClusters) throw;
      row.power_available = false;
      row.power_note = e.what();
    }
    sel.per_k.push_back(std::move(row));
  }

  sel.best_k = 0;
  double best_dn = -1.0;
  for (const auto& row : sel.per_k) {
    if (!row.power_available) continue;
    sel.any_power_available = true;
    if (row.power->max_pair.d_n > best_dn) {  // ties keep the smaller k
      best_dn = row.power->max_pair.d_n;
      sel.best_k = row.k;
    }
  }
  if (!sel.any_power_available) sel.best_k = k_range.first;
  sel.non_discriminative = sel.any_power_available && best_dn <= 1e-12;
  return sel;
}

PartitionComparison compare_partitions(const std::vector<int>& labels_a,
                                       const std::vector<int>& labels_b,
                                       const std::vector<double>& d_robot) {
  if (labels_a.size() != labels_b.size() || labels_a.size() != d_robot.size())
    raise(ErrorCode::InvalidArgument, "partition label vectors must have equal length");

  PartitionComparison cmp;
  auto run_power = [&](const std::vector<int>& labels, std::optional<PowerReport>& out,
                       std::string& note) {
    try {
      out = discriminatory_power(labels, d_robot);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientClusters) throw;
      note = e.what();
    }
  };
  run_power(labels_a, cmp.power_a, cmp.power_a_note);
  run_power(labels_b, cmp.power_b, cmp.power_b_note);

  std::set<int> va(labels_a.begin(), labels_a.end());
  std::set<int> vb(labels_b.begin(), labels_b.end());
  cmp.labels_a_values.assign(va.begin(), va.end());
  cmp.labels_b_values.assign(vb.begin(), vb.end());

  auto index_of = [](const std::vector<int>& values, int label) {
    return static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(), label) - values.begin());
  };

  cmp.counts.assign(cmp.labels_a_values.size(),
                    std::vector<std::size_t>(cmp.labels_b_values.size(), 0));
  for (std::size_t i = 0; i < labels_a.size(); ++i)
    ++cmp.counts[index_of(cmp.labels_a_values, labels_a[i])]
                [index_of(cmp.labels_b_values, labels_b[i])];

  cmp.row_ratios.assign(cmp.labels_a_values.size(),
                        std::vector<double>(cmp.labels_b_values.size(), 0.0));
  for (std::size_t r = 0; r < cmp.counts.size(); ++r) {
    std::size_t row_total = 0;
    for (std::size_t c = 0; c < cmp.counts[r].size(); ++c) row_total += cmp.counts[r][c];
    if (row_total > 0)
      for (std::size_t c = 0; c < cmp.counts[r].size(); ++c)
        cmp.row_ratios[r][c] =
            static_cast<double>(cmp.counts[r][c]) / static_cast<double>(row_total);
  }
  return cmp;
}

}  // namespace encounter::analytics
