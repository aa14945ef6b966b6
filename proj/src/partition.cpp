#include "sfv/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sfv {

namespace {

Matrix member_means(const Matrix& points,
                    const std::vector<std::vector<int>>& members) {
  Matrix means(static_cast<Eigen::Index>(members.size()), points.cols());
  for (std::size_t j = 0; j < members.size(); ++j) {
    Vector sum = Vector::Zero(points.cols());
    for (int i : members[j]) sum += points.row(i).transpose();
    means.row(static_cast<Eigen::Index>(j)) =
        sum.transpose() / static_cast<Real>(members[j].size());
  }
  return means;
}

std::vector<std::vector<int>> build_members(const std::vector<int>& assignment,
                                            int n_clusters) {
  std::vector<std::vector<int>> members(
      static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < assignment.size(); ++i)
    members[static_cast<std::size_t>(assignment[i])].push_back(
        static_cast<int>(i));
  return members;
}

}  // namespace

Standardizer Standardizer::fit(const Matrix& samples) {
  const auto n = samples.rows();
  Standardizer s;
  s.mean = samples.colwise().mean();
  s.scale = Vector::Ones(samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const Real var =
        (samples.col(j).array() - s.mean[j]).square().sum() / Real(n);
    if (var > 0) s.scale[j] = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& samples) const {
  Matrix z = samples;
  z.rowwise() -= mean.transpose();
  z.array().rowwise() /= scale.transpose().array();
  return z;
}

Partition kmeans_partition(const SampleSet& samples, int k, std::uint64_t seed,
                           int max_iter, std::vector<Real>* objective_trace,
                           KMeansInit init) {
  const int n = samples.size();
  if (k < 1 || k > n)
    throw std::invalid_argument("kmeans_partition: need 1 <= k <= N");
  if (max_iter < 1)
    throw std::invalid_argument("kmeans_partition: max_iter must be >= 1");
  if (objective_trace) objective_trace->clear();

  Partition part;
  part.method = "kmeans";

  if (k == n) {  // singleton limit, every sample its own cell
    part.assignment.resize(static_cast<std::size_t>(n));
    std::iota(part.assignment.begin(), part.assignment.end(), 0);
    part.n_clusters = n;
    part.members = build_members(part.assignment, n);
    part.centroids = samples.values;
    if (objective_trace) objective_trace->push_back(0);
    return part;
  }

  const Matrix z = Standardizer::fit(samples.values).apply(samples.values);
  const Vector row_sq = z.rowwise().squaredNorm();
  Rng rng(seed);

  Matrix centroids(k, z.cols());
  if (init == KMeansInit::Random) {
    // k distinct samples, drawn by a partial Fisher-Yates shuffle.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int c = 0; c < k; ++c) {
      const int j = c + std::min<int>(n - 1 - c,
                                      static_cast<int>(uniform01(rng) *
                                                       static_cast<Real>(n - c)));
      std::swap(order[static_cast<std::size_t>(c)],
                order[static_cast<std::size_t>(j)]);
      centroids.row(c) = z.row(order[static_cast<std::size_t>(c)]);
    }
  } else {
    // k-means++: next centre drawn with probability proportional to the
    // squared distance to the nearest chosen centre.
    const int first = std::min<int>(
        n - 1, static_cast<int>(uniform01(rng) * static_cast<Real>(n)));
    centroids.row(0) = z.row(first);
    Vector d2 =
        (z.rowwise() - z.row(first)).rowwise().squaredNorm();
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    used[static_cast<std::size_t>(first)] = 1;
    for (int c = 1; c < k; ++c) {
      const Real total = d2.sum();
      int pick = -1;
      if (total > 0) {
        const Real r = uniform01(rng) * total;
        Real acc = 0;
        for (int i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc > r) {
            pick = i;
            break;
          }
        }
        if (pick < 0) pick = n - 1;
      } else {
        // all remaining points coincide with a centre; take the first unused
        for (int i = 0; i < n; ++i)
          if (!used[static_cast<std::size_t>(i)]) {
            pick = i;
            break;
          }
      }
      used[static_cast<std::size_t>(pick)] = 1;
      centroids.row(c) = z.row(pick);
      d2 = d2.cwiseMin(
          (z.rowwise() - z.row(pick)).rowwise().squaredNorm());
    }
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  std::vector<int> previous;
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment step; minCoeff resolves ties to the lowest index.
    Matrix dist = -2.0 * z * centroids.transpose();
    dist.colwise() += row_sq;
    dist.rowwise() += centroids.rowwise().squaredNorm().transpose();
    for (int i = 0; i < n; ++i) {
      Eigen::Index best;
      dist.row(i).minCoeff(&best);
      assignment[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }

    const int k_now = static_cast<int>(centroids.rows());
    std::vector<int> counts(static_cast<std::size_t>(k_now), 0);
    for (int a : assignment) ++counts[static_cast<std::size_t>(a)];

    // Drop clusters that lost every member and compact the indices.
    std::vector<int> remap(static_cast<std::size_t>(k_now), -1);
    int kept = 0;
    for (int c = 0; c < k_now; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        remap[static_cast<std::size_t>(c)] = kept++;
    const bool dropped = kept != k_now;
    if (dropped)
      for (int& a : assignment) a = remap[static_cast<std::size_t>(a)];

    // Update step: centroids become member means.
    Matrix sums = Matrix::Zero(kept, z.cols());
    std::vector<int> kept_counts(static_cast<std::size_t>(kept), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assignment[static_cast<std::size_t>(i)]) += z.row(i);
      ++kept_counts[static_cast<std::size_t>(
          assignment[static_cast<std::size_t>(i)])];
    }
    centroids.resize(kept, z.cols());
    for (int c = 0; c < kept; ++c)
      centroids.row(c) =
          sums.row(c) / static_cast<Real>(kept_counts[static_cast<std::size_t>(c)]);

    if (objective_trace) {
      Real wcss = 0;
      for (int i = 0; i < n; ++i)
        wcss += (z.row(i) -
                 centroids.row(assignment[static_cast<std::size_t>(i)]))
                    .squaredNorm();
      objective_trace->push_back(wcss);
    }

    if (!dropped && assignment == previous) break;
    previous = assignment;
  }

  part.assignment = assignment;
  part.n_clusters = static_cast<int>(centroids.rows());
  part.members = build_members(assignment, part.n_clusters);
  part.centroids = member_means(samples.values, part.members);
  return part;
}

Partition tensor_partition(const SampleSet& samples,
                           const std::vector<int>& bins_per_dim) {
  const int n = samples.size();
  const int d = samples.dim();
  if (static_cast<int>(bins_per_dim.size()) != d)
    throw std::invalid_argument(
        "tensor_partition: one bin count per dimension required");
  long total_cells = 1;
  for (int b : bins_per_dim) {
    if (b < 1)
      throw std::invalid_argument("tensor_partition: bin counts must be >= 1");
    total_cells *= b;
    if (total_cells > 1'000'000)
      throw std::invalid_argument(
          "tensor_partition: more than 10^6 candidate cells");
  }

  const Vector lo = samples.values.colwise().minCoeff();
  const Vector hi = samples.values.colwise().maxCoeff();

  std::vector<long> linear(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    long id = 0;
    for (int j = 0; j < d; ++j) {
      const int b = bins_per_dim[static_cast<std::size_t>(j)];
      int bin = 0;
      if (hi[j] > lo[j]) {
        const Real w = (hi[j] - lo[j]) / static_cast<Real>(b);
        bin = std::min<int>(
            b - 1, static_cast<int>((samples.values(i, j) - lo[j]) / w));
      }
      id = id * b + bin;
    }
    linear[static_cast<std::size_t>(i)] = id;
  }

  std::map<long, int> cell_to_cluster;  // ordered, so ids are deterministic
  for (long id : linear) cell_to_cluster.emplace(id, 0);
  int next = 0;
  for (auto& [id, cluster] : cell_to_cluster) cluster = next++;

  Partition part;
  part.method = "tensor";
  part.assignment.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    part.assignment[static_cast<std::size_t>(i)] =
        cell_to_cluster.at(linear[static_cast<std::size_t>(i)]);
  part.n_clusters = next;
  part.members = build_members(part.assignment, next);
  part.centroids = member_means(samples.values, part.members);
  return part;
}

Vector cluster_weights(const Partition& partition, int n_samples) {
  if (n_samples < 1)
    throw std::invalid_argument("cluster_weights: need n_samples >= 1");
  long covered = 0;
  for (const auto& m : partition.members) covered += static_cast<long>(m.size());
  if (covered != n_samples)
    throw std::invalid_argument(
        "cluster_weights: partition covers " + std::to_string(covered) +
        " samples, expected " + std::to_string(n_samples));
  Vector w(static_cast<Eigen::Index>(partition.members.size()));
  for (std::size_t j = 0; j < partition.members.size(); ++j)
    w[static_cast<Eigen::Index>(j)] =
        static_cast<Real>(partition.members[j].size()) /
        static_cast<Real>(n_samples);
  return w;
}

Real indicator_sigma(long m_k, long n) {
  if (n < 2) throw std::invalid_argument("indicator_sigma: need N >= 2");
  if (m_k < 0 || m_k > n)
    throw std::invalid_argument("indicator_sigma: need 0 <= m_k <= N");
  const Real num = static_cast<Real>(n - m_k) * static_cast<Real>(m_k);
  return std::sqrt(num / (static_cast<Real>(n) * static_cast<Real>(n - 1)));
}

Vector cluster_radius(const Partition& partition, const SampleSet& samples) {
  const Matrix z = Standardizer::fit(samples.values).apply(samples.values);
  Vector radius = Vector::Zero(partition.n_clusters);
  const Matrix centres = member_means(z, partition.members);
  for (int j = 0; j < partition.n_clusters; ++j)
    for (int i : partition.members[static_cast<std::size_t>(j)])
      radius[j] = std::max(radius[j], (z.row(i) - centres.row(j)).norm());
  return radius;
}

ClusterStats compute_cluster_stats(const Partition& partition,
                                   const SampleSet& samples) {
  const int n = samples.size();
  ClusterStats stats;
  stats.weight = cluster_weights(partition, n);
  stats.count.reserve(partition.members.size());
  stats.sigma.resize(partition.n_clusters);
  for (int j = 0; j < partition.n_clusters; ++j) {
    const auto m =
        static_cast<long>(partition.members[static_cast<std::size_t>(j)].size());
    stats.count.push_back(static_cast<int>(m));
    stats.sigma[j] = indicator_sigma(m, n);
  }
  stats.radius = cluster_radius(partition, samples);
  return stats;
}

}  // namespace sfv
