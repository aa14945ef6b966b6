#pragma once

#include "sfv/random_fields.hpp"

#include <string>
#include <vector>

namespace sfv {

/// Per-dimension z-score transform shared by clustering and radius
/// computations. Constant dimensions keep scale 1 so they contribute
/// nothing to distances.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& samples);
  Matrix apply(const Matrix& samples) const;
};

/// Assignment of samples to parameter-space cells. Clusters are non-empty
/// and cover all samples; centroids are member means in original units.
struct Partition {
  std::vector<int> assignment;             ///< per sample
  int n_clusters = 0;
  std::vector<std::vector<int>> members;   ///< per cluster, ascending
  Matrix centroids;                        ///< n_clusters x d
  std::string method;                      ///< "kmeans" or "tensor"
};

/// Per-cluster weight, member count, indicator standard deviation, and
/// radius (max member-centroid distance, standardized space).
struct ClusterStats {
  Vector weight;
  std::vector<int> count;
  Vector sigma;
  Vector radius;
};

enum class KMeansInit { PlusPlus, Random };

/// Lloyd's algorithm on standardized features, seeded by k-means++ or by a
/// plain uniform draw of k distinct samples. Deterministic for fixed
/// (samples, k, seed). Clusters that empty out are dropped. k == N
/// degenerates to the singleton partition. When given, objective_trace
/// receives the within-cluster sum of squares after each update step.
Partition kmeans_partition(const SampleSet& samples, int k,
                           std::uint64_t seed, int max_iter = 300,
                           std::vector<Real>* objective_trace = nullptr,
                           KMeansInit init = KMeansInit::PlusPlus);

/// Equal-width bins per dimension over the sample range; empty bins are
/// dropped. Guards against more than 10^6 candidate cells.
Partition tensor_partition(const SampleSet& samples,
                           const std::vector<int>& bins_per_dim);

/// W_j = m_j / N.
Vector cluster_weights(const Partition& partition, int n_samples);

/// sqrt((N - m_k) * m_k / (N * (N - 1))), the sample standard deviation of
/// the 0/1 cluster-membership indicator.
Real indicator_sigma(long m_k, long n);

/// Max member distance to the cluster mean, in standardized feature space.
Vector cluster_radius(const Partition& partition, const SampleSet& samples);

ClusterStats compute_cluster_stats(const Partition& partition,
                                   const SampleSet& samples);

}  // namespace sfv
