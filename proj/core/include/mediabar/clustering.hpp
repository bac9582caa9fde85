#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mediabar/feature_matrix.hpp"

namespace mediabar {

struct ClusterModel {
  int k = 0;
  std::vector<int> assignments;  // per row of the feature matrix
  std::vector<double> centers;   // k x D row-major
  std::size_t dims = 0;
  double wcss = 0.0;
  double silhouette = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;

  std::span<const double> center(int c) const {
    return {centers.data() + static_cast<std::size_t>(c) * dims, dims};
  }
};

struct KMeansOptions {
  int max_iters = 300;
  double rel_tol = 1e-6;
};

/// Seeded K-means++ followed by Lloyd iterations. Throws std::logic_error if
/// an iteration ever increases the objective.
ClusterModel kmeans(const FeatureMatrix& features, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// Lloyd iterations from the given k x D initial centers.
ClusterModel kmeans_from_centers(const FeatureMatrix& features, std::vector<double> centers,
                                 const KMeansOptions& options = {});

/// K-means++ seeding only (row indices of the chosen centers).
std::vector<std::size_t> kmeanspp_init(const FeatureMatrix& features, int k, std::uint64_t seed);

double compute_wcss(const FeatureMatrix& features, const std::vector<int>& assignments,
                    const std::vector<double>& centers);

/// Mean silhouette with Euclidean distance; s(i) = 0 for singletons and when a = b = 0.
double silhouette_score(const FeatureMatrix& features, const std::vector<int>& assignments);

struct ElbowPoint {
  int k = 0;
  double wcss = 0.0;
};

/// Max distance to the chord through the first and last points after scaling
/// both axes to [0,1]; interior candidates only, ties to the smaller k.
int elbow_k(const std::vector<ElbowPoint>& candidates);

struct KCandidate {
  int k = 0;
  double wcss = 0.0;
  double silhouette = 0.0;
};

struct KSelection {
  std::vector<KCandidate> candidates;
  int chosen_k = 0;
  std::optional<int> elbow_k;
  std::string rule;
};

struct ChooseKOptions {
  int k_min = 2;
  int k_max = 10;
  int restarts = 8;
  KMeansOptions kmeans;
};

struct ChooseKResult {
  KSelection selection;
  ClusterModel model;
};

/// Best-of-restarts K-means for every k in range (plus a split of the best
/// (k-1) model, which keeps the kept wcss non-increasing in k); chosen_k
/// maximizes silhouette, elbow reported alongside.
ChooseKResult choose_k(const FeatureMatrix& features, std::uint64_t seed, const ChooseKOptions& options = {});

}  // namespace mediabar
