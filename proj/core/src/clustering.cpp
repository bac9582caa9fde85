#include "mediabar/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mediabar/error.hpp"
#include "mediabar/rng.hpp"

namespace mediabar {

namespace {

void check_k(const FeatureMatrix& features, int k) {
  features.validate();
  if (k < 2) throw Error(ErrorKind::Precondition, "kmeans: k must be >= 2, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > features.size()) {
    throw Error(ErrorKind::Precondition, "kmeans: k=" + std::to_string(k) + " exceeds the " +
                                             std::to_string(features.size()) + " available points");
  }
}

int nearest_center(std::span<const double> x, const std::vector<double>& centers, std::size_t dims, int k,
                   double* best_dist = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < k; ++c) {
    const double d = squared_distance(x, {centers.data() + static_cast<std::size_t>(c) * dims, dims});
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_dist) *best_dist = best_d;
  return best;
}

}  // namespace

std::vector<std::size_t> kmeanspp_init(const FeatureMatrix& features, int k, std::uint64_t seed) {
  check_k(features, k);
  const std::size_t n = features.size();
  SplitMix64 rng(seed);
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(n, false);
  chosen.push_back(rng.index(n));
  taken[chosen.back()] = true;

  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < static_cast<std::size_t>(k)) {
    const auto last = features.row(chosen.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(features.row(i), last));
      total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        cum += d2[i];
        if (cum > u) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      // Every point coincides with a chosen center: draw among the unchosen rows.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) free.push_back(i);
      }
      pick = free[rng.index(free.size())];
    }
    chosen.push_back(pick);
    taken[pick] = true;
  }
  return chosen;
}

double compute_wcss(const FeatureMatrix& features, const std::vector<int>& assignments,
                    const std::vector<double>& centers) {
  double w = 0.0;
  const std::size_t dims = features.dims;
  for (std::size_t i = 0; i < features.size(); ++i) {
    w += squared_distance(features.row(i),
                          {centers.data() + static_cast<std::size_t>(assignments[i]) * dims, dims});
  }
  return w;
}

ClusterModel kmeans_from_centers(const FeatureMatrix& features, std::vector<double> centers,
                                 const KMeansOptions& options) {
  const std::size_t n = features.size();
  const std::size_t dims = features.dims;
  if (dims == 0 || centers.size() % dims != 0) {
    throw Error(ErrorKind::Precondition, "kmeans: center matrix does not match feature dimension");
  }
  const int k = static_cast<int>(centers.size() / dims);
  check_k(features, k);

  ClusterModel model;
  model.k = k;
  model.dims = dims;
  model.assignments.assign(n, 0);
  std::vector<double> dist(n);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k));
  double prev = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= options.max_iters; ++iter) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      model.assignments[i] = nearest_center(features.row(i), centers, dims, k, &dist[i]);
      ++counts[static_cast<std::size_t>(model.assignments[i])];
    }
    // Reseed each empty cluster at the point farthest from its current center.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(model.assignments[i])] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      --counts[static_cast<std::size_t>(model.assignments[far])];
      model.assignments[far] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      dist[far] = 0.0;
      std::copy_n(features.row(far).begin(), dims, centers.begin() + static_cast<std::ptrdiff_t>(c * dims));
    }

    std::fill(centers.begin(), centers.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* c = centers.data() + static_cast<std::size_t>(model.assignments[i]) * dims;
      const auto x = features.row(i);
      for (std::size_t d = 0; d < dims; ++d) c[d] += x[d];
    }
    for (int c = 0; c < k; ++c) {
      const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      for (std::size_t d = 0; d < dims; ++d) centers[static_cast<std::size_t>(c) * dims + d] *= inv;
    }

    const double wcss = compute_wcss(features, model.assignments, centers);
    model.iterations = iter;
    if (std::isfinite(prev)) {
      if (wcss > prev + 1e-10 * std::max(prev, 1.0)) {
        throw std::logic_error("kmeans: Lloyd iteration increased wcss from " + std::to_string(prev) + " to " +
                               std::to_string(wcss));
      }
      const double rel = (prev - wcss) / std::max(prev, std::numeric_limits<double>::min());
      prev = wcss;
      if (rel < options.rel_tol) break;
    } else {
      prev = wcss;
    }
  }
  model.centers = std::move(centers);
  model.wcss = compute_wcss(features, model.assignments, model.centers);
  return model;
}

ClusterModel kmeans(const FeatureMatrix& features, int k, std::uint64_t seed, const KMeansOptions& options) {
  const std::vector<std::size_t> init = kmeanspp_init(features, k, seed);
  std::vector<double> centers;
  centers.reserve(init.size() * features.dims);
  for (std::size_t idx : init) {
    const auto r = features.row(idx);
    centers.insert(centers.end(), r.begin(), r.end());
  }
  ClusterModel m = kmeans_from_centers(features, std::move(centers), options);
  m.seed = seed;
  return m;
}

double silhouette_score(const FeatureMatrix& features, const std::vector<int>& assignments) {
  const std::size_t n = features.size();
  if (assignments.size() != n) throw Error(ErrorKind::Precondition, "silhouette: assignment count mismatch");
  int k = 0;
  for (int a : assignments) {
    if (a < 0) throw Error(ErrorKind::Precondition, "silhouette: negative cluster index");
    k = std::max(k, a + 1);
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  const auto present = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
  if (present < 2) throw Error(ErrorKind::Precondition, "silhouette: need at least 2 non-empty clusters");

  double total = 0.0;
  std::vector<double> sum(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[static_cast<std::size_t>(assignments[j])] += std::sqrt(squared_distance(features.row(i), features.row(j)));
    }
    const auto own = static_cast<std::size_t>(assignments[i]);
    if (sizes[own] == 1) continue;  // s(i) = 0
    const double a = sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, sum[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

int elbow_k(const std::vector<ElbowPoint>& candidates) {
  if (candidates.size() < 3) throw Error(ErrorKind::Precondition, "elbow_k: need at least 3 candidates");
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].k <= candidates[i - 1].k) {
      throw Error(ErrorKind::Precondition, "elbow_k: k values must be strictly increasing");
    }
  }
  const double k0 = candidates.front().k;
  const double k_span = candidates.back().k - k0;
  auto [lo_it, hi_it] = std::minmax_element(candidates.begin(), candidates.end(),
                                            [](const ElbowPoint& a, const ElbowPoint& b) { return a.wcss < b.wcss; });
  const double w_lo = lo_it->wcss;
  const double w_span = hi_it->wcss - w_lo;
  auto scaled = [&](const ElbowPoint& p) {
    return std::pair{(p.k - k0) / k_span, w_span > 0.0 ? (p.wcss - w_lo) / w_span : 0.0};
  };
  const auto [x0, y0] = scaled(candidates.front());
  const auto [x1, y1] = scaled(candidates.back());
  const double dx = x1 - x0, dy = y1 - y0;
  const double chord = std::hypot(dx, dy);

  int best_k = candidates[1].k;
  double best = -1.0;
  for (std::size_t i = 1; i + 1 < candidates.size(); ++i) {
    const auto [x, y] = scaled(candidates[i]);
    const double d = std::abs(dx * (y0 - y) - dy * (x0 - x)) / chord;
    if (d > best + 1e-12) {
      best = d;
      best_k = candidates[i].k;
    }
  }
  return best_k;
}

namespace {

// Adds the point farthest from its center as a new center.
std::vector<double> split_worst(const FeatureMatrix& features, const ClusterModel& model) {
  std::size_t worst = 0;
  double worst_d = -1.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double d = squared_distance(features.row(i), model.center(model.assignments[i]));
    if (d > worst_d) {
      worst_d = d;
      worst = i;
    }
  }
  std::vector<double> centers = model.centers;
  const auto r = features.row(worst);
  centers.insert(centers.end(), r.begin(), r.end());
  return centers;
}

ClusterModel single_cluster(const FeatureMatrix& features) {
  ClusterModel m;
  m.k = 1;
  m.dims = features.dims;
  m.assignments.assign(features.size(), 0);
  m.centers.assign(features.dims, 0.0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto r = features.row(i);
    for (std::size_t d = 0; d < features.dims; ++d) m.centers[d] += r[d];
  }
  for (double& c : m.centers) c /= static_cast<double>(features.size());
  m.wcss = compute_wcss(features, m.assignments, m.centers);
  return m;
}

}  // namespace

ChooseKResult choose_k(const FeatureMatrix& features, std::uint64_t seed, const ChooseKOptions& options) {
  features.validate();
  if (options.k_min < 2 || options.k_max < options.k_min) {
    throw Error(ErrorKind::Precondition, "choose_k: need 2 <= k_min <= k_max");
  }
  if (static_cast<std::size_t>(options.k_max) > features.size()) {
    throw Error(ErrorKind::Precondition, "choose_k: k_max=" + std::to_string(options.k_max) + " exceeds the " +
                                             std::to_string(features.size()) + " available points");
  }
  if (options.restarts < 1) throw Error(ErrorKind::Precondition, "choose_k: restarts must be >= 1");

  ChooseKResult result;
  std::vector<ClusterModel> kept;
  ClusterModel previous = options.k_min == 2 ? single_cluster(features) : ClusterModel{};
  for (int k = options.k_min; k <= options.k_max; ++k) {
    std::optional<ClusterModel> best;
    for (int r = 0; r < options.restarts; ++r) {
      ClusterModel m = kmeans(features, k, derive_seed(seed, static_cast<std::uint64_t>(r)), options.kmeans);
      if (!best || m.wcss < best->wcss) best = std::move(m);
    }
    if (previous.k == k - 1) {
      ClusterModel split = kmeans_from_centers(features, split_worst(features, previous), options.kmeans);
      split.seed = seed;
      if (split.wcss < best->wcss) best = std::move(split);
    }
    best->silhouette = silhouette_score(features, best->assignments);
    result.selection.candidates.push_back({k, best->wcss, best->silhouette});
    previous = *best;
    kept.push_back(std::move(*best));
  }

  std::size_t chosen = 0;
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (kept[i].silhouette > kept[chosen].silhouette) chosen = i;
  }
  result.selection.chosen_k = kept[chosen].k;
  if (result.selection.candidates.size() >= 3) {
    std::vector<ElbowPoint> pts;
    for (const KCandidate& c : result.selection.candidates) pts.push_back({c.k, c.wcss});
    result.selection.elbow_k = elbow_k(pts);
  }

  std::ostringstream rule;
  rule << "chosen_k=" << result.selection.chosen_k << " maximizes silhouette (ties -> smaller k); ";
  if (result.selection.elbow_k) {
    rule << "elbow_k=" << *result.selection.elbow_k << " (advisory)";
    if (*result.selection.elbow_k != result.selection.chosen_k) rule << "; silhouette and elbow disagree";
  } else {
    rule << "elbow_k unavailable (fewer than 3 candidates)";
  }
  result.selection.rule = rule.str();
  result.model = std::move(kept[chosen]);
  return result;
}

}  // namespace mediabar
