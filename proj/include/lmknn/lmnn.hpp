#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lmknn/dataset.hpp"
#include "lmknn/error.hpp"
#include "lmknn/linalg.hpp"

namespace lmknn {

/// Learned squared-distance parameterization: d²(a,b) = (a−b)ᵀ M (a−b)
/// with M symmetric positive semi-definite.
struct Metric {
  Matrix m;
  std::vector<std::string> feature_names;

  static Metric identity(std::vector<std::string> names) {
    Metric mt;
    mt.m = Matrix::identity(names.size());
    mt.feature_names = std::move(names);
    return mt;
  }

  std::size_t dimension() const { return m.rows(); }
};

struct TrainConfig {
  int k = 1;
  double mu = 0.1;
  double step = 0.01;
  int max_iterations = 10;
  std::uint64_t seed = 0;
  bool standardize = false;
  bool unweighted_pull = false;        // pull term weighted 1 instead of (1−μ)
  bool restrict_impostors = false; // impostors only from the k nearest of each point

  void validate() const {
    if (k < 1) throw invalid_argument("k must be >= 1");
    if (!(mu > 0.0 && mu < 1.0)) throw invalid_argument("mu must lie in (0, 1)");
    if (!(step > 0.0)) throw invalid_argument("step must be positive");
    if (max_iterations < 0) throw invalid_argument("max_iterations must be >= 0");
  }
};

/// targets[i] holds the same-class indices that should stay close to i,
/// fixed before training.
using TargetNeighborMap = std::vector<std::vector<int>>;

struct ActiveTriple {
  int i;
  int j;  // target neighbor of i
  int l;  // differently-labeled point inside the margin
};

inline double squared_distance(const Matrix& m, const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() != m.rows() || m.rows() != m.cols())
    throw shape_error("squared_distance: dimension mismatch");
  const std::size_t n = a.size();
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double dr = a[r] - b[r];
    if (dr == 0.0) continue;
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += m(r, c) * (a[c] - b[c]);
    total += dr * row;
  }
  return total;
}

inline double squared_distance(const Metric& metric, const std::vector<double>& a,
                               const std::vector<double>& b) {
  return squared_distance(metric.m, a, b);
}

/// C_ab = (a−b)(a−b)ᵀ, the rank-one gradient building block.
inline Matrix outer_difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw shape_error("outer_difference: dimension mismatch");
  const std::size_t n = a.size();
  Matrix c(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const double dr = a[r] - b[r];
    for (std::size_t s = 0; s < n; ++s) c(r, s) = dr * (a[s] - b[s]);
  }
  return c;
}

namespace detail {

inline void accumulate_outer_difference(Matrix& acc, const std::vector<double>& a,
                                        const std::vector<double>& b, double weight) {
  const std::size_t n = a.size();
  for (std::size_t r = 0; r < n; ++r) {
    const double dr = weight * (a[r] - b[r]);
    if (dr == 0.0) continue;
    for (std::size_t s = 0; s < n; ++s) acc(r, s) += dr * (a[s] - b[s]);
  }
}

inline double euclidean_sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

/// Pick each point's min(k, classmates) nearest same-class neighbors under
/// plain Euclidean distance. Chosen once, before any learning, and kept
/// fixed for the whole run.
inline TargetNeighborMap select_target_neighbors(const std::vector<LabeledInstance>& train,
                                                 int k) {
  if (k < 1) throw invalid_argument("select_target_neighbors: k must be >= 1");
  const std::size_t n = train.size();
  TargetNeighborMap targets(n);
  std::vector<std::pair<double, int>> same;
  for (std::size_t i = 0; i < n; ++i) {
    same.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || train[j].label != train[i].label) continue;
      same.emplace_back(detail::euclidean_sq(train[i].x, train[j].x), static_cast<int>(j));
    }
    std::sort(same.begin(), same.end());
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), same.size());
    targets[i].reserve(take);
    for (std::size_t t = 0; t < take; ++t) targets[i].push_back(same[t].second);
  }
  return targets;
}

/// max(0, 1 + d²(i,j) − d²(i,l)): how far the impostor l intrudes into
/// the unit margin around target-neighbor pair (i, j).
inline double hinge_loss(const Matrix& m, const std::vector<LabeledInstance>& train, int i,
                         int j, int l) {
  const auto& xi = train[static_cast<std::size_t>(i)];
  const auto& xj = train[static_cast<std::size_t>(j)];
  const auto& xl = train[static_cast<std::size_t>(l)];
  if (xj.label != xi.label)
    throw invalid_triple("hinge_loss: j must share i's class");
  if (xl.label == xi.label)
    throw invalid_triple("hinge_loss: l must have a different class than i");
  const double margin = 1.0 + squared_distance(m, xi.x, xj.x) - squared_distance(m, xi.x, xl.x);
  return margin > 0.0 ? margin : 0.0;
}

/// Pull weight on the target-neighbor term: the convex combination uses
/// (1−μ); the unweighted mode keeps the raw pull sum.
inline double pull_weight(double mu, bool unweighted_pull) {
  return unweighted_pull ? 1.0 : 1.0 - mu;
}

inline double objective(const Matrix& m, const std::vector<LabeledInstance>& train,
                        const TargetNeighborMap& targets, double mu,
                        bool unweighted_pull = false) {
  const std::size_t n = train.size();
  double pull = 0.0;
  double push = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : targets[i]) {
      const double dij = squared_distance(m, train[i].x, train[static_cast<std::size_t>(j)].x);
      pull += dij;
      for (std::size_t l = 0; l < n; ++l) {
        if (train[l].label == train[i].label) continue;
        const double margin = 1.0 + dij - squared_distance(m, train[i].x, train[l].x);
        if (margin > 0.0) push += margin;
      }
    }
  }
  return pull_weight(mu, unweighted_pull) * pull + mu * push;
}

/// Triples (i, j∈N_i, l) with strictly positive hinge loss. The canonical
/// mode scans every differently-labeled l; the restricted mode only
/// considers l among the k nearest neighbors of i under the current
/// metric (the fast variant of the margin scan).
inline std::vector<ActiveTriple> find_active_triples(const Matrix& m,
                                                     const std::vector<LabeledInstance>& train,
                                                     const TargetNeighborMap& targets,
                                                     bool restrict_impostors = false,
                                                     int k = 1) {
  const std::size_t n = train.size();
  std::vector<ActiveTriple> active;
  std::vector<int> candidates;
  std::vector<std::pair<double, int>> ranked;
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i].empty()) continue;

    candidates.clear();
    if (restrict_impostors) {
      ranked.clear();
      for (std::size_t l = 0; l < n; ++l) {
        if (l == i) continue;
        ranked.emplace_back(squared_distance(m, train[i].x, train[l].x), static_cast<int>(l));
      }
      std::sort(ranked.begin(), ranked.end());
      const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
      for (std::size_t t = 0; t < take; ++t) {
        const int l = ranked[t].second;
        if (train[static_cast<std::size_t>(l)].label != train[i].label) candidates.push_back(l);
      }
    } else {
      for (std::size_t l = 0; l < n; ++l)
        if (train[l].label != train[i].label) candidates.push_back(static_cast<int>(l));
    }

    for (int j : targets[i]) {
      const double dij = squared_distance(m, train[i].x, train[static_cast<std::size_t>(j)].x);
      for (int l : candidates) {
        const double margin =
            1.0 + dij - squared_distance(m, train[i].x, train[static_cast<std::size_t>(l)].x);
        if (margin > 0.0) active.push_back({static_cast<int>(i), j, l});
      }
    }
  }
  return active;
}

/// G = w_pull Σ_{j→i} C_ij + μ Σ_{(i,j,l) active} (C_ij − C_il)
inline Matrix lmnn_gradient(const std::vector<LabeledInstance>& train,
                            const TargetNeighborMap& targets,
                            const std::vector<ActiveTriple>& active, double mu,
                            bool unweighted_pull = false) {
  if (train.empty()) throw invalid_argument("lmnn_gradient: empty training set");
  const std::size_t dim = train[0].x.size();
  Matrix g(dim, dim);
  const double wp = pull_weight(mu, unweighted_pull);
  for (std::size_t i = 0; i < train.size(); ++i)
    for (int j : targets[i])
      detail::accumulate_outer_difference(g, train[i].x, train[static_cast<std::size_t>(j)].x, wp);
  for (const ActiveTriple& t : active) {
    const auto& xi = train[static_cast<std::size_t>(t.i)].x;
    detail::accumulate_outer_difference(g, xi, train[static_cast<std::size_t>(t.j)].x, mu);
    detail::accumulate_outer_difference(g, xi, train[static_cast<std::size_t>(t.l)].x, -mu);
  }
  return g;
}

/// Frobenius-nearest PSD matrix: eigendecompose, clamp negative
/// eigenvalues to zero, reconstruct. Idempotent, identity on PSD input.
inline Matrix psd_project(const Matrix& m) {
  const SymmetricEigen eig = jacobi_eigen(m);
  const std::size_t n = m.rows();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.eigenvalues[k];
    if (lambda <= 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const double vr = lambda * eig.eigenvectors(r, k);
      if (vr == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * eig.eigenvectors(c, k);
    }
  }
  return out.symmetrized();
}

/// Per-iteration view of the training loop, mainly for tests and
/// diagnostics.
using TrainObserver =
    std::function<void(int iteration, const Matrix& m, std::size_t active_count)>;

/// Projected gradient descent on the PSD cone, Euclidean start:
/// M_0 = I, M_{t+1} = P_S(M_t − step·G_t) for max_iterations steps,
/// stopping early when the update stalls below 1e−10 in Frobenius norm.
inline Metric train_metric(const std::vector<LabeledInstance>& train,
                           const TrainConfig& config, std::vector<std::string> feature_names,
                           const TrainObserver& observer = {}) {
  config.validate();
  if (train.empty()) throw training_error("train_metric: empty training set");
  const std::size_t dim = train[0].x.size();
  if (dim < 1) throw training_error("train_metric: zero-dimensional instances");
  if (feature_names.size() != dim)
    throw shape_error("train_metric: feature_names does not match instance dimension");

  int max_label = 0;
  for (const auto& inst : train) {
    if (inst.label < 0) throw invalid_argument("train_metric: negative class label");
    if (inst.x.size() != dim) throw shape_error("train_metric: ragged instance dimensions");
    max_label = std::max(max_label, inst.label);
  }
  std::vector<bool> seen(static_cast<std::size_t>(max_label) + 1, false);
  std::size_t distinct = 0;
  for (const auto& inst : train) {
    if (!seen[static_cast<std::size_t>(inst.label)]) {
      seen[static_cast<std::size_t>(inst.label)] = true;
      ++distinct;
    }
  }
  if (distinct < 2) throw training_error("train_metric: need at least 2 classes");

  // Optional z-scoring. Training runs in standardized coordinates and the
  // scaling is folded back into the returned matrix, so callers always see
  // a metric over the original features (offsets cancel in differences).
  std::vector<LabeledInstance> scaled;
  std::vector<double> inv_sigma;
  const std::vector<LabeledInstance>* working = &train;
  if (config.standardize) {
    const double n = static_cast<double>(train.size());
    std::vector<double> mean(dim, 0.0), var(dim, 0.0);
    for (const auto& inst : train)
      for (std::size_t f = 0; f < dim; ++f) mean[f] += inst.x[f];
    for (std::size_t f = 0; f < dim; ++f) mean[f] /= n;
    for (const auto& inst : train)
      for (std::size_t f = 0; f < dim; ++f) {
        const double d = inst.x[f] - mean[f];
        var[f] += d * d;
      }
    inv_sigma.resize(dim);
    for (std::size_t f = 0; f < dim; ++f) {
      const double sd = train.size() > 1 ? std::sqrt(var[f] / (n - 1.0)) : 0.0;
      inv_sigma[f] = sd > 0.0 ? 1.0 / sd : 1.0;
    }
    scaled = train;
    for (auto& inst : scaled)
      for (std::size_t f = 0; f < dim; ++f) inst.x[f] = (inst.x[f] - mean[f]) * inv_sigma[f];
    working = &scaled;
  }

  const TargetNeighborMap targets = select_target_neighbors(*working, config.k);

  Matrix m = Matrix::identity(dim);
  for (int t = 0; t < config.max_iterations; ++t) {
    const std::vector<ActiveTriple> active =
        find_active_triples(m, *working, targets, config.restrict_impostors, config.k);
    const Matrix g =
        lmnn_gradient(*working, targets, active, config.mu, config.unweighted_pull);
    Matrix next = psd_project(m - config.step * g);
    const double delta = (next - m).frobenius_norm();
    m = std::move(next);
    if (observer) observer(t, m, active.size());
    if (delta < 1e-10) break;
  }

  if (config.standardize) {
    // M_orig = D M D with D = diag(1/σ): reproduces standardized-space
    // distances on raw coordinates.
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) m(r, c) *= inv_sigma[r] * inv_sigma[c];
  }

  Metric out;
  out.m = std::move(m);
  out.feature_names = std::move(feature_names);
  return out;
}

}  // namespace lmknn
