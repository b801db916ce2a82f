#include "ccmaae/evaltasks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ccmaae/priors.hpp"
#include "ccmaae/rng.hpp"

namespace ccmaae {

Matrix project_embeddings(const Matrix& batch, Curvature k) {
  Matrix out(batch.rows(), batch.cols());
  const Index last = batch.cols() - 1;
  for (Index i = 0; i < batch.rows(); ++i) {
    if (k.is_spherical()) {
      const double n = batch.row(i).norm();
      if (n > 0.0) {
        out.row(i) = batch.row(i) / n;
      } else {
        out.row(i).setZero();
        out(i, last) = 1.0;
      }
      continue;
    }
    const double q = ccm_inner(batch.row(i), batch.row(i), k);
    if (q < 0.0) {
      out.row(i) = batch.row(i) / std::sqrt(-q);
      if (out(i, last) < 0.0) out.row(i) = -out.row(i);
    } else {
      out.row(i) = batch.row(i);
      out(i, last) = std::sqrt(1.0 + batch.row(i).head(last).squaredNorm());
    }
  }
  return out;
}

IntVector knn_geodesic(const Matrix& train_emb, const IntVector& train_labels,
                       const Matrix& query_emb, const KnnConfig& cfg, Curvature k) {
  if (cfg.k < 1) throw std::invalid_argument("knn_geodesic: k must be >= 1");
  if (train_emb.rows() != train_labels.size())
    throw std::invalid_argument("knn_geodesic: embedding/label count mismatch");
  if (train_emb.rows() < cfg.k)
    throw std::invalid_argument("knn_geodesic: fewer labelled points than k");
  if (train_emb.cols() != query_emb.cols())
    throw std::invalid_argument("knn_geodesic: ambient dimension mismatch");

  const Matrix train_p = project_embeddings(train_emb, k);
  const Matrix query_p = project_embeddings(query_emb, k);
  const Matrix dist = cross_geodesics(query_p, train_p, k);

  const Index n_train = train_p.rows();
  IntVector out(query_p.rows());
  std::vector<Index> idx(static_cast<size_t>(n_train));
  for (Index q = 0; q < query_p.rows(); ++q) {
    std::iota(idx.begin(), idx.end(), Index(0));
    std::partial_sort(idx.begin(), idx.begin() + cfg.k, idx.end(), [&](Index a, Index b) {
      if (dist(q, a) != dist(q, b)) return dist(q, a) < dist(q, b);
      return a < b;  // stable under exact distance ties
    });

    std::map<int, std::pair<int, double>> votes;  // class -> (count, summed distance)
    for (int i = 0; i < cfg.k; ++i) {
      auto& v = votes[train_labels[idx[static_cast<size_t>(i)]]];
      v.first += 1;
      v.second += dist(q, idx[static_cast<size_t>(i)]);
    }
    int best_class = -1;
    int best_count = -1;
    double best_sum = 0.0;
    for (const auto& [cls, v] : votes) {
      const bool wins = v.first > best_count ||
                        (v.first == best_count && v.second < best_sum);
      if (wins) {  // map iterates classes ascending, so equal (count, sum) keeps the lower class
        best_class = cls;
        best_count = v.first;
        best_sum = v.second;
      }
    }
    out[q] = best_class;
  }
  return out;
}

double semi_supervised_accuracy(const CcmAae& model, const ImageDataset& train,
                                const ImageDataset& test, const KnnConfig& cfg) {
  if (cfg.labelled_per_class < 1)
    throw std::invalid_argument("semi_supervised_accuracy: labelled_per_class must be >= 1");

  std::map<int, std::vector<Index>> by_class;
  for (Index i = 0; i < train.size(); ++i) by_class[train.labels[i]].push_back(i);

  Rng rng(cfg.selection_seed);
  std::vector<Index> chosen;
  for (auto& [cls, indices] : by_class) {
    if (static_cast<Index>(indices.size()) < cfg.labelled_per_class)
      throw std::invalid_argument("semi_supervised_accuracy: class " + std::to_string(cls) +
                                  " has only " + std::to_string(indices.size()) +
                                  " training points, need " +
                                  std::to_string(cfg.labelled_per_class));
    rng.shuffle(indices);
    chosen.insert(chosen.end(), indices.begin(), indices.begin() + cfg.labelled_per_class);
  }

  Matrix labelled_x(static_cast<Index>(chosen.size()), train.width());
  IntVector labelled_y(static_cast<Index>(chosen.size()));
  for (size_t i = 0; i < chosen.size(); ++i) {
    labelled_x.row(static_cast<Index>(i)) = train.pixels.row(chosen[i]);
    labelled_y[static_cast<Index>(i)] = train.labels[chosen[i]];
  }

  const IntVector pred = knn_geodesic(encode(model, labelled_x), labelled_y,
                                      encode(model, test.pixels), cfg, model.curvature);
  return static_cast<double>((pred.array() == test.labels.array()).count()) /
         static_cast<double>(test.size());
}

Traversal equator_traversal(const CcmAae& model, Index n_steps, std::uint64_t circle_seed) {
  if (!model.curvature.is_spherical())
    throw std::invalid_argument("equator_traversal: spherical models only (kappa = +1)");
  if (n_steps < 1) throw std::invalid_argument("equator_traversal: n_steps must be >= 1");

  const Index ambient = model.ambient_dim();
  Vector u = Vector::Zero(ambient), w = Vector::Zero(ambient);
  if (ambient == 3) {
    u[0] = 1.0;
    w[1] = 1.0;
  } else {
    // Seeded random great circle: orthonormalise two Gaussian directions.
    Rng rng(circle_seed);
    u = rng.gaussian_vector(ambient);
    u /= u.norm();
    w = rng.gaussian_vector(ambient);
    w -= w.dot(u) * u;
    w /= w.norm();
  }

  Traversal t;
  t.latent = Matrix(n_steps, ambient);
  for (Index i = 0; i < n_steps; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n_steps);
    t.latent.row(i) = (std::cos(a) * u + std::sin(a) * w).transpose();
  }
  t.decoded = forward(model.decoder, project_rows(t.latent, model.curvature));
  return t;
}

Traversal geodesic_traversal(const CcmAae& model, const Vector& start, const Vector& end,
                             Index n_steps) {
  if (n_steps < 2) throw std::invalid_argument("geodesic_traversal: n_steps must be >= 2");
  const TangentVector direction = log_map(start, end, model.curvature);

  Traversal t;
  t.latent = Matrix(n_steps, start.size());
  for (Index i = 0; i < n_steps; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n_steps - 1);
    t.latent.row(i) =
        exp_map(direction.base, (s * direction.direction).eval(), model.curvature).transpose();
  }
  t.decoded = forward(model.decoder, project_rows(t.latent, model.curvature));
  return t;
}

ChartPoint poincare_chart(const Vector& z) {
  if (z.size() != 3) throw std::invalid_argument("poincare_chart: expected d = 2 (3 coordinates)");
  require_on_manifold(z, Curvature::hyperbolic(), "poincare_chart");
  return {z[0] / (1.0 + z[2]), z[1] / (1.0 + z[2])};
}

ChartPoint aitoff_chart(const Vector& z) {
  if (z.size() != 3) throw std::invalid_argument("aitoff_chart: expected d = 2 (3 coordinates)");
  require_on_manifold(z, Curvature::spherical(), "aitoff_chart");
  const double lat = std::asin(std::clamp(z[2], -1.0, 1.0));
  const double lon = std::atan2(z[1], z[0]);
  const double alpha = std::acos(std::clamp(std::cos(lat) * std::cos(lon / 2.0), -1.0, 1.0));
  const double sinc = alpha < 1e-12 ? 1.0 : std::sin(alpha) / alpha;
  return {2.0 * std::cos(lat) * std::sin(lon / 2.0) / sinc, std::sin(lat) / sinc};
}

Matrix chart_rows(const Matrix& batch, Curvature k) {
  Matrix out(batch.rows(), 2);
  for (Index i = 0; i < batch.rows(); ++i) {
    const Vector z = batch.row(i).transpose();
    const ChartPoint p = k.is_spherical() ? aitoff_chart(z) : poincare_chart(z);
    out(i, 0) = p.u;
    out(i, 1) = p.v;
  }
  return out;
}

}  // namespace ccmaae
