#pragma once

#include <cstdint>

#include "ccmaae/aae.hpp"
#include "ccmaae/data.hpp"
#include "ccmaae/geometry.hpp"
#include "ccmaae/types.hpp"

// Evaluation of trained models: geodesic K-NN semi-supervised accuracy,
// latent traversals along manifold geodesics, and the 2-D chart projections
// (Poincare disk, Aitoff) used to export latent visualisations. All
// operations are pure given a model snapshot.

namespace ccmaae {

struct KnnConfig {
  int k = 5;
  Index labelled_per_class = 100;
  std::uint64_t selection_seed = 0;
};

/// Row-wise projection with a total fallback for embeddings the orthogonal
/// projection cannot handle: hyperbolic points outside the light cone are
/// lifted vertically onto the upper sheet via (v, sqrt(1 + |v|^2)), and a
/// spherical zero row maps to the origin point (0, ..., 0, 1). Evaluation
/// never aborts on a badly-placed embedding.
Matrix project_embeddings(const Matrix& batch, Curvature k);

/// Majority vote among the k geodesically nearest labelled embeddings.
/// Embeddings are projected onto the manifold internally. Vote ties break by
/// smaller summed geodesic distance, then by lower class index.
IntVector knn_geodesic(const Matrix& train_emb, const IntVector& train_labels,
                       const Matrix& query_emb, const KnnConfig& cfg, Curvature k);

/// Draws labelled_per_class training points per class uniformly (seeded),
/// embeds them and the test set, and returns the K-NN test accuracy.
/// Embedding uses the raw intensities; projection happens inside the K-NN.
double semi_supervised_accuracy(const CcmAae& model, const ImageDataset& train,
                                const ImageDataset& test, const KnnConfig& cfg);

struct Traversal {
  Matrix latent;   // n_steps x (d+1), points on the manifold
  Matrix decoded;  // n_steps x input_dim
};

/// n_steps points at angles 2 pi i / n_steps around a great circle of the
/// latent sphere, decoded with projection applied. For d = 2 the circle lies
/// in the first two ambient coordinates; for d > 2 a seeded random great
/// circle is used. Spherical models only.
Traversal equator_traversal(const CcmAae& model, Index n_steps, std::uint64_t circle_seed = 0);

/// Decodes exp_map(start, t * log_map(start, end)) for t evenly spaced in
/// [0, 1] (n_steps >= 2, endpoints included). Works for both curvatures;
/// antipodal spherical endpoints are rejected.
Traversal geodesic_traversal(const CcmAae& model, const Vector& start, const Vector& end,
                             Index n_steps);

struct ChartPoint {
  double u, v;
};

/// Poincare disk chart of the hyperboloid (d = 2): (u, v) = (z1, z2)/(1 + z3).
ChartPoint poincare_chart(const Vector& z);

/// Aitoff chart of the sphere (d = 2). The third latent coordinate is the
/// polar axis: latitude = asin(z3), longitude = atan2(z2, z1).
ChartPoint aitoff_chart(const Vector& z);

/// Row-wise chart application; returns an n x 2 matrix of (u, v).
Matrix chart_rows(const Matrix& batch, Curvature k);

}  // namespace ccmaae
