#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ccmaae/types.hpp"

// Geometry of constant-curvature manifolds embedded in R^{d+1}:
//
//   M = { x in R^{d+1} : <x, x> = 1/kappa }
//
// where <.,.> is the Euclidean dot product for kappa = +1 (unit sphere) and
// the pseudo-Euclidean product with metric diag(1, ..., 1, -1) for
// kappa = -1 (hyperboloid model, upper sheet). All functions are pure; points
// are plain Eigen vectors, batches are matrices with one point per row.

namespace ccmaae {

inline constexpr double kOnManifoldTol = 1e-6;
inline constexpr double kAntipodalTol = 1e-9;

namespace detail {

template <typename D>
void require_ambient(const Eigen::MatrixBase<D>& x, const char* what) {
  if (x.size() < 2)
    throw std::invalid_argument(std::string(what) + ": ambient dimension must be >= 2");
}

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace detail

/// Scalar product defining the CCM geometry: Euclidean for the sphere,
/// diag(1, ..., 1, -1) for the hyperboloid.
template <typename DA, typename DB>
double ccm_inner(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y,
                 Curvature k) {
  detail::require_ambient(x, "ccm_inner");
  if (x.size() != y.size())
    throw std::invalid_argument("ccm_inner: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  const Index n = x.size();
  const double head = x.head(n - 1).dot(y.head(n - 1));
  const double tail = x[n - 1] * y[n - 1];
  return k.is_spherical() ? head + tail : head - tail;
}

template <typename D>
bool on_manifold(const Eigen::MatrixBase<D>& z, Curvature k,
                 double tol = kOnManifoldTol) {
  return std::abs(ccm_inner(z, z, k) - 1.0 / k.kappa()) <= tol;
}

template <typename D>
void require_on_manifold(const Eigen::MatrixBase<D>& z, Curvature k,
                         const char* what, double tol = kOnManifoldTol) {
  const double drift = std::abs(ccm_inner(z, z, k) - 1.0 / k.kappa());
  if (!(drift <= tol))
    throw std::domain_error(std::string(what) + ": point off the manifold, |<z,z> - 1/kappa| = " +
                            std::to_string(drift));
}

/// Geodesic distance between two on-manifold points. Inner products are
/// clamped into the domain of arccos/arccosh to absorb floating-point drift.
/// Note the hyperbolic case uses arccosh(-<x,y>): on the upper sheet the
/// pseudo-product of two points is <= -1.
template <typename DA, typename DB>
double geodesic_distance(const Eigen::MatrixBase<DA>& x,
                         const Eigen::MatrixBase<DB>& y, Curvature k) {
  require_on_manifold(x, k, "geodesic_distance");
  require_on_manifold(y, k, "geodesic_distance");
  if (x.size() == y.size() && (x - y).cwiseAbs().maxCoeff() == 0.0)
    return 0.0;  // identity of indiscernibles, exactly (arccos of <x,x> would not be)
  const double g = ccm_inner(x, y, k);
  if (k.is_spherical()) return std::acos(detail::clamp(g, -1.0, 1.0));
  return std::acosh(std::max(-g, 1.0));
}

/// Membership degree mu(z) = exp(-(<z,z> - 1/kappa)^2 / (2 sigma^2)).
/// Total on all of R^{d+1}; equals 1 exactly on the manifold.
template <typename D>
double membership(const Eigen::MatrixBase<D>& z, Curvature k, MembershipWidth w) {
  const double drift = ccm_inner(z, z, k) - 1.0 / k.kappa();
  const double s = w.value();
  return std::exp(-(drift * drift) / (2.0 * s * s));
}

/// Orthogonal projection onto the CCM. Spherical: radial normalisation.
/// Hyperbolic: pseudo-norm normalisation z / sqrt(-<z,z>), restricted to the
/// upper sheet (last coordinate forced positive). Points that cannot be
/// projected (zero vector, or <z,z> >= 0 in the hyperbolic case) are an
/// error; the caller decides the fallback.
template <typename D>
Vector project_to_ccm(const Eigen::MatrixBase<D>& z, Curvature k) {
  detail::require_ambient(z, "project_to_ccm");
  if (k.is_spherical()) {
    const double n = z.norm();
    if (!(n > 0.0))
      throw std::domain_error("project_to_ccm: zero vector has no spherical projection");
    return z / n;
  }
  const double q = ccm_inner(z, z, k);
  if (!(q < 0.0))
    throw std::domain_error("project_to_ccm: point outside the light cone (<z,z> >= 0)");
  Vector out = z / std::sqrt(-q);
  if (out[out.size() - 1] < 0.0) out = -out;
  return out;
}

/// A geodesic's initial condition: a base point on the manifold and a
/// direction in the tangent space at that point (<base, direction> = 0 under
/// the kappa-scalar product).
struct TangentVector {
  Vector base;
  Vector direction;
};

/// Length of a tangent vector under the manifold metric. Tangent vectors on
/// the hyperboloid's upper sheet are spacelike, so the squared norm is
/// nonnegative for valid inputs.
inline double tangent_norm(const TangentVector& t, Curvature k) {
  return std::sqrt(std::max(ccm_inner(t.direction, t.direction, k), 0.0));
}

/// Riemannian exponential map. Closed forms:
///   kappa = +1: cos(|v|) x + sin(|v|) v/|v|
///   kappa = -1: cosh(|v|_L) x + sinh(|v|_L) v/|v|_L
template <typename DA, typename DB>
Vector exp_map(const Eigen::MatrixBase<DA>& base, const Eigen::MatrixBase<DB>& direction,
               Curvature k) {
  require_on_manifold(base, k, "exp_map");
  if (base.size() != direction.size())
    throw std::invalid_argument("exp_map: base/direction dimension mismatch");
  const double t = ccm_inner(base, direction, k);
  if (std::abs(t) > kOnManifoldTol)
    throw std::domain_error("exp_map: direction not tangent at base, <base,v> = " +
                            std::to_string(t));
  const double r = std::sqrt(std::max(ccm_inner(direction, direction, k), 0.0));
  if (r < 1e-300) return base;
  if (k.is_spherical()) return std::cos(r) * base + (std::sin(r) / r) * direction;
  return std::cosh(r) * base + (std::sinh(r) / r) * direction;
}

inline Vector exp_map(const TangentVector& t, Curvature k) {
  return exp_map(t.base, t.direction, k);
}

/// Inverse of exp_map: the tangent vector at `base` whose geodesic reaches
/// `target` at parameter 1. Spherical antipodes are rejected (the minor arc
/// is ambiguous there).
template <typename DA, typename DB>
TangentVector log_map(const Eigen::MatrixBase<DA>& base,
                      const Eigen::MatrixBase<DB>& target, Curvature k) {
  require_on_manifold(base, k, "log_map");
  require_on_manifold(target, k, "log_map");
  if (base.size() != target.size())
    throw std::invalid_argument("log_map: dimension mismatch");
  if ((base - target).cwiseAbs().maxCoeff() == 0.0)
    return {Vector(base), Vector::Zero(base.size())};

  if (k.is_spherical()) {
    const double c = detail::clamp(ccm_inner(base, target, k), -1.0, 1.0);
    if (c <= -1.0 + kAntipodalTol)
      throw std::domain_error("log_map: antipodal points, geodesic direction ambiguous");
    const double theta = std::acos(c);
    Vector w = target - c * base;
    const double n = w.norm();
    if (n < 1e-300) return {Vector(base), Vector::Zero(base.size())};
    return {Vector(base), Vector((theta / n) * w)};
  }

  // target = cosh(theta) base + sinh(theta) u  with u unit tangent, so
  // w = target - cosh(theta) base points along u and |w|_L = sinh(theta).
  const double c = std::max(-ccm_inner(base, target, k), 1.0);
  const double theta = std::acosh(c);
  if (theta < 1e-300) return {Vector(base), Vector::Zero(base.size())};
  Vector w = target - c * base;
  const double sh = std::sinh(theta);
  return {Vector(base), Vector((theta / sh) * w)};
}

// ---------------------------------------------------------------------------
// Batch forms: one point per row.
// ---------------------------------------------------------------------------

inline void require_rows_on_manifold(const Matrix& batch, Curvature k, const char* what,
                                     double tol = kOnManifoldTol) {
  for (Index i = 0; i < batch.rows(); ++i) {
    const double drift = std::abs(ccm_inner(batch.row(i), batch.row(i), k) - 1.0 / k.kappa());
    if (!(drift <= tol))
      throw std::domain_error(std::string(what) + ": row " + std::to_string(i) +
                              " off the manifold, drift = " + std::to_string(drift));
  }
}

inline Matrix project_rows(const Matrix& batch, Curvature k) {
  Matrix out(batch.rows(), batch.cols());
  for (Index i = 0; i < batch.rows(); ++i)
    out.row(i) = project_to_ccm(batch.row(i).transpose(), k).transpose();
  return out;
}

inline Vector membership_rows(const Matrix& batch, Curvature k, MembershipWidth w) {
  Vector out(batch.rows());
  for (Index i = 0; i < batch.rows(); ++i) out[i] = membership(batch.row(i), k, w);
  return out;
}

/// Row-wise gradient of the membership degree:
///   dmu/dz = mu(z) * (-(q - 1/kappa) / sigma^2) * 2 J z,  q = <z,z>
/// with J = I for the sphere and diag(1, ..., 1, -1) for the hyperboloid.
inline Matrix membership_jacobian_rows(const Matrix& batch, Curvature k, MembershipWidth w) {
  const double s2 = w.value() * w.value();
  Matrix jac(batch.rows(), batch.cols());
  for (Index i = 0; i < batch.rows(); ++i) {
    const double q = ccm_inner(batch.row(i), batch.row(i), k);
    const double drift = q - 1.0 / k.kappa();
    const double mu = std::exp(-(drift * drift) / (2.0 * s2));
    const double scale = -mu * drift / s2 * 2.0;
    jac.row(i) = scale * batch.row(i);
    if (!k.is_spherical()) jac(i, batch.cols() - 1) = -jac(i, batch.cols() - 1);
  }
  return jac;
}

/// Pullback of row-wise projection: maps gradients w.r.t. the projected rows
/// to gradients w.r.t. the raw rows (the transposed Jacobian of
/// project_to_ccm applied per row).
///   Spherical:  out = z/|z|,            J^T u = (u - (u.out) out) / |z|
///   Hyperbolic: out = s z/sqrt(-q) with q = <z,z> and the upper-sheet sign
///               s, so J^T u = s (u + (u.z) Jz / (-q)) / sqrt(-q)
inline Matrix project_rows_pullback(const Matrix& raw, const Matrix& upstream, Curvature k) {
  if (raw.rows() != upstream.rows() || raw.cols() != upstream.cols())
    throw std::invalid_argument("project_rows_pullback: shape mismatch");
  Matrix out(raw.rows(), raw.cols());
  const Index last = raw.cols() - 1;
  for (Index i = 0; i < raw.rows(); ++i) {
    if (k.is_spherical()) {
      const double norm = raw.row(i).norm();
      const Vector unit = raw.row(i).transpose() / norm;
      const double along = upstream.row(i).dot(unit);
      out.row(i) = (upstream.row(i) - along * unit.transpose()) / norm;
    } else {
      const double q = ccm_inner(raw.row(i), raw.row(i), k);
      const double sign = raw(i, last) < 0.0 ? -1.0 : 1.0;
      Vector jz = raw.row(i).transpose();
      jz[last] = -jz[last];
      const double uz = upstream.row(i).dot(raw.row(i));
      out.row(i) = sign * (upstream.row(i) + (uz / (-q)) * jz.transpose()) / std::sqrt(-q);
    }
  }
  return out;
}

/// Gram matrix of kappa-scalar products between the rows of a and b.
inline Matrix ccm_gram(const Matrix& a, const Matrix& b, Curvature k) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("ccm_gram: dimension mismatch");
  if (k.is_spherical()) return a * b.transpose();
  Matrix bj = b;
  bj.col(bj.cols() - 1) = -bj.col(bj.cols() - 1);
  return a * bj.transpose();
}

/// Geodesic distances between the rows of two on-manifold batches.
inline Matrix cross_geodesics(const Matrix& a, const Matrix& b, Curvature k) {
  require_rows_on_manifold(a, k, "cross_geodesics");
  require_rows_on_manifold(b, k, "cross_geodesics");
  Matrix g = ccm_gram(a, b, k);
  if (k.is_spherical())
    return g.array().min(1.0).max(-1.0).acos();
  return (-g.array()).max(1.0).acosh();
}

/// Symmetric pairwise geodesic distance matrix with exact zero diagonal.
inline Matrix pairwise_geodesics(const Matrix& batch, Curvature k) {
  require_rows_on_manifold(batch, k, "pairwise_geodesics");
  const Index n = batch.rows();
  Matrix g = ccm_gram(batch, batch, k);
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double dist = k.is_spherical()
                              ? std::acos(detail::clamp(g(i, j), -1.0, 1.0))
                              : std::acosh(std::max(-g(i, j), 1.0));
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

}  // namespace ccmaae
