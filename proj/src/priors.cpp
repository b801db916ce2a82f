#include "ccmaae/priors.hpp"

#include <cmath>
#include <stdexcept>

#include "ccmaae/geometry.hpp"

namespace ccmaae {

namespace {

void require_dim(Index dim, const char* what) {
  if (dim < 1) throw std::invalid_argument(std::string(what) + ": dim must be >= 1");
}

}  // namespace

Vector ccm_origin(Index dim) {
  require_dim(dim, "ccm_origin");
  Vector x = Vector::Zero(dim + 1);
  x[dim] = 1.0;
  return x;
}

Matrix sample_spherical_uniform(Index dim, Index n, Rng& rng) {
  require_dim(dim, "sample_spherical_uniform");
  Matrix out(n, dim + 1);
  for (Index i = 0; i < n; ++i) {
    double norm = 0.0;
    do {  // zero-norm draw has probability 0; resampled if it ever occurs
      for (Index j = 0; j <= dim; ++j) out(i, j) = rng.gaussian();
      norm = out.row(i).norm();
    } while (!(norm > 0.0));
    out.row(i) /= norm;
  }
  return out;
}

Matrix sample_hyperbolic_wrapped_normal(Index dim, Index n, Rng& rng) {
  require_dim(dim, "sample_hyperbolic_wrapped_normal");
  // A tangent vector at the origin has last coordinate 0, so its Lorentz
  // norm is the plain Euclidean norm of the first d entries and the exp-map
  // reduces to (sinh(r) v/r, cosh(r)).
  Matrix out(n, dim + 1);
  for (Index i = 0; i < n; ++i) {
    Vector v = rng.gaussian_vector(dim);
    const double r = v.norm();
    if (r < 1e-300) {
      out.row(i).setZero();
      out(i, dim) = 1.0;
      continue;
    }
    out.row(i).head(dim) = (std::sinh(r) / r) * v;
    out(i, dim) = std::cosh(r);
  }
  return out;
}

Matrix sample_prior(Curvature k, Index dim, Index n, Rng& rng) {
  return k.is_spherical() ? sample_spherical_uniform(dim, n, rng)
                          : sample_hyperbolic_wrapped_normal(dim, n, rng);
}

Matrix sample_spherical_uniform(const PriorSpec& spec, Index n) {
  if (!spec.curvature.is_spherical())
    throw std::invalid_argument("sample_spherical_uniform: spec.curvature must be +1");
  Rng rng(spec.seed);
  return sample_spherical_uniform(spec.dim, n, rng);
}

Matrix sample_hyperbolic_wrapped_normal(const PriorSpec& spec, Index n) {
  if (spec.curvature.is_spherical())
    throw std::invalid_argument("sample_hyperbolic_wrapped_normal: spec.curvature must be -1");
  Rng rng(spec.seed);
  return sample_hyperbolic_wrapped_normal(spec.dim, n, rng);
}

Matrix sample_prior(const PriorSpec& spec, Index n) {
  Rng rng(spec.seed);
  return sample_prior(spec.curvature, spec.dim, n, rng);
}

}  // namespace ccmaae
