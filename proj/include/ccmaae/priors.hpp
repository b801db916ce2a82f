#pragma once

#include <cstdint>

#include "ccmaae/rng.hpp"
#include "ccmaae/types.hpp"

// Sampling of the regularisation priors on CCMs. The spherical prior is the
// uniform distribution (ambient Gaussian projected radially); the hyperbolic
// prior is the wrapped standard normal: N(0, I_d) on the tangent plane at the
// origin, pushed onto the hyperboloid through the exponential map.

namespace ccmaae {

struct PriorSpec {
  Curvature curvature;
  Index dim;                // manifold dimension d >= 1; points live in R^{d+1}
  std::uint64_t seed = 0;
};

/// The point (0, ..., 0, 1): lies on both the unit sphere and the upper
/// hyperboloid sheet, and is the exp-map origin of the wrapped prior.
Vector ccm_origin(Index dim);

// Streaming forms: draw from a caller-owned generator. One sample per row.
Matrix sample_spherical_uniform(Index dim, Index n, Rng& rng);
Matrix sample_hyperbolic_wrapped_normal(Index dim, Index n, Rng& rng);
Matrix sample_prior(Curvature k, Index dim, Index n, Rng& rng);

// Pure forms: each call seeds a fresh generator from the spec, so identical
// (seed, n, dim, curvature) give byte-identical batches.
Matrix sample_spherical_uniform(const PriorSpec& spec, Index n);
Matrix sample_hyperbolic_wrapped_normal(const PriorSpec& spec, Index n);
Matrix sample_prior(const PriorSpec& spec, Index n);

}  // namespace ccmaae
