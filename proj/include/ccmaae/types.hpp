#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace ccmaae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

/// Signed sectional curvature of the latent manifold. Only the sign matters
/// for the geometry; |kappa| rescales the representation, so the model is
/// restricted to kappa = +1 (unit sphere) and kappa = -1 (unit hyperboloid).
class Curvature {
 public:
  explicit Curvature(int kappa) : kappa_(kappa) {
    if (kappa != 1 && kappa != -1)
      throw std::invalid_argument("Curvature: kappa must be +1 or -1");
  }

  static Curvature spherical() { return Curvature(1); }
  static Curvature hyperbolic() { return Curvature(-1); }

  int kappa() const { return kappa_; }
  bool is_spherical() const { return kappa_ > 0; }

  friend bool operator==(Curvature a, Curvature b) { return a.kappa_ == b.kappa_; }
  friend bool operator!=(Curvature a, Curvature b) { return a.kappa_ != b.kappa_; }

 private:
  int kappa_;
};

/// Width of the Gaussian-shaped manifold membership function.
class MembershipWidth {
 public:
  explicit MembershipWidth(double sigma_m) : sigma_m_(sigma_m) {
    if (!(sigma_m > 0.0))
      throw std::invalid_argument("MembershipWidth: sigma_m must be positive");
  }

  double value() const { return sigma_m_; }

 private:
  double sigma_m_;
};

}  // namespace ccmaae
