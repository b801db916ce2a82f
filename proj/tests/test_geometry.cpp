#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ccmaae/geometry.hpp"
#include "ccmaae/priors.hpp"
#include "ccmaae/rng.hpp"

using namespace ccmaae;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

// Random tangent vector at `base` with norm drawn in (0, max_norm].
Vector random_tangent(const Vector& base, Curvature k, double max_norm, Rng& rng) {
  Vector g = rng.gaussian_vector(base.size());
  Vector v = k.is_spherical() ? Vector(g - ccm_inner(g, base, k) * base)
                              : Vector(g + ccm_inner(g, base, k) * base);
  const double n = std::sqrt(std::max(ccm_inner(v, v, k), 0.0));
  if (n < 1e-12) return Vector::Zero(base.size());
  return v * (max_norm * (0.05 + 0.95 * rng.uniform()) / n);
}

}  // namespace

TEST_CASE("ccm_inner matches the spherical and hyperbolic scalar products") {
  const Curvature sph = Curvature::spherical();
  const Curvature hyp = Curvature::hyperbolic();
  CHECK(ccm_inner(vec3(1, 0, 0), vec3(0, 1, 0), sph) == doctest::Approx(0.0));
  CHECK(ccm_inner(vec3(0, 0, 1), vec3(0, 0, 1), hyp) == doctest::Approx(-1.0));
  CHECK(ccm_inner(vec3(0.6, 0.8, 0), vec3(0.6, 0.8, 0), sph) == doctest::Approx(1.0));

  Vector shorter(2);
  shorter << 1, 0;
  CHECK_THROWS_AS(ccm_inner(vec3(1, 0, 0), shorter, sph), std::invalid_argument);
}

TEST_CASE("Curvature construction is restricted to +-1") {
  CHECK(Curvature(1).is_spherical());
  CHECK(Curvature(-1).kappa() == -1);
  CHECK_THROWS_AS(Curvature(0), std::invalid_argument);
  CHECK_THROWS_AS(Curvature(2), std::invalid_argument);
}

TEST_CASE("geodesic_distance on both manifolds") {
  const Curvature sph = Curvature::spherical();
  const Curvature hyp = Curvature::hyperbolic();

  CHECK(geodesic_distance(vec3(1, 0, 0), vec3(0, 1, 0), sph) ==
        doctest::Approx(1.5707963267948966));
  CHECK(geodesic_distance(vec3(1, 0, 0), vec3(1, 0, 0), sph) == doctest::Approx(0.0));

  const Vector h = vec3(std::sinh(1.0), 0, std::cosh(1.0));
  CHECK(geodesic_distance(vec3(0, 0, 1), h, hyp) == doctest::Approx(1.0));
  CHECK(geodesic_distance(h, h, hyp) == doctest::Approx(0.0));

  CHECK_THROWS_AS(geodesic_distance(vec3(2, 0, 0), vec3(1, 0, 0), sph), std::domain_error);
  CHECK_THROWS_AS(geodesic_distance(vec3(0, 0, 2), vec3(0, 0, 1), hyp), std::domain_error);
}

TEST_CASE("membership evaluates Gaussian closeness to the manifold") {
  const MembershipWidth w(5.0);
  CHECK(membership(vec3(0, 1, 0), Curvature::spherical(), w) == doctest::Approx(1.0));
  CHECK(membership(vec3(2, 0, 0), Curvature::spherical(), w) ==
        doctest::Approx(0.835270211411272).epsilon(1e-12));
  CHECK(membership(vec3(0, 0, 0), Curvature::hyperbolic(), w) ==
        doctest::Approx(0.9801986733067553).epsilon(1e-12));
  CHECK_THROWS_AS(MembershipWidth(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MembershipWidth(-1.0), std::invalid_argument);
}

TEST_CASE("membership is monotone in the manifold drift and metric-invariant") {
  const MembershipWidth w(2.0);
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const Curvature k = i % 2 == 0 ? Curvature::spherical() : Curvature::hyperbolic();
    Vector z = rng.gaussian_vector(4);
    const double drift = std::abs(ccm_inner(z, z, k) - 1.0 / k.kappa());
    Vector z2 = rng.gaussian_vector(4);
    const double drift2 = std::abs(ccm_inner(z2, z2, k) - 1.0 / k.kappa());
    if (std::abs(drift - drift2) < 1e-9) continue;
    const bool closer = drift < drift2;
    CHECK((membership(z, k, w) > membership(z2, k, w)) == closer);

    // permuting the first d coordinates preserves <z,z> for both kappa
    Vector p = z;
    std::swap(p[0], p[2]);
    CHECK(membership(p, k, w) == doctest::Approx(membership(z, k, w)).epsilon(1e-15));
  }
}

TEST_CASE("project_to_ccm normalises onto the manifold") {
  const Curvature sph = Curvature::spherical();
  const Curvature hyp = Curvature::hyperbolic();

  const Vector p = project_to_ccm(vec3(3, 4, 0), sph);
  CHECK(p.isApprox(vec3(0.6, 0.8, 0), 1e-12));
  CHECK(project_to_ccm(p, sph).isApprox(p, 1e-12));  // idempotent

  const Vector h = project_to_ccm(vec3(0, 0, 0.5), hyp);
  CHECK(h.isApprox(vec3(0, 0, 1), 1e-12));
  CHECK(std::abs(ccm_inner(h, h, hyp) + 1.0) < 1e-12);

  CHECK_THROWS_AS(project_to_ccm(vec3(0, 0, 0), sph), std::domain_error);
  CHECK_THROWS_AS(project_to_ccm(vec3(1, 0, 0.5), hyp), std::domain_error);  // <z,z> > 0
}

TEST_CASE("spherical projection minimises Euclidean distance to the sphere") {
  Rng rng(11);
  const Curvature sph = Curvature::spherical();
  for (int trial = 0; trial < 20; ++trial) {
    Vector z = 3.0 * rng.gaussian_vector(3);
    if (z.norm() < 1e-3) continue;
    const Vector p = project_to_ccm(z, sph);
    const double best = (z - p).norm();
    // 1-D search along geodesics leaving p: no nearby on-sphere point is closer
    const Vector t = random_tangent(p, sph, 1.0, rng).normalized();
    for (int step = 1; step <= 100; ++step) {
      const double a = 3.0 * step / 100.0;
      const Vector q = exp_map(p, (a * t).eval(), sph);
      CHECK((z - q).norm() >= best - 1e-12);
    }
  }
}

TEST_CASE("exp_map closed forms") {
  const Curvature sph = Curvature::spherical();
  const Curvature hyp = Curvature::hyperbolic();

  CHECK(exp_map(vec3(1, 0, 0), vec3(0, 0, 0), sph).isApprox(vec3(1, 0, 0), 1e-15));
  CHECK(exp_map(vec3(1, 0, 0), vec3(0, M_PI_2, 0), sph).isApprox(vec3(0, 1, 0), 1e-12));
  CHECK(exp_map(vec3(0, 0, 1), vec3(1, 0, 0), hyp)
            .isApprox(vec3(1.1752011936438014, 0, 1.5430806348152437), 1e-12));

  CHECK_THROWS_AS(exp_map(vec3(1, 0, 0), vec3(1, 0, 0), sph), std::domain_error);  // not tangent
}

TEST_CASE("log_map inverts exp_map and flags antipodes") {
  const Curvature sph = Curvature::spherical();
  const Curvature hyp = Curvature::hyperbolic();

  CHECK(log_map(vec3(1, 0, 0), vec3(1, 0, 0), sph).direction.norm() == doctest::Approx(0.0));
  CHECK(log_map(vec3(1, 0, 0), vec3(0, 1, 0), sph).direction.isApprox(vec3(0, M_PI_2, 0), 1e-12));
  CHECK(log_map(vec3(0, 0, 1), vec3(std::sinh(1.0), 0, std::cosh(1.0)), hyp)
            .direction.isApprox(vec3(1, 0, 0), 1e-10));

  CHECK_THROWS_AS(log_map(vec3(1, 0, 0), vec3(-1, 0, 0), sph), std::domain_error);
}

TEST_CASE("exp/log round trip and distance consistency, 1000 random pairs per curvature") {
  for (const Curvature k : {Curvature::spherical(), Curvature::hyperbolic()}) {
    Rng rng(k.is_spherical() ? 101 : 202);
    PriorSpec spec{k, 3, rng.next_u64()};
    const Matrix bases = sample_prior(spec, 1000);
    for (Index i = 0; i < bases.rows(); ++i) {
      const Vector base = bases.row(i).transpose();
      const Vector v = random_tangent(base, k, 3.0, rng);
      const double vnorm = std::sqrt(std::max(ccm_inner(v, v, k), 0.0));
      const Vector target = exp_map(base, v, k);

      CHECK(std::abs(ccm_inner(target, target, k) - 1.0 / k.kappa()) < 1e-9);
      CHECK(geodesic_distance(base, target, k) == doctest::Approx(vnorm).epsilon(1e-8));

      const TangentVector back = log_map(base, target, k);
      CHECK((back.direction - v).norm() <= 1e-8 * std::max(1.0, v.norm()));
      CHECK(tangent_norm(back, k) == doctest::Approx(vnorm).epsilon(1e-8));
    }
  }
}

TEST_CASE("geodesic_distance is a metric on sampled triples") {
  for (const Curvature k : {Curvature::spherical(), Curvature::hyperbolic()}) {
    PriorSpec spec{k, 3, 77};
    const Matrix pts = sample_prior(spec, 3000);
    for (Index i = 0; i + 2 < pts.rows(); i += 3) {
      const Vector a = pts.row(i).transpose();
      const Vector b = pts.row(i + 1).transpose();
      const Vector c = pts.row(i + 2).transpose();
      const double ab = geodesic_distance(a, b, k);
      const double ba = geodesic_distance(b, a, k);
      const double ac = geodesic_distance(a, c, k);
      const double cb = geodesic_distance(c, b, k);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
      CHECK(ab >= 0.0);
      CHECK(ab <= ac + cb + 1e-9);  // triangle inequality
      CHECK(geodesic_distance(a, a, k) < 1e-9);
    }
  }
}

TEST_CASE("pairwise_geodesics equals the per-pair loop") {
  const Curvature sph = Curvature::spherical();

  Matrix one(1, 3);
  one << 1, 0, 0;
  CHECK(pairwise_geodesics(one, sph)(0, 0) == 0.0);

  Matrix tri(3, 3);
  tri << 1, 0, 0, 0, 1, 0, -1, 0, 0;
  const Matrix d = pairwise_geodesics(tri, sph);
  CHECK(d(0, 1) == doctest::Approx(M_PI_2));
  CHECK(d(0, 2) == doctest::Approx(M_PI));
  CHECK(d(1, 2) == doctest::Approx(M_PI_2));

  for (const Curvature k : {Curvature::spherical(), Curvature::hyperbolic()}) {
    const Matrix batch = sample_prior(PriorSpec{k, 4, 5}, 40);
    const Matrix dm = pairwise_geodesics(batch, k);
    CHECK(dm.isApprox(dm.transpose()));
    CHECK(dm.diagonal().isZero(0.0));
    for (Index i = 0; i < batch.rows(); ++i)
      for (Index j = 0; j < batch.cols(); ++j)
        CHECK(dm(i, j) ==
              doctest::Approx(geodesic_distance(batch.row(i), batch.row(j), k)).epsilon(1e-12));
  }
}

TEST_CASE("project_rows_pullback matches finite differences of the projection") {
  Rng rng(29);
  for (const Curvature k : {Curvature::spherical(), Curvature::hyperbolic()}) {
    // base points safely inside the projectable region
    Matrix z(5, 3);
    for (Index i = 0; i < z.rows(); ++i) {
      Vector g = rng.gaussian_vector(3);
      if (!k.is_spherical()) {
        g *= 0.3;
        g[2] = 2.0 + rng.uniform();  // timelike, upper cone
      } else if (g.norm() < 0.3) {
        g = Vector::Ones(3);
      }
      z.row(i) = g.transpose();
    }
    const Matrix sens = rng.gaussian_matrix(5, 3);  // loss = sum(project(z) o sens)
    const Matrix grad = project_rows_pullback(z, sens, k);
    const double h = 1e-6;
    for (Index i = 0; i < z.rows(); ++i) {
      for (Index j = 0; j < z.cols(); ++j) {
        Matrix zp = z, zm = z;
        zp(i, j) += h;
        zm(i, j) -= h;
        const double up = project_to_ccm(zp.row(i).transpose(), k).dot(sens.row(i).transpose());
        const double dn = project_to_ccm(zm.row(i).transpose(), k).dot(sens.row(i).transpose());
        const double numeric = (up - dn) / (2.0 * h);
        CHECK(grad(i, j) == doctest::Approx(numeric).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("membership_jacobian_rows matches finite differences") {
  Rng rng(13);
  const MembershipWidth w(5.0);
  for (const Curvature k : {Curvature::spherical(), Curvature::hyperbolic()}) {
    Matrix z = rng.gaussian_matrix(6, 4);
    const Matrix jac = membership_jacobian_rows(z, k, w);
    const double h = 1e-6;
    for (Index i = 0; i < z.rows(); ++i) {
      for (Index j = 0; j < z.cols(); ++j) {
        Matrix zp = z, zm = z;
        zp(i, j) += h;
        zm(i, j) -= h;
        const double fd =
            (membership(zp.row(i), k, w) - membership(zm.row(i), k, w)) / (2.0 * h);
        CHECK(jac(i, j) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}
