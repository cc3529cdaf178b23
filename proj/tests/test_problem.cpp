#include <doctest.h>

#include "kot/datagen.hpp"
#include "kot/problem.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace kot;
using namespace kot::testing;

TEST_CASE("single-point assembly") {
  const double bw = 0.005;
  Matrix x(1, 2), y(1, 2);
  x << 0.2, 0.3;
  y << 0.25, 0.1;
  FillingPoints f{x, y};
  SampleSet mu{x, SampleRole::SourceMu};
  SampleSet nu{y, SampleRole::TargetNu};
  const ProblemData pd = assemble(mu, nu, f, 1.0, 0.5, ProblemSpecs::gaussian(2, bw));
  const double dist = (x - y).squaredNorm();
  CHECK(pd.z(0) == doctest::Approx(2.0 - 0.5 * dist));
  CHECK(pd.q_mat(0, 0) == doctest::Approx(2.0));
  CHECK(pd.q_sq == doctest::Approx(2.0));
  CHECK(pd.phi(0, 0) == doctest::Approx(1.0));
  CHECK(pd.jitter == 0.0);
}

TEST_CASE("duplicated filling pairs assemble through jitter") {
  Matrix x(3, 1), y(3, 1);
  x << 0.1, 0.1, 0.6;
  y << 0.4, 0.4, 0.2;
  SampleSet mu{x, SampleRole::SourceMu};
  SampleSet nu{y, SampleRole::TargetNu};
  const ProblemData pd =
      assemble(mu, nu, FillingPoints{x, y}, 1.0 / 3, 0.5, ProblemSpecs::gaussian(1, 0.005));
  CHECK(pd.jitter > 0.0);
  CHECK(pd.phi.allFinite());
}

TEST_CASE("synthetic assembly at benchmark scale") {
  const MixtureSpec ms = default_mixture(2, 3, 1);
  MixtureSpec ns = default_mixture(2, 5, 2);
  const SampleSet mu = sample_mixture(ms, 100, SampleRole::SourceMu);
  const SampleSet nu = sample_mixture(ns, 100, SampleRole::TargetNu);
  const FillingPoints f = sobol_points(2, 100, Box::unit(2), Box::unit(2));
  const ProblemData pd = assemble(mu, nu, f, 0.01, 0.1, ProblemSpecs::gaussian(2, 0.005));
  CHECK(pd.order() == 100);
  Eigen::SelfAdjointEigenSolver<Matrix> es(pd.q_mat);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  CHECK(pd.q_mat == pd.q_mat.transpose());
  CHECK(pd.phi.isUpperTriangular());
}

TEST_CASE("assemble validates inputs") {
  Matrix x(2, 2), y(2, 2);
  x.setZero();
  y.setOnes();
  SampleSet mu{Matrix::Zero(3, 3), SampleRole::SourceMu};
  SampleSet nu{Matrix::Zero(3, 2), SampleRole::TargetNu};
  CHECK_THROWS(assemble(mu, nu, FillingPoints{x, y}, 1, 1, ProblemSpecs::gaussian(2, 0.005)));
  SampleSet ok{Matrix::Zero(3, 2), SampleRole::SourceMu};
  CHECK_THROWS(assemble(ok, nu, FillingPoints{x, y}, 0, 1, ProblemSpecs::gaussian(2, 0.005)));
}

TEST_CASE("phi operators") {
  Rng rng(7);
  const Index n = 6;
  const ProblemData pd = random_problem(n, rng);

  const Vector diag_sq = pd.phi.colwise().squaredNorm().transpose();
  CHECK((phi_forward(pd, Matrix::Identity(n, n)) - diag_sq).norm() < 1e-14);
  CHECK(phi_forward(pd, Matrix::Zero(n, n)).norm() == 0.0);

  const Vector c0 = pd.phi.col(0);
  CHECK((phi_adjoint(pd, Vector::Unit(n, 0)) - c0 * c0.transpose()).norm() < 1e-15);
  CHECK(phi_adjoint(pd, Vector::Zero(n)).norm() == 0.0);

  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = random_symmetric(n, rng);
    const Vector g = random_vector(n, rng);
    const Vector fwd = phi_forward(pd, x);
    for (Index i = 0; i < n; ++i) {
      const Vector c = pd.phi.col(i);
      CHECK(fwd(i) == doctest::Approx(frobenius_inner(x, c * c.transpose())).epsilon(1e-12));
    }
    Matrix brute = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) brute += g(i) * pd.phi.col(i) * pd.phi.col(i).transpose();
    const Matrix adj = phi_adjoint(pd, g);
    CHECK((adj - brute).norm() < 1e-12 * brute.norm());
    CHECK(adj == adj.transpose());
    CHECK(g.dot(fwd) == doctest::Approx(frobenius_inner(x, adj)).epsilon(1e-12));
  }
}

TEST_CASE("residual at the scalar fixtures") {
  SUBCASE("interior solution") {
    const ProblemData pd = scalar_problem(1.0);
    IteratePair w{Vector::Constant(1, 0.5), Matrix::Zero(1, 1)};
    CHECK(residual_eval(pd, w).norm <= 1e-12);
  }
  SUBCASE("active constraint") {
    const ProblemData pd = scalar_problem(-4.0);
    IteratePair w{Vector::Constant(1, -1.0), Matrix::Constant(1, 1, 2.0)};
    CHECK(residual_eval(pd, w).norm <= 1e-12);
  }
  SUBCASE("inconsistent multiplier") {
    const ProblemData pd = scalar_problem(1.0);
    IteratePair w{Vector::Constant(1, 0.5), Matrix::Constant(1, 1, 3.0)};
    CHECK(residual(pd, w).x.norm() > 0.0);
  }
}

TEST_CASE("residual at the origin") {
  Rng rng(3);
  const ProblemData pd = random_problem(5, rng);
  const IteratePair r = residual(pd, IteratePair::zero(5));
  CHECK((r.gamma + pd.z / (2 * pd.lambda2)).norm() < 1e-15);
  CHECK(r.x.norm() == 0.0);
  CHECK(residual_eval(pd, IteratePair::zero(5)).norm ==
        doctest::Approx(pd.z.norm() / (2 * pd.lambda2)));
}

TEST_CASE("residual vanishes only at KKT points") {
  // Brute-force KKT check on the scalar problem over a grid of iterates.
  const ProblemData pd = scalar_problem(-4.0);
  for (double g = -2.0; g <= 1.0; g += 0.25) {
    for (double x = 0.0; x <= 3.0; x += 0.25) {
      IteratePair w{Vector::Constant(1, g), Matrix::Constant(1, 1, x)};
      const double c = g + 1.0;
      const bool kkt = std::abs(2 * g + 4 - x) < 1e-12 && c >= -1e-12 && x >= 0 &&
                       std::abs(c * x) < 1e-12;
      CHECK((residual_eval(pd, w).norm <= 1e-12) == kkt);
    }
  }
}

TEST_CASE("objective") {
  const ProblemData pd = scalar_problem(1.0);
  CHECK(objective(pd, Vector::Constant(1, 0.5)) == doctest::Approx(-0.25));
  Rng rng(8);
  const ProblemData rp = random_problem(5, rng);
  CHECK(objective(rp, Vector::Zero(5)) == doctest::Approx(rp.q_sq / (4 * rp.lambda2)));
  for (int t = 0; t < 10; ++t) {
    const Vector a = random_vector(5, rng), b = random_vector(5, rng);
    CHECK(objective(rp, 0.5 * (a + b)) <=
          0.5 * (objective(rp, a) + objective(rp, b)) + 1e-12);
    const double h = 1e-6;
    const Vector g = objective_gradient(rp, a);
    const Vector e = Vector::Unit(5, t % 5);
    const double fd = (objective(rp, a + h * e) - objective(rp, a - h * e)) / (2 * h);
    CHECK(fd == doctest::Approx(g.dot(e)).epsilon(1e-6));
  }
}

TEST_CASE("ot_estimate") {
  Rng rng(2);
  ProblemData pd = random_problem(4, rng);
  CHECK(ot_estimate(pd, Vector::Zero(4)) == doctest::Approx(pd.q_sq / (2 * pd.lambda2)));
  ProblemData s = ProblemData::from_matrices(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 1.0),
                                             0.7, Matrix::Constant(1, 1, 1.0), 1.0, 0.5,
                                             Vector::Constant(1, 1.3));
  CHECK(ot_estimate(s, Vector::Constant(1, 0.4)) ==
        doctest::Approx(0.7 / 1.0 - 0.4 * 1.3 / 1.0));
}

TEST_CASE("potential and transport map") {
  const double bw = 0.01;
  Matrix x(1, 2), y(1, 2);
  x << 0.3, 0.6;
  y << 0.5, 0.5;
  SampleSet mu{x, SampleRole::SourceMu};
  SampleSet nu{y, SampleRole::TargetNu};
  const ProblemData pd = assemble(mu, nu, FillingPoints{x, y}, 1.0, 0.5,
                                  ProblemSpecs::gaussian(2, bw));
  const double q[] = {0.3, 0.6};
  const PotentialEval pe = potential_and_map(pd, mu, Vector::Zero(1), q);
  CHECK(pe.u == doctest::Approx(1.0 / (2 * 0.5)));
  CHECK(pe.grad_u.norm() < 1e-15);
  CHECK((pe.map - x.row(0).transpose()).norm() < 1e-15);

  // Central differences at random queries with a random gamma.
  Rng rng(5);
  const Index n = 8;
  const Matrix xt = 0.5 + 0.1 * random_matrix(n, 2, rng).array();
  const Matrix yt = 0.5 + 0.1 * random_matrix(n, 2, rng).array();
  SampleSet mu2{0.5 + 0.1 * random_matrix(20, 2, rng).array(), SampleRole::SourceMu};
  SampleSet nu2{0.5 + 0.1 * random_matrix(20, 2, rng).array(), SampleRole::TargetNu};
  const ProblemData pd2 =
      assemble(mu2, nu2, FillingPoints{xt, yt}, 1.0 / n, 0.3, ProblemSpecs::gaussian(2, bw));
  const Vector g = random_vector(n, rng);
  for (int t = 0; t < 5; ++t) {
    const Vector p = 0.5 + 0.1 * random_vector(2, rng).array();
    const PotentialEval e = potential_and_map(pd2, mu2, g, {p.data(), 2});
    for (Index c = 0; c < 2; ++c) {
      const double h = 1e-6;
      Vector pp = p, pm = p;
      pp(c) += h;
      pm(c) -= h;
      const double fd = (potential_and_map(pd2, mu2, g, {pp.data(), 2}).u -
                         potential_and_map(pd2, mu2, g, {pm.data(), 2}).u) /
                        (2 * h);
      CHECK(std::abs(fd - e.grad_u(c)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
    CHECK((e.map - (p - e.grad_u)).norm() < 1e-15);
  }
}

TEST_CASE("IteratePair arithmetic") {
  Rng rng(1);
  const IteratePair a = random_iterate(3, rng), b = random_iterate(3, rng);
  CHECK((a + b - b - a).norm() < 1e-14);
  CHECK((2.0 * a).norm() == doctest::Approx(2 * a.norm()));
  CHECK(a.norm() == doctest::Approx(a.gamma.norm() + a.x.norm()));
  CHECK(inner(a, b) == doctest::Approx(a.gamma.dot(b.gamma) + frobenius_inner(a.x, b.x)));
}
