#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "genen/linalg.hpp"
#include "genen/rng.hpp"
#include "genen/simulate.hpp"
#include "oracles.hpp"

using namespace genen;
namespace oracle = genen::testing;

namespace {

Eigen::MatrixXd random_spd(int n, std::uint64_t stream) {
  RngStream rng(99, stream);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("SymMatrix symmetrizes and validates") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.5, 0.3, 2.0;
  SymMatrix m(a);
  CHECK(m(0, 1) == m(1, 0));
  CHECK(m(0, 1) == doctest::Approx(0.4));

  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd(0, 0)), DimensionError);
  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd(2, 3)), DimensionError);
}

TEST_CASE("eigen_sym on identity and diagonal matrices") {
  const auto id = eigen_sym(SymMatrix::identity(3));
  for (int i = 0; i < 3; ++i) {
    CHECK(id.eigenvalues(i) == doctest::Approx(1.0));
  }
  Eigen::MatrixXd d = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  const auto ed = eigen_sym(SymMatrix(d));
  CHECK(ed.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(ed.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(ed.eigenvalues(2) == doctest::Approx(1.0));
}

TEST_CASE("eigen_sym invariants on random symmetric matrices") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SymMatrix m(random_spd(7, s));
    const auto ed = eigen_sym(m);
    const Eigen::MatrixXd& u = ed.eigenvectors;
    CHECK((u.transpose() * u - Eigen::MatrixXd::Identity(7, 7))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    const Eigen::MatrixXd rec =
        u * ed.eigenvalues.asDiagonal() * u.transpose();
    CHECK((rec - m.mat()).norm() <= 1e-9 * m.mat().norm());
    CHECK(std::abs(ed.eigenvalues.sum() - m.mat().trace()) <=
          1e-9 * std::abs(m.mat().trace()));
    for (int i = 0; i + 1 < 7; ++i) {
      CHECK(ed.eigenvalues(i) >= ed.eigenvalues(i + 1));
    }
  }
}

TEST_CASE("eigen_sym matches characteristic-polynomial roots") {
  const SymMatrix sigma = build_covariance({4, 2, 0.3, 0.5, 0.7});
  const auto ed = eigen_sym(sigma);
  const auto roots = oracle::charpoly_roots_sym(sigma.mat());
  REQUIRE(roots.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(ed.eigenvalues(i) == doctest::Approx(roots[i]).epsilon(1e-8));
  }
}

TEST_CASE("lambda_max is the Rayleigh-quotient maximum") {
  const SymMatrix m(random_spd(6, 17));
  const double lmax = lambda_max(m);
  RngStream rng(5, 0);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = rng.gaussian();
    v.normalize();
    CHECK(lmax >= v.dot(m.mat() * v) - 1e-10);
  }
}

TEST_CASE("lambda_max examples and power-iteration oracle") {
  CHECK(lambda_max(SymMatrix(Eigen::MatrixXd(
            Eigen::Vector3d(1, 2, 3).asDiagonal()))) == doctest::Approx(3.0));
  CHECK(lambda_max(SymMatrix::identity(5)) == doctest::Approx(1.0));

  RngStream rng(123, 4);
  Eigen::MatrixXd h(5, 30);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 30; ++j) h(i, j) = rng.gaussian();
  const Eigen::MatrixXd gram = h * h.transpose();
  const double expected = oracle::power_iteration_lmax(gram);
  CHECK(lambda_max(SymMatrix(gram)) ==
        doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("mat_power_half on diagonal and identity") {
  const SymMatrix id = SymMatrix::identity(4);
  CHECK((mat_power_half(id, HalfPower::plus).mat() -
         Eigen::MatrixXd::Identity(4, 4))
            .norm() < 1e-14);
  CHECK((mat_power_half(id, HalfPower::minus).mat() -
         Eigen::MatrixXd::Identity(4, 4))
            .norm() < 1e-14);

  Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  const SymMatrix r = mat_power_half(SymMatrix(d), HalfPower::plus);
  CHECK(r(0, 0) == doctest::Approx(2.0));
  CHECK(r(1, 1) == doctest::Approx(3.0));
  CHECK(std::abs(r(0, 1)) < 1e-14);
}

TEST_CASE("mat_power_half square and inverse relations") {
  const SymMatrix sigma = build_covariance({4, 2, 0.3, 0.5, 0.7});
  const SymMatrix half = mat_power_half(sigma, HalfPower::plus);
  CHECK((half.mat() * half.mat() - sigma.mat()).norm() <=
        1e-8 * sigma.mat().norm());

  const SymMatrix inv_half = mat_power_half(sigma, HalfPower::minus);
  const Eigen::MatrixXd whitened =
      inv_half.mat() * sigma.mat() * inv_half.mat();
  CHECK((whitened - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-8);

  // minus power equals the inverse of the plus power
  const Eigen::MatrixXd prod = inv_half.mat() * half.mat();
  CHECK((prod - Eigen::MatrixXd::Identity(4, 4)).norm() <=
        1e-8 * std::sqrt(4.0));

  for (std::uint64_t s = 0; s < 3; ++s) {
    const SymMatrix m(random_spd(5, 100 + s));
    const Eigen::MatrixXd lhs = mat_power_half(m, HalfPower::minus).mat();
    const Eigen::MatrixXd rhs =
        mat_power_half(m, HalfPower::plus).mat().inverse();
    CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());
  }
}

TEST_CASE("mat_power_half near-singular and indefinite failures") {
  Eigen::MatrixXd d = Eigen::Vector2d(1.0, 1e-12).asDiagonal();
  try {
    mat_power_half(SymMatrix(d), HalfPower::minus);
    FAIL("expected NearSingularError");
  } catch (const NearSingularError& e) {
    CHECK(e.eigenvalue() == doctest::Approx(1e-12));
  }

  Eigen::MatrixXd neg = Eigen::Vector2d(1.0, -0.5).asDiagonal();
  CHECK_THROWS_AS(mat_power_half(SymMatrix(neg), HalfPower::plus),
                  NearSingularError);
  // round-off scale negatives are clamped instead
  Eigen::MatrixXd tiny = Eigen::Vector2d(1.0, -1e-18).asDiagonal();
  CHECK_NOTHROW(mat_power_half(SymMatrix(tiny), HalfPower::plus));
}

TEST_CASE("solve_sym identity, diagonal and oracle instances") {
  Eigen::VectorXd rhs(2);
  rhs << 2.0, 4.0;
  CHECK((solve_sym(SymMatrix::identity(2), rhs) - rhs).norm() < 1e-14);

  Eigen::MatrixXd d = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  const Eigen::MatrixXd x = solve_sym(SymMatrix(d), rhs);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(1.0));

  const SymMatrix m(random_spd(6, 7));
  Eigen::MatrixXd b(6, 2);
  RngStream rng(3, 1);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 2; ++j) b(i, j) = rng.gaussian();
  const Eigen::MatrixXd sol = solve_sym(m, b);
  CHECK((m.mat() * sol - b).norm() <= 1e-8 * b.norm());
  const Eigen::MatrixXd expected = m.mat().inverse() * b;
  CHECK((sol - expected).norm() <= 1e-8 * expected.norm());
}

TEST_CASE("solve_sym failure names the smallest eigenvalue") {
  Eigen::MatrixXd d = Eigen::Vector2d(1.0, 1e-13).asDiagonal();
  try {
    solve_sym(SymMatrix(d), Eigen::VectorXd::Ones(2));
    FAIL("expected NearSingularError");
  } catch (const NearSingularError& e) {
    CHECK(e.eigenvalue() == doctest::Approx(1e-13));
    CHECK(std::string(e.what()).find("smallest eigenvalue") !=
          std::string::npos);
  }
}
