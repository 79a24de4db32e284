#include <doctest.h>

#include <cmath>
#include <random>

#include "smallmat.hpp"
#include "../support/oracles.hpp"

using namespace phicgc;
namespace to = testing_oracles;

TEST_CASE("expm of zero is the identity") {
  CHECK((smallmat::expm(DenseMatrix::Zero(4, 4)) - DenseMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("expm of a diagonal matrix") {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = -2.0;
  const DenseMatrix e = smallmat::expm(m);
  CHECK(e(0, 0) == doctest::Approx(0.367879441171442321595523770161).epsilon(1e-15));
  CHECK(e(1, 1) == doctest::Approx(0.135335283236612691893999494972).epsilon(1e-15));
  CHECK(e(0, 1) == 0.0);
  CHECK(e(1, 0) == 0.0);
}

TEST_CASE("expm inverse pair") {
  std::mt19937_64 rng(8);
  const DenseMatrix m = to::random_matrix(rng, 8, 8);
  const DenseMatrix prod = smallmat::expm(m) * smallmat::expm(-m);
  CHECK((prod - DenseMatrix::Identity(8, 8)).norm() <= 1e-10);
}

TEST_CASE("expm against the extended precision taylor oracle") {
  std::mt19937_64 rng(21);
  for (double scale : {1e-3, 0.1, 1.0, 5.0, 20.0, 100.0}) {
    for (int k = 0; k < 5; ++k) {
      // Normal matrices keep the conditioning of exp benign.
      const DenseMatrix a = to::random_matrix(rng, 10, 10);
      const DenseMatrix sym = 0.5 * (a + a.transpose());
      const DenseMatrix skew = 0.5 * (a - a.transpose());
      DenseMatrix m = sym + skew;
      if (k % 2 == 0) m = sym;
      if (k == 1) m = -(sym * sym.transpose());
      const double n1 = m.cwiseAbs().colwise().sum().maxCoeff();
      m *= scale / n1;
      const DenseMatrix e = smallmat::expm(m);
      const DenseMatrix ref = to::expm_taylor(m);
      CAPTURE(scale);
      CHECK((e - ref).norm() <= 1e-12 * ref.norm());
    }
  }
}

TEST_CASE("expm overflow is a numerical range error") {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(0, 0) = 1000.0;
  try {
    (void)smallmat::expm(m);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumericalRange);
  }
}

TEST_CASE("expm rejects matrices above the size cap") {
  CHECK_THROWS_AS((void)smallmat::expm(DenseMatrix::Zero(5, 5), 4), Error);
  CHECK_THROWS_AS((void)smallmat::expm(DenseMatrix::Zero(2, 3)), Error);
}

TEST_CASE("phi scalar") {
  CHECK(smallmat::phi_scalar(0.0) == 1.0);
  CHECK(smallmat::phi_scalar(-1.0) == doctest::Approx(0.632120558828557678404476229839).epsilon(1e-15));
  CHECK(std::abs(smallmat::phi_scalar(1e-9) - 1.00000000050000000016666666671) <= 2e-16);
  CHECK(smallmat::phi_scalar(-50.0) == doctest::Approx(0.0199999999999999999999961425003).epsilon(1e-15));
}

TEST_CASE("z phi(z) = e^z - 1 across scales") {
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double mag = std::pow(10.0, -10.0 + i * (std::log10(50.0) + 10.0) / 200.0);
    for (double z : {mag, -mag}) {
      const long double ref = std::expm1(static_cast<long double>(z));
      const double got = z * smallmat::phi_scalar(z);
      worst = std::max(worst, static_cast<double>(std::abs((got - ref) / ref)));
    }
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("phi action basics") {
  DenseMatrix h(2, 2);
  h << 1, 2, 3, 4;
  CHECK(smallmat::phi_action(h, 0.0, 3.0).isZero(0.0));
  DenseMatrix one = DenseMatrix::Ones(1, 1);
  CHECK(smallmat::phi_action(one, 1.0, 1.0)[0] == doctest::Approx(0.632120558828557678404476229839).epsilon(1e-14));
  const Vector u = smallmat::phi_action(DenseMatrix::Zero(3, 3), 2.0, 1.0);
  CHECK(u[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u[1] == 0.0);
  CHECK(u[2] == 0.0);
}

TEST_CASE("phi action satisfies -H u = (exp(-tH) - I) beta e1") {
  std::mt19937_64 rng(5);
  for (Index k : {1, 2, 5, 12, 30}) {
    DenseMatrix h = to::random_matrix(rng, k, k) / std::sqrt(static_cast<double>(k));
    h.diagonal().array() += 2.0;
    const double t = 0.7, beta = 1.3;
    const Vector u = smallmat::phi_action(h, t, beta);
    Vector rhs = smallmat::expm(-t * h).col(0) * beta;
    rhs[0] -= beta;
    CHECK((-h * u - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("phi action against the eigendecomposition oracle") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const Index k = 1 + trial % 30;
    const DenseMatrix h = to::random_sym_tridiagonal(rng, k, 50.0, 20.0);
    const double t = 0.05 + 0.1 * (trial % 7);
    const Vector u = smallmat::phi_action(h, t, 2.0);
    const Vector ref = to::phi_eig(h, t, Vector::Unit(k, 0) * 2.0);
    CHECK(to::rel_diff(u, ref) <= 1e-10);
  }
}
