#include <doctest.h>

#include <random>

#include "gkp/io.hpp"
#include "gkp/symplectic.hpp"
#include "oracles.hpp"

using namespace gkp;

TEST_CASE("omega") {
  Mat w1(2, 2);
  w1 << 0, 1, -1, 0;
  CHECK(omega(1) == w1);
  Mat w2 = omega(2);
  CHECK(w2.block(0, 0, 2, 2) == w1);
  CHECK(w2.block(2, 2, 2, 2) == w1);
  CHECK(w2.block(0, 2, 2, 2).isZero());
  for (int n = 1; n <= 4; ++n) {
    Mat w = omega(n);
    CHECK((w * w + Mat::Identity(2 * n, 2 * n)).isZero());
    CHECK((w.transpose() + w).isZero());
    CHECK((w * w.transpose()).isIdentity());
  }
  CHECK(direct_sum(omega(1), omega(1)) == omega(2));
  CHECK_THROWS_AS(omega(0), Error);
}

TEST_CASE("is_symplectic") {
  CHECK(is_symplectic(omega(1), 1e-12));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 1;
  CHECK_FALSE(is_symplectic(d, 1e-12));
  CHECK(is_symplectic(rotation(0.3) * squeezer(std::log(1.7)), 1e-12));
  CHECK_THROWS_AS(is_symplectic(Mat::Identity(3, 3)), Error);
}

TEST_CASE("standard gates") {
  const int two[2] = {0, 1};
  CHECK(standard_gate({GateKind::TwoModeSqueeze, 1.0}, two, 2).isIdentity(1e-15));
  Mat b = standard_gate({GateKind::Beamsplitter, std::numbers::pi / 4}, two, 2);
  const double c = 1 / std::sqrt(2.0);
  Mat expect(4, 4);
  expect << c, 0, c, 0,
            0, c, 0, c,
            -c, 0, c, 0,
            0, -c, 0, c;
  CHECK((b - expect).cwiseAbs().maxCoeff() < 1e-15);
  for (double g : {1.0, 2.0, 10.0}) {
    double r = std::acosh(std::sqrt(g));
    Mat bs = beamsplitter(std::numbers::pi / 4);
    Mat sq = direct_sum(squeezer(-r), squeezer(r));
    CHECK((two_mode_squeezer(g) - bs * sq * bs.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(two_mode_squeezer(0.5), Error);
  const int dup[2] = {1, 1};
  CHECK_THROWS_AS(standard_gate({GateKind::Sum}, dup, 2), Error);
  const int one[1] = {2};
  Mat r3 = standard_gate({GateKind::Rotation, 0.7}, one, 3);
  CHECK(r3.block(4, 4, 2, 2) == rotation(0.7));
  CHECK(r3.topLeftCorner(4, 4).isIdentity());
}

TEST_CASE("group closure and form invariance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int trial = 0; trial < 50; ++trial) {
    Mat s = Mat::Identity(6, 6);
    for (int k = 0; k < 6; ++k) {
      int which = static_cast<int>(rng() % 5);
      int single[1] = {static_cast<int>(rng() % 3)};
      const auto& pr = pairs[rng() % 3];
      Mat g;
      switch (which) {
        case 0: g = standard_gate({GateKind::Rotation, u(rng)}, single, 3); break;
        case 1: g = standard_gate({GateKind::Squeeze, 0.3 * u(rng)}, single, 3); break;
        case 2: g = standard_gate({GateKind::Beamsplitter, u(rng)}, pr, 3); break;
        case 3: g = standard_gate({GateKind::TwoModeSqueeze, 1.0 + std::abs(u(rng))}, pr, 3); break;
        default: g = standard_gate({GateKind::Sum}, pr, 3); break;
      }
      CHECK(is_symplectic(g));
      s = compose(g, s);
    }
    CHECK(is_symplectic(s, 1e-9));
    CHECK(std::abs(s.determinant() - 1.0) < 1e-8);
    Vec a = Vec::Random(6), b = Vec::Random(6);
    Mat w = omega(3);
    CHECK(std::abs(a.dot(w * b) - (s * a).dot(w * (s * b))) < 1e-9);
  }
}

TEST_CASE("williamson") {
  SUBCASE("isotropic") {
    Williamson w = williamson(0.3 * Mat::Identity(4, 4));
    for (int i = 0; i < 4; ++i) CHECK(w.nu(i) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(is_symplectic(w.S, 1e-10));
  }
  SUBCASE("single mode diag(4,1)") {
    Mat y = Mat::Zero(2, 2);
    y(0, 0) = 4;
    y(1, 1) = 1;
    Williamson w = williamson(y);
    CHECK(w.nu(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w.nu(0) == doctest::Approx(oracle::symplectic_eigenvalues(y)[0]).epsilon(1e-12));
  }
  SUBCASE("TMS-correlated noise") {
    for (double g : {1.5, 4.0, 20.0}) {
      Mat s = two_mode_squeezer(g);
      Williamson w = williamson(0.01 * s * s.transpose());
      for (int i = 0; i < 4; ++i) CHECK(w.nu(i) == doctest::Approx(0.01).epsilon(1e-8));
    }
  }
  SUBCASE("random round trips") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 4; ++n) {
      for (int rep = 0; rep < 10; ++rep) {
        Mat a = Mat::Random(2 * n, 2 * n);
        Mat y = a * a.transpose() + 0.1 * Mat::Identity(2 * n, 2 * n);
        Williamson w = williamson(y);
        CHECK(is_symplectic(w.S, 1e-9));
        Mat diag = w.S * y * w.S.transpose();
        CHECK((diag - Mat(w.nu.asDiagonal())).cwiseAbs().maxCoeff() < 1e-8 * y.norm());
        Mat sinv = w.S.inverse();
        Mat back = sinv * Mat(w.nu.asDiagonal()) * sinv.transpose();
        CHECK((back - y).norm() / y.norm() < 1e-8);
        auto ref = oracle::symplectic_eigenvalues(y);
        for (int i = 0; i < 2 * n; ++i) CHECK(w.nu(i) == doctest::Approx(ref[i]).epsilon(1e-8));
        for (int i = 0; i + 2 < 2 * n; i += 2) CHECK(w.nu(i) >= w.nu(i + 2));
      }
    }
  }
  CHECK_THROWS_AS(williamson(Mat::Zero(2, 2)), Error);
  Mat indef = Mat::Identity(2, 2);
  indef(1, 1) = -1;
  CHECK_THROWS_AS(williamson(indef), Error);
}

TEST_CASE("covariance plumbing") {
  Mat y = Mat::Random(4, 4);
  y = y * y.transpose();
  CHECK(apply_to_covariance(Mat::Identity(4, 4), y) == y);
  Mat sv = apply_to_covariance(squeezer(0.4), 0.5 * Mat::Identity(2, 2));
  CHECK(sv(0, 0) == doctest::Approx(0.5 * std::exp(0.8)));
  CHECK(sv(1, 1) == doctest::Approx(0.5 * std::exp(-0.8)));
  CHECK_THROWS_AS(compose(Mat::Identity(2, 2), Mat::Identity(4, 4)), Error);
}

TEST_CASE("matrix json round trip") {
  Mat m = Mat::Random(3, 4);
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1,2],[3]]")), Error);
}
