#include <doctest.h>

#include <random>

#include "gkp/kernels.hpp"
#include "gkp/qubit_mc.hpp"
#include "gkp/symplectic.hpp"
#include "oracles.hpp"

using namespace gkp;

TEST_CASE("closed-form pauli error probabilities") {
  GkpLattice sq = standard_lattice(LatticeKind::SquareQubit);
  ErrorRates r = pauli_error_prob(sq, 0.25);
  CHECK(r.p_x == doctest::Approx(std::erfc(std::sqrt(std::numbers::pi / 0.5))).epsilon(1e-12));
  CHECK(r.p_x == doctest::Approx(3.93e-4).epsilon(0.03));
  CHECK(r.trials == 0);
  for (double s : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    ErrorRates q = pauli_error_prob(sq, s);
    CHECK(q.p_y < q.p_x);
    CHECK(q.p_x == q.p_z);
    CHECK(q.p_e == doctest::Approx(std::min(1.0, q.p_x + q.p_y + q.p_z)));
  }
  CHECK(pauli_error_prob(sq, 1e-3).p_e == 0.0);
  for (double s : {0.15, 0.2, 0.25}) {
    double pd4 = pauli_error_prob(standard_lattice(LatticeKind::D4Qubit), s).p_e;
    double pt = pauli_error_prob(standard_lattice(LatticeKind::Tesseract), s).p_e;
    double ps = pauli_error_prob(sq, s).p_e;
    CHECK(pd4 < pt);
    CHECK(pt < ps);
  }
  CHECK_THROWS_AS(pauli_error_prob(standard_lattice(LatticeKind::E8), 0.2), Error);
  CHECK_THROWS_AS(pauli_error_prob(sq, 0.0), Error);
}

TEST_CASE("cvp_decode matches exhaustive enumeration") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const char* name : {"square", "hex", "tesseract", "d4"}) {
    CAPTURE(name);
    GkpLattice l = lattice_by_name(name);
    const int n2 = 2 * l.n_modes;
    CHECK(cvp_decode(l, Vec::Zero(n2)).isZero());
    Vec pt = kEll * l.M * Vec::Ones(n2);
    CHECK((cvp_decode(l, pt) - pt).norm() < 1e-9);
    const int bound = 2;
    for (int rep = 0; rep < 300; ++rep) {
      Vec e(n2);
      for (int i = 0; i < n2; ++i) e(i) = u(rng);
      e *= kEll * u(rng) / std::max(1e-12, e.norm());
      Vec got = cvp_decode(l, e, bound);
      Vec ref = oracle::closest_point(kEll * l.M, e, bound + 2);
      CHECK((got - e).norm() == doctest::Approx((ref - e).norm()).epsilon(1e-12));
    }
    // Inside the Voronoi cell of the origin.
    Vec small = Vec::Constant(n2, 0.05);
    CHECK(cvp_decode(l, small).isZero());
  }
}

TEST_CASE("cvp agrees across kernel families") {
  GkpLattice l = standard_lattice(LatticeKind::D4Qubit);
  ClosestPoint cp(kEll * lll_reduce(dual(l)), 3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 2000; ++rep) {
    Vec e(4);
    for (int i = 0; i < 4; ++i) e(i) = 0.4 * nd(rng);
    kernels::force_isa(kernels::Isa::Scalar);
    Vec a = cp.nearest(e);
    kernels::reset_isa();
    Vec b = cp.nearest(e);
    CHECK(a == b);
  }
}

TEST_CASE("search bound enforcement") {
  Mat skew(2, 2);
  skew << 1, 100, 0, 1;
  ClosestPoint cp(skew, 1);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-60, 60);
  int thrown = 0, ok = 0;
  for (int rep = 0; rep < 500; ++rep) {
    Vec e(2);
    e << u(rng), u(rng) / 50;
    try {
      Vec got = cp.nearest(e);
      Vec ref = e.array().round().matrix();  // the skewed basis spans Z^2
      CHECK((got - e).norm() == doctest::Approx((ref - e).norm()).epsilon(1e-12));
      ++ok;
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::SearchBoundTooSmall);
      ++thrown;
    }
  }
  CHECK(thrown > 0);
  CHECK(ok > 0);
  CHECK_THROWS_AS(ClosestPoint(Mat::Ones(2, 2), 2), Error);
}

TEST_CASE("monte carlo logical rates") {
  GkpLattice sq = standard_lattice(LatticeKind::SquareQubit);
  SUBCASE("tiny noise") {
    ErrorRates r = mc_logical_rates(sq, 0.01, 10000, 1);
    CHECK(r.p_e == 0.0);
    CHECK(r.se_x > 0.0);  // Wilson interval is nonzero at zero counts
  }
  SUBCASE("square closed form at 0.2") {
    ErrorRates mc = mc_logical_rates(sq, 0.2, 400000, 2);
    ErrorRates cf = pauli_error_prob(sq, 0.2);
    CHECK(std::abs(mc.p_x - cf.p_x) < 3 * mc.se_x);
    CHECK(std::abs(mc.p_z - cf.p_z) < 3 * mc.se_z);
  }
  SUBCASE("hex closed form at 0.2") {
    GkpLattice hx = standard_lattice(LatticeKind::HexQubit);
    ErrorRates mc = mc_logical_rates(hx, 0.2, 400000, 3);
    ErrorRates cf = pauli_error_prob(hx, 0.2);
    CHECK(std::abs(mc.p_x - cf.p_x) < 3 * mc.se_x);
    CHECK(std::abs(mc.p_y - cf.p_y) < 3 * mc.se_y);
  }
  SUBCASE("stochastic monotonicity") {
    double prev = -1;
    for (double s : {0.1, 0.2, 0.3}) {
      ErrorRates r = mc_logical_rates(sq, s, 100000, 5);
      CHECK(r.p_e >= prev);
      prev = r.p_e;
    }
  }
  SUBCASE("thread and chunk determinism") {
    GkpLattice t = standard_lattice(LatticeKind::Tesseract);
    McOptions o1, o4;
    o1.threads = 1;
    o1.chunk = 5000;
    o4.threads = 4;
    o4.chunk = 5000;
    ErrorRates a = mc_logical_rates(t, 0.3, 50000, 99, o1);
    ErrorRates b = mc_logical_rates(t, 0.3, 50000, 99, o4);
    CHECK(a.n_x == b.n_x);
    CHECK(a.n_y == b.n_y);
    CHECK(a.n_z == b.n_z);
    ErrorRates c = mc_logical_rates(t, 0.3, 50000, 100, o1);
    CHECK((a.n_x != c.n_x || a.n_z != c.n_z));
  }
  CHECK_THROWS_AS(mc_logical_rates(sq, 0.2, 0, 1), Error);
}
