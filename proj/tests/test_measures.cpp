#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "wdeloc/measures.hpp"
#include "wdeloc/sampling.hpp"

using namespace wdeloc;

namespace {

Eigen::VectorXd random_simplex(int n, RngEngine& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = expo(rng);
  return v / v.sum();
}

// Ordered-index brute force: sum over i_0 < i_1 < ... < i_{k-1} of the
// population products, i.e. the elementary symmetric polynomial.
double ordered_sum(const Eigen::VectorXd& p, int k) {
  const int n = static_cast<int>(p.size());
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  double total = 0.0;
  while (true) {
    double prod = 1.0;
    for (int i : idx) prod *= p(i);
    total += prod;
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return total;
}

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("tau on worked examples") {
  Eigen::VectorXd uniform3 = Eigen::VectorXd::Constant(3, 1.0 / 3);
  CHECK(tau(uniform3, 3) == doctest::Approx(2.0 / 9).epsilon(1e-14));

  Eigen::VectorXd two(3);
  two << 0.5, 0.5, 0.0;
  CHECK(tau(two, 3) == 0.0);

  Eigen::VectorXd uniform6 = Eigen::VectorXd::Constant(6, 1.0 / 6);
  const double expected[] = {5.0 / 6, 5.0 / 9, 5.0 / 18, 5.0 / 54, 5.0 / 324};
  for (int k = 2; k <= 6; ++k) {
    CHECK(std::abs(tau(uniform6, k) - expected[k - 2]) < 1e-14);
    CHECK(std::abs(tau_max(6, k) - expected[k - 2]) < 1e-14);
  }

  CHECK_THROWS_AS(tau(uniform3, 1), Error);
  CHECK_THROWS_AS(tau(uniform3, 4), Error);
}

TEST_CASE("recurrence matches the explicit moment polynomials") {
  for (int trial = 0; trial < 10000; ++trial) {
    RngEngine rng = stream_rng(101, static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> dim(5, 8);
    const Eigen::VectorXd p = random_simplex(dim(rng), rng);
    for (int k = 2; k <= 5; ++k) {
      REQUIRE(std::abs(tau(p, k) - tau_moment_poly(p, k)) < 1e-10);
    }
  }
}

TEST_CASE("recurrence matches k! times the ordered brute-force sum") {
  for (int trial = 0; trial < 2000; ++trial) {
    RngEngine rng = stream_rng(102, static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> dim(2, 8);
    const int n = dim(rng);
    const Eigen::VectorXd p = random_simplex(n, rng);
    for (int k = 2; k <= n; ++k) {
      REQUIRE(std::abs(tau(p, k) - factorial(k) * ordered_sum(p, k)) < 1e-10);
    }
  }
}

TEST_CASE("tau is permutation invariant and bounded by the uniform value") {
  RngEngine rng = stream_rng(103, 0);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd p = random_simplex(6, rng);
    Eigen::VectorXd shuffled = p;
    std::shuffle(shuffled.data(), shuffled.data() + 6, rng);
    for (int k = 2; k <= 6; ++k) {
      REQUIRE(tau(p, k) == doctest::Approx(tau(shuffled, k)).epsilon(1e-13));
      REQUIRE(tau(p, k) >= 0.0);
      REQUIRE(tau(p, k) <= tau_max(6, k) + 1e-12);
    }
  }
}

TEST_CASE("tau support property: nonzero iff at least k populations are") {
  RngEngine rng = stream_rng(104, 0);
  std::uniform_int_distribution<int> support(1, 6);
  for (int trial = 0; trial < 500; ++trial) {
    const int live = support(rng);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(6);
    p.head(live) = random_simplex(live, rng);
    for (int k = 2; k <= 6; ++k) {
      if (live >= k) {
        REQUIRE(tau(p, k) > 0.0);
      } else {
        REQUIRE(tau(p, k) == 0.0);
      }
    }
  }
}

TEST_CASE("tangle") {
  const DensityMatrix w2in3 = from_pure(PureState::block_w(3, 0, 2));
  CHECK(tangle(w2in3, 0, 1) == doctest::Approx(1.0).epsilon(1e-14));

  const DensityMatrix diag = DensityMatrix::maximally_mixed(3);
  CHECK(tangle(diag, 0, 2) == 0.0);

  const DensityMatrix w3 = from_pure(PureState::block_w(3, 0, 3));
  CHECK(tangle(w3, 1, 2) == doctest::Approx(4.0 / 9).epsilon(1e-13));

  CHECK_THROWS_AS(tangle(w3, 0, 3), Error);
  CHECK_THROWS_AS(tangle(w3, 1, 1), Error);
}

TEST_CASE("total tangle over ordered pairs") {
  CHECK(total_tangle(DensityMatrix::maximally_mixed(4)) == 0.0);

  const DensityMatrix w3 = from_pure(PureState::block_w(3, 0, 3));
  CHECK(total_tangle(w3) == doctest::Approx(8.0 / 3).epsilon(1e-13));

  const DensityMatrix w2in3 = from_pure(PureState::block_w(3, 0, 2));
  CHECK(total_tangle(w2in3) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("purity form of E_2") {
  CHECK(e2_purity_form(DensityMatrix::maximally_mixed(3)) == doctest::Approx(0.0));

  const DensityMatrix w3 = from_pure(PureState::block_w(3, 0, 3));
  CHECK(e2_purity_form(w3) == doctest::Approx(2.0 / 3).epsilon(1e-13));

  const DensityMatrix sigma =
      mix({from_pure(PureState::block_w(3, 0, 2)),
           from_pure(PureState::basis_state(3, 2))},
          {0.8, 0.2});
  CHECK(e2_purity_form(sigma) == doctest::Approx(0.32).epsilon(1e-13));

  // purity - M_2 equals total_tangle / 4 on every valid state
  for (int trial = 0; trial < 300; ++trial) {
    RngEngine rng = stream_rng(105, static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> dim(2, 6);
    const int n = dim(rng);
    std::uniform_int_distribution<int> rank(1, n);
    const DensityMatrix rho = random_mixed(n, rank(rng), rng);
    REQUIRE(std::abs(e2_purity_form(rho) - total_tangle(rho) / 4.0) < 1e-12);
  }
}
