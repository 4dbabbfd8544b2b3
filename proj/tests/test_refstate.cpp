#include <doctest.h>

#include <cmath>

#include "wdeloc/refstate.hpp"
#include "wdeloc/sampling.hpp"

using namespace wdeloc;

namespace {

const std::vector<std::pair<int, int>> kStudyPairs = {
    {3, 3}, {5, 3}, {6, 3}, {6, 4}, {6, 5}, {6, 6}};

}  // namespace

TEST_CASE("partition plans") {
  const ReferencePlan p33 = partition_plan(3, 3);
  CHECK(p33.blocks == std::vector<int>{2, 1});
  CHECK(p33.category == PlanCategory::TwoBlock);
  CHECK(p33.q == 1);
  CHECK(p33.remainder == 1);

  const ReferencePlan p64 = partition_plan(6, 4);
  CHECK(p64.blocks == std::vector<int>{3, 3});
  CHECK(p64.q == 2);
  CHECK(p64.category == PlanCategory::TwoBlock);  // equal-split boundary

  const ReferencePlan p53 = partition_plan(5, 3);
  CHECK(p53.blocks == std::vector<int>{2, 2, 1});
  CHECK(p53.category == PlanCategory::Remainder);
  CHECK(p53.q == 2);
  CHECK(p53.remainder == 1);

  const ReferencePlan p63 = partition_plan(6, 3);
  CHECK(p63.blocks == std::vector<int>{2, 2, 2});
  CHECK(p63.category == PlanCategory::EqualSplit);

  CHECK_THROWS_AS(partition_plan(3, 7), Error);
  CHECK_THROWS_AS(partition_plan(4, 1), Error);
}

TEST_CASE("minimum purities are the exact rational thresholds") {
  CHECK(min_purity(partition_plan(3, 3)) == 5.0 / 9.0);
  CHECK(min_purity(partition_plan(5, 3)) == 9.0 / 25.0);
  CHECK(min_purity(partition_plan(6, 3)) == 1.0 / 3.0);
  CHECK(min_purity(partition_plan(6, 4)) == 0.5);
}

TEST_CASE("two-block weights from the purity quadratic") {
  const ReferencePlan plan = partition_plan(3, 3);

  const ReferenceWeights at_one = solve_weights(plan, 1.0);
  CHECK(at_one.p1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(at_one.p_r == doctest::Approx(0.0).epsilon(1e-14));

  // At the 5/9 threshold the quadratic's roots are {2/3, 1/3}; the ranked
  // solution takes p1 = 2/3 and leaves the quoted 1/3 as the complement,
  // which is exactly what makes sigma's populations uniform there.
  const ReferenceWeights at_min = solve_weights(plan, 5.0 / 9.0);
  CHECK(std::abs(at_min.p1 - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(at_min.p_r - 1.0 / 3.0) < 1e-12);
  const Eigen::VectorXd pops = sigma_populations(plan, at_min);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(pops(i) - 1.0 / 3.0) < 1e-12);

  CHECK_THROWS_AS(solve_weights(plan, 0.5), Error);
  CHECK_THROWS_AS(solve_weights(plan, 1.01), Error);
}

TEST_CASE("equal-split weights reproduce the sigma_3 probabilities") {
  const ReferencePlan plan = partition_plan(6, 3);
  for (int i = 0; i <= 40; ++i) {
    const double s = 1.0 / 3.0 + (1.0 - 1.0 / 3.0) * i / 40;
    const ReferenceWeights w = solve_weights(plan, s);
    const double p1_paper = (std::sqrt(6.0 * s - 2.0) + 1.0) / 3.0;
    REQUIRE(std::abs(w.p1 - p1_paper) < 1e-12);
    REQUIRE(std::abs(w.p_mid - 0.5 * (1.0 - w.p1)) < 1e-12);
  }
  const ReferenceWeights at_min = solve_weights(plan, 1.0 / 3.0);
  CHECK(std::abs(at_min.p1 - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(at_min.p_mid - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("five-three piecewise remainder weights") {
  const ReferencePlan plan = partition_plan(5, 3);

  SUBCASE("branches agree at the 3/7 junction") {
    const double s = 3.0 / 7.0;
    const double upper = (2.0 - std::sqrt(1.0 + 3.0 * s)) / 6.0;
    const double lower = (1.0 - std::sqrt(6.0 * s - 2.0)) / 3.0;
    CHECK(std::abs(upper - lower) < 1e-12);
    const ReferenceWeights w = solve_weights(plan, s);
    CHECK(std::abs(w.p_r - upper) < 1e-12);
  }

  SUBCASE("boundary purity gives uniform populations") {
    const ReferenceWeights w = solve_weights(plan, 9.0 / 25.0);
    CHECK(std::abs(w.p_r - 0.2) < 1e-12);
    CHECK(std::abs(w.p1 - 0.4) < 1e-12);
    CHECK(std::abs(w.p_mid - 0.4) < 1e-12);
    const Eigen::VectorXd pops = sigma_populations(plan, w);
    for (int i = 0; i < 5; ++i) REQUIRE(std::abs(pops(i) - 0.2) < 1e-10);
  }

  SUBCASE("numeric maximization reproduces the closed form") {
    for (int i = 1; i <= 24; ++i) {
      const double s = 9.0 / 25.0 + (1.0 - 9.0 / 25.0) * i / 25;
      const ReferenceWeights closed = solve_weights(plan, s);
      const ReferenceWeights numeric = solve_weights_numeric(plan, s);
      REQUIRE(numeric.method == EkMethod::Numeric);
      REQUIRE(std::abs(numeric.p_r - closed.p_r) < 1e-6);
      const double tau_closed = tau(sigma_populations(plan, closed), 3);
      const double tau_numeric = tau(sigma_populations(plan, numeric), 3);
      REQUIRE(std::abs(tau_closed - tau_numeric) < 1e-10);
    }
  }
}

TEST_CASE("weight identities hold for every category") {
  const std::vector<std::pair<int, int>> plans = {
      {2, 2}, {3, 2}, {3, 3}, {4, 3}, {5, 3}, {6, 3}, {6, 4},
      {6, 5}, {6, 6}, {7, 3}, {7, 4}, {8, 3}, {9, 4}};
  for (const auto& [n, k] : plans) {
    const ReferencePlan plan = partition_plan(n, k);
    const double pmin = min_purity(plan);
    for (int i = 0; i <= 30; ++i) {
      const double s = pmin + (1.0 - pmin) * i / 30;
      const ReferenceWeights w = solve_weights(plan, s);
      const std::vector<double> list = weight_list(plan, w);
      REQUIRE(list.size() == plan.blocks.size());
      double sum = 0.0, sum2 = 0.0;
      for (double p : list) {
        REQUIRE(p >= -1e-12);
        sum += p;
        sum2 += p * p;
      }
      REQUIRE(std::abs(sum - 1.0) < 1e-10);
      REQUIRE(std::abs(sum2 - s) < 1e-10);
      REQUIRE(w.p1 >= w.p_mid - 1e-12);
      REQUIRE(w.p1 >= w.p_r - 1e-12);
      REQUIRE(std::abs(purity(build_sigma(plan, w)) - s) < 1e-10);
    }
    // boundary recovery: uniform site populations at the threshold
    const Eigen::VectorXd pops =
        sigma_populations(plan, solve_weights(plan, pmin));
    for (int i = 0; i < n; ++i) REQUIRE(std::abs(pops(i) - 1.0 / n) < 1e-9);
  }
}

TEST_CASE("build_sigma worked examples") {
  // (3,3) at purity 1 is Eq. 7 with p = 1
  const ReferencePlan p33 = partition_plan(3, 3);
  const DensityMatrix sigma1 = build_sigma(p33, solve_weights(p33, 1.0));
  CHECK(std::abs(sigma1(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(sigma1(0, 1) - 0.5) < 1e-14);
  CHECK(std::abs(sigma1(2, 2)) < 1e-14);

  // (6,6) at purity 1 is the pure |W_12345>
  const ReferencePlan p66 = partition_plan(6, 6);
  const DensityMatrix sigma66 = build_sigma(p66, solve_weights(p66, 1.0));
  const DensityMatrix w5 = from_pure(PureState::block_w(6, 0, 5));
  CHECK((sigma66.matrix() - w5.matrix()).cwiseAbs().maxCoeff() < 1e-14);

  // purity-1 recovery in general: sigma is pure with k-1 equal populations
  for (const auto& [n, k] : kStudyPairs) {
    const ReferencePlan plan = partition_plan(n, k);
    const ReferenceWeights w = solve_weights(plan, 1.0);
    const DensityMatrix sigma = build_sigma(plan, w);
    REQUIRE(purity(sigma) == doctest::Approx(1.0).epsilon(1e-13));
    REQUIRE(tau_of(sigma, k) == 0.0);
  }
}

TEST_CASE("E_k on worked examples") {
  const DensityMatrix w3 = from_pure(PureState::block_w(3, 0, 3));
  CHECK(e_k(w3, 3) == doctest::Approx(2.0 / 9).epsilon(1e-12));

  EkMethod method = EkMethod::ClosedForm;
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
  CHECK(e_k(mixed, 3, &method) == 0.0);
  CHECK(method == EkMethod::BelowThreshold);
  CHECK(e_k(mixed, 2) == doctest::Approx(0.0).epsilon(1e-13));

  CHECK_THROWS_AS(e_k(w3, 4), Error);
}

TEST_CASE("E_2 through the reference construction matches the purity form") {
  for (int trial = 0; trial < 300; ++trial) {
    RngEngine rng = stream_rng(201, static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> dim(2, 6);
    const int n = dim(rng);
    std::uniform_int_distribution<int> rank(1, n);
    const DensityMatrix rho = random_mixed(n, rank(rng), rng);
    REQUIRE(std::abs(e_k(rho, 2) - e2_purity_form(rho)) < 1e-12);
  }
}

TEST_CASE("border curve endpoints and sanity") {
  CHECK(border_tau(3, 3, 1.0) == 0.0);
  // At the threshold the border reaches the global tau maximum (uniform
  // populations), which is why nothing is detectable below it.
  CHECK(border_tau(3, 3, 5.0 / 9.0) == doctest::Approx(2.0 / 9).epsilon(1e-13));
  CHECK(border_tau(6, 4, 0.5) == doctest::Approx(tau_max(6, 4)).epsilon(1e-13));

  const std::vector<double> grid = {5.0 / 9.0, 0.7, 0.9, 1.0};
  const auto curve = border_curve(3, 3, grid);
  CHECK(curve.size() == 4);
  for (const auto& [s, t] : curve) CHECK(t >= 0.0);
  CHECK_THROWS_AS(border_curve(3, 3, {0.3}), Error);
}

TEST_CASE("profile fills every k with method metadata") {
  const DensityMatrix w6 = from_pure(PureState::block_w(6, 0, 6));
  const DelocalizationProfile p = profile(w6);
  CHECK(p.dim == 6);
  CHECK(p.moments.size() == 5);
  CHECK(p.purity == doctest::Approx(1.0).epsilon(1e-13));
  for (int k = 2; k <= 6; ++k) {
    CHECK(std::abs(p.e_k(k) - tau_max(6, k)) < 1e-12);
    CHECK(p.method[k - 2] == EkMethod::ClosedForm);
  }
  const DelocalizationProfile capped = profile(w6, 3);
  CHECK(capped.moments.size() == 2);
}

TEST_CASE("producible states never cross the analytic border") {
  for (const auto& [n, k] : kStudyPairs) {
    const ReferencePlan plan = partition_plan(n, k);
    const double pmin = min_purity(plan);
    SamplerConfig cfg;
    cfg.n = n;
    cfg.kind = SampleKind::Producible;
    cfg.max_block = k - 1;
    cfg.max_components = static_cast<int>(plan.blocks.size()) + 1;
    cfg.seed = 4242 + n * 16 + k;
    cfg.count = 100000;
    double worst = -1.0;
    scatter_experiment(
        cfg, k,
        [&](const ScatterPoint* pts, long m) {
          for (long i = 0; i < m; ++i) {
            if (pts[i].purity < pmin) continue;
            worst = std::max(worst,
                             pts[i].tau - border_tau(n, k, pts[i].purity));
          }
        },
        2);
    REQUIRE(worst <= 1e-9);
  }
}

TEST_CASE("E_k of producible states is zero, of W states positive") {
  RngEngine rng = stream_rng(202, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const DensityMatrix rho = random_producible(3, 2, 3, rng);
    REQUIRE(e_k(rho, 3) <= 1e-9);
  }
  for (int n = 3; n <= 6; ++n) {
    const DensityMatrix w = from_pure(PureState::block_w(n, 0, n));
    for (int k = 3; k <= n; ++k) REQUIRE(e_k(w, k) > 0.0);
  }
}

TEST_CASE("fitted border tracks the analytic curve") {
  CHECK_THROWS_AS(fitted_border(3, 3, 10, 1), Error);

  // deterministic for any thread count
  const FittedBorder one = fitted_border(3, 3, 20000, 5, 1);
  const FittedBorder three = fitted_border(3, 3, 20000, 5, 3);
  REQUIRE(one.nodes.size() == three.nodes.size());
  for (std::size_t i = 0; i < one.nodes.size(); ++i) {
    REQUIRE(one.nodes[i] == three.nodes[i]);
  }

  for (const auto& [n, k] : {std::pair{3, 3}, std::pair{5, 3}}) {
    const FittedBorder fit = fitted_border(n, k, 1000000, 777, 2);
    const double pmin = min_purity(partition_plan(n, k));
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double s = pmin + (1.0 - pmin) * i / 100;
      worst = std::max(worst, std::abs(fit(s) - border_tau(n, k, s)));
    }
    REQUIRE(worst < 2e-2);
  }
}
