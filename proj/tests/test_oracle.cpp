#include <doctest.h>

#include <cmath>

#include "wdeloc/oracle.hpp"

using namespace wdeloc;

TEST_CASE("overlap M_2 algebra") {
  // Structural and expanded forms agree; p2 = 0 removes the cross term.
  for (int k = 3; k <= 6; ++k) {
    for (int m = 2; m <= k - 1; ++m) {
      const OverlapM2 zero = overlap_m2_terms(k, m, 0.7, 0.0);
      CHECK(std::abs(zero.overlap_structural - zero.overlap_expanded) < 1e-15);
      CHECK(std::abs(zero.overlap_expanded - 0.49 / (k - 1.0)) < 1e-15);

      const OverlapM2 t = overlap_m2_terms(k, m, 0.6, 0.2);
      CHECK(std::abs(t.overlap_structural - t.overlap_expanded) < 1e-15);
    }
  }
  CHECK_THROWS_AS(overlap_m2_terms(4, 1, 0.5, 0.2), Error);
  CHECK_THROWS_AS(overlap_m2_terms(4, 4, 0.5, 0.2), Error);
}

TEST_CASE("overlap inequality holds inside the bound and can reverse beyond") {
  for (int k = 3; k <= 6; ++k) {
    for (int m = 2; m <= k - 1; ++m) {
      const VerificationReport report =
          overlap_inequality_check(k, m, 10000, 71);
      CHECK(report.passed);
      CHECK(report.max_violation <= 1e-12);
      CHECK(report.instances > 1000);
    }
  }

  // just beyond the bound the disjoint construction wins (m < k - 1 keeps
  // p2 <= p1 intact after the bump)
  const double p1 = 0.5;
  const double beyond = overlap_bound(6, 2, p1) * 1.05;
  const OverlapM2 t = overlap_m2_terms(6, 2, p1, beyond);
  CHECK(t.disjoint > t.overlap_expanded);
}

TEST_CASE("weight consistency across categories") {
  const VerificationReport report = weight_consistency_check(
      {{3, 3}, {4, 3}, {5, 3}, {6, 3}, {6, 4}, {6, 5}, {6, 6}, {7, 4}});
  CHECK(report.passed);
  CHECK(report.max_violation <= 1e-10);
}

TEST_CASE("border search stays under the analytic border and reaches it") {
  // At purity 1 only pure block states survive, so tau_3 is zero up to the
  // 1e-6 purity-shell slack (the border slope is 3/4 there).
  const BorderSearchResult pure = border_search(3, 3, 1.0, 2000, 5);
  CHECK(pure.best_tau <= 2e-6);
  CHECK(pure.best_tau <= border_tau(3, 3, pure.best_purity) + 1e-9);

  const double target = 0.8;
  const BorderSearchResult res = border_search(3, 3, target, 100000, 5, 2);
  const double border = border_tau(3, 3, target);
  CHECK(res.best_tau <= border + 1e-6);
  CHECK(res.best_tau >= border - 5e-3);
  CHECK(std::abs(res.best_purity - target) <= 1e-6);
  CHECK(res.argmax_description.find("populations") != std::string::npos);

  // the (5,3) branch point, against the piecewise closed form
  const double junction = 3.0 / 7.0;
  const BorderSearchResult res53 = border_search(5, 3, junction, 100000, 5, 2);
  const double border53 = border_tau(5, 3, junction);
  CHECK(res53.best_tau <= border53 + 1e-6);
  CHECK(res53.best_tau >= border53 - 5e-3);

  CHECK_THROWS_AS(border_search(3, 3, 0.2, 2000, 5), Error);
  CHECK_THROWS_AS(border_search(3, 3, 0.8, 10, 5), Error);
}

TEST_CASE("search results are independent of the thread count") {
  const BorderSearchResult a = border_search(3, 3, 0.7, 20000, 9, 1);
  const BorderSearchResult b = border_search(3, 3, 0.7, 20000, 9, 3);
  CHECK(a.best_tau == b.best_tau);
  CHECK(a.accepted == b.accepted);
  CHECK(a.argmax_description == b.argmax_description);
}
