#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wdeloc/refstate.hpp"

namespace wdeloc {

struct VerificationReport {
  std::string check_name;
  long instances = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::string worst_case;
  bool passed = false;
};

struct BorderSearchResult {
  double target_purity = 0.0;
  double best_tau = 0.0;
  double best_purity = 0.0;  // purity actually reached by the argmax
  long accepted = 0;         // samples that met the purity constraint
  std::string argmax_description;
};

/// Brute-force search for the largest tau_k over (k-1)-producible states at
/// fixed purity: mixtures of up to q+1 block-supported Haar-random pure
/// states with Dirichlet weights, driven onto the purity shell (within 1e-6)
/// by 1-D weight tempering, rejecting draws that cannot reach it.
BorderSearchResult border_search(int n, int k, double target_purity,
                                 long budget, std::uint64_t seed,
                                 int threads = 1);

/// M_2 contributions of a p1/p2 pair of constituent states: the
/// single-mode-overlap form (structural and expanded, which must agree) and
/// the disjoint variant with the second state shrunk to m-1 modes.
struct OverlapM2 {
  double overlap_structural = 0.0;
  double overlap_expanded = 0.0;
  double disjoint = 0.0;
};

OverlapM2 overlap_m2_terms(int k, int m, double p1, double p2);

/// Largest admissible p2 for which the no-overlap construction is proven
/// better: 2 (m-1) / (k-1) * p1.
double overlap_bound(int k, int m, double p1);

/// Randomized check that M_2(overlap) >= M_2(disjoint) whenever p2 is below
/// the bound; the violation reported is max(disjoint - overlap).
VerificationReport overlap_inequality_check(int k, int m, long trials,
                                            std::uint64_t seed);

/// Closed-form weight identities on a purity grid for each (n, k): weights
/// sum to 1, squares sum to the purity, ranked ordering, branch continuity
/// at 3/7 for (5,3), and build_sigma purity agreement; all to 1e-10.
VerificationReport weight_consistency_check(
    const std::vector<std::pair<int, int>>& plans, int grid_points = 100);

/// border_search must stay below the analytic border (within the purity
/// constraint slack) for every pair and purity point.
VerificationReport reference_dominance_check(
    const std::vector<std::pair<int, int>>& plans, int purity_points,
    long budget, std::uint64_t seed, int threads = 1);

}  // namespace wdeloc
