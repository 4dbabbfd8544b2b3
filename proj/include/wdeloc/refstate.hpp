#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wdeloc/measures.hpp"

namespace wdeloc {

enum class PlanCategory { TwoBlock, EqualSplit, Remainder };

const char* to_string(PlanCategory category);

/// Block partition of n modes used to build the closest (k-1)-entangled
/// reference state: q blocks of size k-1 plus an optional remainder block,
/// placed on contiguous ascending mode ranges.
struct ReferencePlan {
  int n = 0;
  int k = 0;
  std::vector<int> blocks;  // sizes; q copies of k-1, then the remainder
  PlanCategory category = PlanCategory::TwoBlock;
  int q = 0;          // number of (k-1)-sized blocks
  int remainder = 0;  // n mod (k-1), 0 when none
};

ReferencePlan partition_plan(int n, int k);

/// Purity at which the weight solutions reach their boundary,
/// sum_i (size_i / n)^2.  Below this value E_k is defined as 0 (the closest
/// (k-1)-entangled state is the state itself).
double min_purity(const ReferencePlan& plan);

/// Probabilities attached to the plan's blocks: p1 for the first block, a
/// shared p_mid for blocks 2..q, and p_r for the remainder block.  Solves
/// p1 + (q-1) p_mid + p_r = 1 and p1^2 + (q-1) p_mid^2 + p_r^2 = purity with
/// ranked values p1 >= p_mid, p1 >= p_r.
struct ReferenceWeights {
  double p1 = 0.0;
  double p_mid = 0.0;
  double p_r = 0.0;
  double purity_min = 0.0;
  EkMethod method = EkMethod::ClosedForm;
};

/// Closed forms for the two-block and equal-split categories and for the
/// (n=5, k=3) piecewise remainder case; any other remainder plan is solved
/// by bounded 1-D maximization of tau_k over the admissible p_r.
ReferenceWeights solve_weights(const ReferencePlan& plan, double target_purity);

/// Forces the numeric maximization on remainder plans (including (5,3),
/// where it should reproduce the piecewise closed form).
ReferenceWeights solve_weights_numeric(const ReferencePlan& plan,
                                       double target_purity);

/// One probability per block, in block order.
std::vector<double> weight_list(const ReferencePlan& plan,
                                const ReferenceWeights& weights);

/// Site populations of the reference state (block weight spread uniformly
/// over the block's modes).
Eigen::VectorXd sigma_populations(const ReferencePlan& plan,
                                  const ReferenceWeights& weights);

/// Mixture of block W states with the given weights.
DensityMatrix build_sigma(const ReferencePlan& plan,
                          const ReferenceWeights& weights);

/// tau_k of the closest (k-1)-entangled state at the given purity: the
/// analytic border of the producible region.
double border_tau(int n, int k, double target_purity);

/// Border sampled on a purity grid (each point within [min_purity, 1]).
std::vector<std::pair<double, double>> border_curve(
    int n, int k, const std::vector<double>& purity_grid);

/// E_k(rho) = tau_k(rho) - tau_k(sigma) with sigma the closest
/// (k-1)-entangled state at purity(rho); 0 below the purity threshold.
double e_k(const DensityMatrix& rho, int k, EkMethod* method_out = nullptr);

/// Full profile: purity, M_2..M_n, tau_2..tau_n, E_2..E_n (k capped at
/// k_max when positive).
DelocalizationProfile profile(const DensityMatrix& rho, int k_max = 0);

/// Upper envelope of sampled (k-1)-producible states binned by purity and
/// smoothed into the least concave majorant; a drop-in substitute for
/// border_tau when no closed-form weights are wanted.
struct FittedBorder {
  int n = 0;
  int k = 0;
  double purity_floor = 0.0;
  std::vector<std::pair<double, double>> nodes;  // ascending purity

  double operator()(double target_purity) const;
};

FittedBorder fitted_border(int n, int k, long samples, std::uint64_t seed,
                           int threads = 1);

}  // namespace wdeloc
