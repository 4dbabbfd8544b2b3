#include "wdeloc/refstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wdeloc/sampling.hpp"

namespace wdeloc {

namespace {

constexpr double kPurityClampSlack = 1e-8;   // absorbs drift of validated states
constexpr double kWeightSolveTol = 1e-10;

double checked_sqrt(double x) {
  // Discriminants can dip below zero by roundoff at purity boundaries.
  if (x < 0.0) {
    if (x < -1e-9) {
      throw Error(ErrorKind::PurityOutOfRange,
                  "weight discriminant is negative; purity below threshold");
    }
    return 0.0;
  }
  return std::sqrt(x);
}

/// Clamp a target purity into [pmin, 1], tolerating numerical drift just
/// outside; anything further out is a contract violation.
double clamp_purity(double s, double pmin) {
  if (s > 1.0) {
    if (s - 1.0 > kPurityClampSlack) {
      throw Error(ErrorKind::PurityOutOfRange, "purity exceeds 1", s - 1.0);
    }
    return 1.0;
  }
  if (s < pmin) {
    if (pmin - s > 1e-12) {
      throw Error(ErrorKind::PurityOutOfRange,
                  "purity below the plan's minimum", pmin - s);
    }
    return pmin;
  }
  return s;
}

// p1 from the quadratic q p1^2 - 2 c p1 + c^2 - (q-1)(s - p_r^2) = 0 with
// c = 1 - p_r, taking the root continuous with p1 = 1 at purity 1.
// Returns false when the discriminant is negative (infeasible p_r).
bool remainder_p1(int q, double s, double p_r, double* p1_out) {
  const double c = 1.0 - p_r;
  const double disc = (q - 1.0) * (q * (s - p_r * p_r) - c * c);
  if (disc < -1e-14) return false;
  *p1_out = (c + std::sqrt(std::max(disc, 0.0))) / q;
  return true;
}

struct RemainderEval {
  bool feasible = false;
  double p1 = 0.0;
  double p_mid = 0.0;
  double tau_value = 0.0;
};

RemainderEval eval_remainder(const ReferencePlan& plan, double s, double p_r) {
  RemainderEval out;
  if (p_r < -1e-15 || p_r > 1.0) return out;
  double p1 = 0.0;
  if (!remainder_p1(plan.q, s, p_r, &p1)) return out;
  const double p_mid = plan.q > 1 ? (1.0 - p1 - p_r) / (plan.q - 1) : 0.0;
  if (p_mid < -1e-14 || p1 + 1e-14 < p_r) return out;  // ranked probabilities
  Eigen::VectorXd pops(plan.n);
  int mode = 0;
  const int block = plan.k - 1;
  pops.segment(mode, block).setConstant(p1 / block);
  mode += block;
  for (int b = 1; b < plan.q; ++b) {
    pops.segment(mode, block).setConstant(std::max(p_mid, 0.0) / block);
    mode += block;
  }
  pops.segment(mode, plan.remainder)
      .setConstant(std::max(p_r, 0.0) / plan.remainder);
  out.feasible = true;
  out.p1 = p1;
  out.p_mid = std::max(p_mid, 0.0);
  out.tau_value = tau(pops, plan.k);
  return out;
}

// Bounded 1-D maximization of tau_k(sigma(p_r)) for remainder plans
// without a closed form: coarse scan plus golden-section refinement
// around the best bracket.
ReferenceWeights solve_remainder_numeric(const ReferencePlan& plan, double s) {
  const int q = plan.q;
  // Feasibility of the p1 quadratic: (q+1) p_r^2 - 2 p_r + 1 - q s <= 0.
  const double feas_disc = q * ((q + 1.0) * s - 1.0);
  const double root = std::sqrt(std::max(feas_disc, 0.0));
  double lo = std::max(0.0, (1.0 - root) / (q + 1.0));
  double hi = (1.0 + root) / (q + 1.0);
  // p_mid >= 0 additionally needs p_r^2 + (1-p_r)^2 >= s.
  if (2.0 * s - 1.0 > 0.0) {
    hi = std::min(hi, 0.5 * (1.0 - std::sqrt(2.0 * s - 1.0)));
  }
  hi = std::max(hi, lo);

  const int kScan = 512;
  double best_pr = lo;
  double best_tau = -1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double pr = lo + (hi - lo) * i / kScan;
    const RemainderEval eval = eval_remainder(plan, s, pr);
    if (eval.feasible && eval.tau_value > best_tau) {
      best_tau = eval.tau_value;
      best_pr = pr;
    }
  }
  if (best_tau < 0.0) {
    throw Error(ErrorKind::PurityOutOfRange,
                "no admissible remainder weight at this purity");
  }

  // Golden-section on the bracket around the best scan point.
  const double step = (hi - lo) / kScan;
  double a = std::max(lo, best_pr - step);
  double b = std::min(hi, best_pr + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  auto value = [&](double pr) {
    const RemainderEval eval = eval_remainder(plan, s, pr);
    return eval.feasible ? eval.tau_value : -1.0;
  };
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = value(x1);
  double f2 = value(x2);
  while (b - a > kWeightSolveTol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = value(x1);
    }
  }
  double pr = 0.5 * (a + b);
  RemainderEval eval = eval_remainder(plan, s, pr);
  if (!eval.feasible || eval.tau_value < best_tau) {
    // the refined bracket can straddle the feasibility edge; keep the scan's
    // point in that case
    pr = best_pr;
    eval = eval_remainder(plan, s, pr);
  }

  ReferenceWeights w;
  w.p1 = eval.p1;
  w.p_mid = eval.p_mid;
  w.p_r = pr;
  w.method = EkMethod::Numeric;

  // When the optimum sits on the feasibility boundary the p1 quadratic has a
  // double root, p1 = p_mid = (1 - p_r) / q.  Using that form directly avoids
  // the square-root sensitivity of the generic solve, which would otherwise
  // smear the weights by sqrt(p_r error).
  if (root > 0.0 && lo > 0.0) {
    Eigen::VectorXd pops(plan.n);
    const int block = plan.k - 1;
    const double flat = (1.0 - lo) / q;
    pops.head(q * block).setConstant(flat / block);
    pops.tail(plan.remainder).setConstant(lo / plan.remainder);
    if (tau(pops, plan.k) >= eval.tau_value - 1e-12 && flat >= lo - 1e-14) {
      w.p1 = flat;
      w.p_mid = flat;
      w.p_r = lo;
    }
  }
  return w;
}

// The (n=5, k=3) case has a piecewise closed form: the branch point sits
// at purity 3/7, below which the p1/p2 discriminant turns negative and
// p_r drops to its lowest feasible value.
ReferenceWeights solve_five_three(double s) {
  ReferenceWeights w;
  if (s >= 3.0 / 7.0) {
    w.p_r = (2.0 - std::sqrt(1.0 + 3.0 * s)) / 6.0;
    const double disc = 2.0 * s - 1.0 + 2.0 * w.p_r - 3.0 * w.p_r * w.p_r;
    w.p1 = 0.5 * (1.0 - w.p_r + checked_sqrt(disc));
    w.p_mid = 1.0 - w.p1 - w.p_r;
  } else {
    // Below the branch point p_r sits at its lowest feasible value, where
    // the p1/p2 discriminant vanishes and the two block weights coincide.
    w.p_r = (1.0 - std::sqrt(6.0 * s - 2.0)) / 3.0;
    w.p1 = 0.5 * (1.0 - w.p_r);
    w.p_mid = w.p1;
  }
  w.method = EkMethod::ClosedForm;
  return w;
}

}  // namespace

const char* to_string(PlanCategory category) {
  switch (category) {
    case PlanCategory::TwoBlock: return "two-block";
    case PlanCategory::EqualSplit: return "equal-split";
    case PlanCategory::Remainder: return "remainder";
  }
  return "unknown";
}

ReferencePlan partition_plan(int n, int k) {
  if (n < 2 || k < 2 || k > n) {
    throw Error(ErrorKind::KOutOfRange, "need 2 <= k <= n");
  }
  ReferencePlan plan;
  plan.n = n;
  plan.k = k;
  const int block = k - 1;
  plan.q = n / block;
  plan.remainder = n % block;
  plan.blocks.assign(plan.q, block);
  if (plan.remainder > 0) plan.blocks.push_back(plan.remainder);
  if (plan.blocks.size() == 2) {
    plan.category = PlanCategory::TwoBlock;
  } else if (plan.remainder == 0) {
    plan.category = PlanCategory::EqualSplit;
  } else {
    plan.category = PlanCategory::Remainder;
  }
  return plan;
}

double min_purity(const ReferencePlan& plan) {
  // Integer numerator keeps rational thresholds like 5/9 and 9/25 exact.
  long long sum_sq = 0;
  for (int size : plan.blocks) sum_sq += static_cast<long long>(size) * size;
  return double(sum_sq) / (double(plan.n) * plan.n);
}

ReferenceWeights solve_weights(const ReferencePlan& plan, double target_purity) {
  const double pmin = min_purity(plan);
  const double s = clamp_purity(target_purity, pmin);

  ReferenceWeights w;
  switch (plan.category) {
    case PlanCategory::TwoBlock: {
      w.p1 = 0.5 * (1.0 + checked_sqrt(2.0 * s - 1.0));
      if (plan.remainder > 0) {
        w.p_r = 1.0 - w.p1;
      } else {
        w.p_mid = 1.0 - w.p1;
      }
      w.method = EkMethod::ClosedForm;
      break;
    }
    case PlanCategory::EqualSplit: {
      const double q = plan.q;
      w.p1 = (checked_sqrt((q * q - q) * s - q + 1.0) + 1.0) / q;
      w.p_mid = (1.0 - w.p1) / (q - 1.0);
      w.method = EkMethod::ClosedForm;
      break;
    }
    case PlanCategory::Remainder: {
      if (plan.n == 5 && plan.k == 3) {
        w = solve_five_three(s);
      } else {
        w = solve_remainder_numeric(plan, s);
      }
      break;
    }
  }
  w.purity_min = pmin;
  return w;
}

ReferenceWeights solve_weights_numeric(const ReferencePlan& plan,
                                       double target_purity) {
  const double pmin = min_purity(plan);
  const double s = clamp_purity(target_purity, pmin);
  if (plan.category != PlanCategory::Remainder) {
    // Non-remainder weights have no free parameter; the closed form is the
    // only solution.
    return solve_weights(plan, s);
  }
  ReferenceWeights w = solve_remainder_numeric(plan, s);
  w.purity_min = pmin;
  return w;
}

std::vector<double> weight_list(const ReferencePlan& plan,
                                const ReferenceWeights& weights) {
  std::vector<double> out;
  out.reserve(plan.blocks.size());
  out.push_back(weights.p1);
  for (int b = 1; b < plan.q; ++b) out.push_back(weights.p_mid);
  if (plan.remainder > 0) out.push_back(weights.p_r);
  return out;
}

Eigen::VectorXd sigma_populations(const ReferencePlan& plan,
                                  const ReferenceWeights& weights) {
  const std::vector<double> w = weight_list(plan, weights);
  Eigen::VectorXd pops(plan.n);
  int mode = 0;
  for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
    const int size = plan.blocks[b];
    pops.segment(mode, size).setConstant(std::max(w[b], 0.0) / size);
    mode += size;
  }
  return pops;
}

DensityMatrix build_sigma(const ReferencePlan& plan,
                          const ReferenceWeights& weights) {
  const std::vector<double> w = weight_list(plan, weights);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(plan.n, plan.n);
  int mode = 0;
  for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
    const int size = plan.blocks[b];
    const double weight = std::max(w[b], 0.0);
    acc.block(mode, mode, size, size).setConstant(weight / size);
    mode += size;
  }
  return DensityMatrix(std::move(acc));
}

double border_tau(int n, int k, double target_purity) {
  const ReferencePlan plan = partition_plan(n, k);
  const ReferenceWeights w = solve_weights(plan, target_purity);
  return tau(sigma_populations(plan, w), k);
}

std::vector<std::pair<double, double>> border_curve(
    int n, int k, const std::vector<double>& purity_grid) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(purity_grid.size());
  for (double s : purity_grid) {
    curve.emplace_back(s, border_tau(n, k, s));
  }
  return curve;
}

double e_k(const DensityMatrix& rho, int k, EkMethod* method_out) {
  const ReferencePlan plan = partition_plan(rho.dim(), k);
  const double pmin = min_purity(plan);
  const double s = purity(rho);
  if (s < pmin - 1e-12) {
    // Inside the (k-1)-producible region the closest reference state is the
    // state itself.
    if (method_out) *method_out = EkMethod::BelowThreshold;
    return 0.0;
  }
  const ReferenceWeights w = solve_weights(plan, s);
  if (method_out) *method_out = w.method;
  const double diff = tau_of(rho, k) - tau(sigma_populations(plan, w), k);
  // States under the border are (k-1)-producible at their purity; their
  // closest reference state is themselves, so the measure reads 0 rather
  // than a negative value.
  return diff > 0.0 ? diff : 0.0;
}

DelocalizationProfile profile(const DensityMatrix& rho, int k_max) {
  const int n = rho.dim();
  const int top = (k_max > 0) ? std::min(k_max, n) : n;
  DelocalizationProfile p;
  p.dim = n;
  p.purity = purity(rho);
  for (int k = 2; k <= top; ++k) {
    p.moments.push_back(moment(rho, k));
    p.tau.push_back(tau_of(rho, k));
    EkMethod method = EkMethod::ClosedForm;
    p.e.push_back(e_k(rho, k, &method));
    p.method.push_back(method);
  }
  return p;
}

double FittedBorder::operator()(double target_purity) const {
  if (nodes.empty()) {
    throw Error(ErrorKind::InsufficientSamples, "fitted border has no nodes");
  }
  const double s = std::clamp(target_purity, nodes.front().first,
                              nodes.back().first);
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), s,
      [](const std::pair<double, double>& node, double x) {
        return node.first < x;
      });
  if (it == nodes.begin()) return it->second;
  if (it == nodes.end()) return nodes.back().second;
  const auto& [x1, y1] = *(it - 1);
  const auto& [x2, y2] = *it;
  if (x2 == x1) return std::max(y1, y2);
  const double t = (s - x1) / (x2 - x1);
  return y1 + t * (y2 - y1);
}

FittedBorder fitted_border(int n, int k, long samples, std::uint64_t seed,
                           int threads) {
  if (samples < 10000) {
    throw Error(ErrorKind::InsufficientSamples,
                "fitted border needs at least 1e4 samples");
  }
  const ReferencePlan plan = partition_plan(n, k);

  SamplerConfig cfg;
  cfg.n = n;
  cfg.kind = SampleKind::Producible;
  cfg.max_block = k - 1;
  cfg.max_components = static_cast<int>(plan.blocks.size()) + 1;
  cfg.seed = seed;
  cfg.count = samples;

  std::vector<ScatterPoint> points;
  points.reserve(static_cast<std::size_t>(samples));
  scatter_experiment(
      cfg, k,
      [&points](const ScatterPoint* data, long count) {
        points.insert(points.end(), data, data + count);
      },
      threads);

  std::sort(points.begin(), points.end(),
            [](const ScatterPoint& a, const ScatterPoint& b) {
              return a.purity < b.purity;
            });

  // Least concave majorant (upper convex-hull boundary) of the cloud: a
  // monotone-in-slope curve that dominates every sample.
  std::vector<std::pair<double, double>> hull;
  auto cross = [](const std::pair<double, double>& o,
                  const std::pair<double, double>& a,
                  const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  for (const ScatterPoint& pt : points) {
    const std::pair<double, double> p{pt.purity, pt.tau};
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }

  FittedBorder border;
  border.n = n;
  border.k = k;
  border.purity_floor = hull.empty() ? 1.0 : hull.front().first;
  border.nodes = std::move(hull);
  return border;
}

}  // namespace wdeloc
