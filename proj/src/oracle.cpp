#include "wdeloc/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "wdeloc/sampling.hpp"

namespace wdeloc {

namespace {

constexpr double kPurityShellTol = 1e-6;

struct TrialOutcome {
  bool accepted = false;
  double tau_value = 0.0;
  double purity_value = 0.0;
};

struct TrialScratch {
  std::vector<Eigen::VectorXcd> comps;
  std::vector<double> base_weights;
  std::vector<double> weights;
  std::vector<double> log_weights;
  Eigen::MatrixXd gram;
  Eigen::VectorXd pops;
};

void temper_weights(const std::vector<double>& log_w, double gamma,
                    std::vector<double>* out) {
  const std::size_t c = log_w.size();
  double max_log = -1e300;
  for (std::size_t i = 0; i < c; ++i) {
    max_log = std::max(max_log, gamma * log_w[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    (*out)[i] = std::exp(gamma * log_w[i] - max_log);
    sum += (*out)[i];
  }
  for (std::size_t i = 0; i < c; ++i) (*out)[i] /= sum;
}

double mixture_purity(const Eigen::MatrixXd& gram,
                      const std::vector<double>& w) {
  const Eigen::Index c = gram.rows();
  double s = 0.0;
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) s += w[i] * w[j] * gram(i, j);
  }
  return s;
}

// One search trial: draw a block-supported mixture, then walk the weight
// tempering exponent until the mixture sits on the target purity shell.
TrialOutcome run_trial(int n, int k, int max_comps, double target,
                       std::uint64_t seed, std::uint64_t index,
                       TrialScratch& scratch, std::string* describe) {
  RngEngine rng = stream_rng(seed, index);
  std::uniform_int_distribution<int> comp_count(1, max_comps);
  const int comps = comp_count(rng);

  scratch.comps.clear();
  for (int c = 0; c < comps; ++c) {
    std::uniform_int_distribution<int> size_dist(1, k - 1);
    const int size = size_dist(rng);
    std::vector<int> modes(n);
    for (int i = 0; i < n; ++i) modes[i] = i;
    for (int i = 0; i < size; ++i) {
      std::uniform_int_distribution<int> pick(i, n - 1);
      std::swap(modes[i], modes[pick(rng)]);
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < size; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      amp(modes[i]) = {re, im};
    }
    amp /= amp.norm();
    scratch.comps.push_back(std::move(amp));
  }

  std::exponential_distribution<double> expo(1.0);
  scratch.base_weights.resize(comps);
  double wsum = 0.0;
  for (double& w : scratch.base_weights) {
    w = expo(rng);
    wsum += w;
  }
  for (double& w : scratch.base_weights) w /= wsum;

  scratch.gram.resize(comps, comps);
  for (int i = 0; i < comps; ++i) {
    for (int j = 0; j < comps; ++j) {
      scratch.gram(i, j) = std::norm(scratch.comps[i].dot(scratch.comps[j]));
    }
  }

  scratch.log_weights.resize(comps);
  for (int i = 0; i < comps; ++i) {
    scratch.log_weights[i] = std::log(std::max(scratch.base_weights[i], 1e-300));
  }
  scratch.weights.resize(comps);

  auto purity_at = [&](double gamma) {
    temper_weights(scratch.log_weights, gamma, &scratch.weights);
    return mixture_purity(scratch.gram, scratch.weights);
  };

  TrialOutcome out;
  double lo = 0.0, hi = 256.0;
  double p_lo = purity_at(lo);
  double p_hi = purity_at(hi);
  if (target < p_lo - kPurityShellTol || target > p_hi + kPurityShellTol) {
    return out;  // shell unreachable from this draw
  }
  double gamma = lo, p = p_lo;
  for (int iter = 0; iter < 200 && std::abs(p - target) > 1e-8; ++iter) {
    gamma = 0.5 * (lo + hi);
    p = purity_at(gamma);
    if (p < target) {
      lo = gamma;
    } else {
      hi = gamma;
    }
  }
  if (std::abs(p - target) > kPurityShellTol) return out;
  temper_weights(scratch.log_weights, gamma, &scratch.weights);

  scratch.pops.setZero(n);
  for (int c = 0; c < comps; ++c) {
    scratch.pops += scratch.weights[c] * scratch.comps[c].cwiseAbs2();
  }
  out.accepted = true;
  out.purity_value = p;
  out.tau_value = tau(scratch.pops, k);

  if (describe) {
    std::ostringstream os;
    os << "{\"components\":" << comps << ",\"weights\":[";
    for (int c = 0; c < comps; ++c) {
      os << (c ? "," : "") << scratch.weights[c];
    }
    os << "],\"populations\":[";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << scratch.pops(i);
    os << "],\"purity\":" << p << "}";
    *describe = os.str();
  }
  return out;
}

}  // namespace

BorderSearchResult border_search(int n, int k, double target_purity,
                                 long budget, std::uint64_t seed,
                                 int threads) {
  const ReferencePlan plan = partition_plan(n, k);
  const double pmin = min_purity(plan);
  if (target_purity < pmin - 1e-12 || target_purity > 1.0 + 1e-12) {
    throw Error(ErrorKind::InfeasiblePurity,
                "target purity outside [min_purity, 1]");
  }
  if (budget < 1000) {
    throw Error(ErrorKind::InsufficientSamples, "budget must be >= 1e3");
  }
  const int max_comps = plan.q + 1;
  const int workers = std::max(1, threads);

  struct WorkerBest {
    double tau_value = -1.0;
    double purity_value = 0.0;
    std::uint64_t index = 0;
    long accepted = 0;
  };
  std::vector<WorkerBest> best(workers);

  auto work = [&](int w) {
    TrialScratch scratch;
    for (long t = w; t < budget; t += workers) {
      const TrialOutcome out =
          run_trial(n, k, max_comps, target_purity, seed,
                    static_cast<std::uint64_t>(t), scratch, nullptr);
      if (!out.accepted) continue;
      ++best[w].accepted;
      if (out.tau_value > best[w].tau_value ||
          (out.tau_value == best[w].tau_value &&
           static_cast<std::uint64_t>(t) < best[w].index)) {
        best[w].tau_value = out.tau_value;
        best[w].purity_value = out.purity_value;
        best[w].index = static_cast<std::uint64_t>(t);
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  WorkerBest merged;
  for (const WorkerBest& b : best) {
    merged.accepted += b.accepted;
    if (b.tau_value > merged.tau_value ||
        (b.tau_value == merged.tau_value && b.index < merged.index)) {
      merged.tau_value = b.tau_value;
      merged.purity_value = b.purity_value;
      merged.index = b.index;
    }
  }

  BorderSearchResult result;
  result.target_purity = target_purity;
  result.accepted = merged.accepted;
  if (merged.tau_value >= 0.0) {
    TrialScratch scratch;
    std::string description;
    const TrialOutcome out = run_trial(n, k, max_comps, target_purity, seed,
                                       merged.index, scratch, &description);
    result.best_tau = out.tau_value;
    result.best_purity = out.purity_value;
    result.argmax_description = std::move(description);
  }
  return result;
}

double overlap_bound(int k, int m, double p1) {
  return 2.0 * (m - 1.0) / (k - 1.0) * p1;
}

OverlapM2 overlap_m2_terms(int k, int m, double p1, double p2) {
  if (m < 2 || m > k - 1) {
    throw Error(ErrorKind::KOutOfRange, "need 2 <= m <= k - 1");
  }
  OverlapM2 out;
  const double km1 = k - 1.0;
  // sigma_1 spread over k-1 modes, sigma_2 over m modes sharing one mode.
  out.overlap_structural = (k - 2.0) / (km1 * km1) * p1 * p1 +
                           (m - 1.0) / (double(m) * m) * p2 * p2 +
                           std::pow(p1 / km1 + p2 / m, 2.0);
  out.overlap_expanded = p1 * p1 / km1 + p2 * p2 / m +
                         2.0 * p1 * p2 / (m * km1);
  // No overlap: sigma_2 shrunk to m-1 modes placed on fresh sites.
  out.disjoint = p1 * p1 / km1 + p2 * p2 / (m - 1.0);
  return out;
}

VerificationReport overlap_inequality_check(int k, int m, long trials,
                                            std::uint64_t seed) {
  if (trials < 1000) {
    throw Error(ErrorKind::InsufficientSamples, "need at least 1e3 trials");
  }
  VerificationReport report;
  {
    std::ostringstream os;
    os << "overlap-inequality k=" << k << " m=" << m;
    report.check_name = os.str();
  }
  report.tolerance = 1e-12;
  report.max_violation = -1e300;

  for (long t = 0; t < trials; ++t) {
    RngEngine rng = stream_rng(seed, static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double p1 = uniform(rng);
    const double cap = std::min({p1, 1.0 - p1, overlap_bound(k, m, p1)});
    if (cap <= 0.0) continue;
    const double p2 = cap * uniform(rng);
    const OverlapM2 terms = overlap_m2_terms(k, m, p1, p2);
    const double structural_gap =
        std::abs(terms.overlap_structural - terms.overlap_expanded);
    const double violation =
        std::max(terms.disjoint - terms.overlap_expanded, structural_gap);
    ++report.instances;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      std::ostringstream os;
      os << "{\"p1\":" << p1 << ",\"p2\":" << p2 << "}";
      report.worst_case = os.str();
    }
  }
  report.passed = report.max_violation <= report.tolerance;
  return report;
}

VerificationReport weight_consistency_check(
    const std::vector<std::pair<int, int>>& plans, int grid_points) {
  VerificationReport report;
  report.check_name = "weight-consistency";
  report.tolerance = 1e-10;
  report.max_violation = 0.0;

  auto note = [&](double violation, int n, int k, double s, const char* what) {
    ++report.instances;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      std::ostringstream os;
      os << "{\"n\":" << n << ",\"k\":" << k << ",\"purity\":" << s
         << ",\"check\":\"" << what << "\"}";
      report.worst_case = os.str();
    }
  };

  for (const auto& [n, k] : plans) {
    const ReferencePlan plan = partition_plan(n, k);
    const double pmin = min_purity(plan);
    for (int i = 0; i < grid_points; ++i) {
      const double s = pmin + (1.0 - pmin) * i / (grid_points - 1);
      const ReferenceWeights w = solve_weights(plan, s);
      const std::vector<double> list = weight_list(plan, w);
      double sum = 0.0, sum2 = 0.0, min_w = 1.0;
      for (double p : list) {
        sum += p;
        sum2 += p * p;
        min_w = std::min(min_w, p);
      }
      note(std::abs(sum - 1.0), n, k, s, "sum");
      note(std::abs(sum2 - s), n, k, s, "purity");
      note(std::max(0.0, -min_w), n, k, s, "nonnegative");
      note(std::max(0.0, w.p_mid - w.p1), n, k, s, "ranked-mid");
      note(std::max(0.0, w.p_r - w.p1), n, k, s, "ranked-remainder");
      note(std::abs(purity(build_sigma(plan, w)) - s), n, k, s, "sigma-purity");
    }
    if (n == 5 && k == 3) {
      // Both p_r branches must agree at the 3/7 junction.
      const double s = 3.0 / 7.0;
      const double upper = (2.0 - std::sqrt(1.0 + 3.0 * s)) / 6.0;
      const double lower = (1.0 - std::sqrt(6.0 * s - 2.0)) / 3.0;
      note(std::abs(upper - lower), n, k, s, "branch-continuity");
    }
  }
  report.passed = report.max_violation <= report.tolerance;
  return report;
}

VerificationReport reference_dominance_check(
    const std::vector<std::pair<int, int>>& plans, int purity_points,
    long budget, std::uint64_t seed, int threads) {
  VerificationReport report;
  report.check_name = "reference-dominance";
  report.tolerance = 1e-6;
  report.max_violation = -1e300;

  for (const auto& [n, k] : plans) {
    const ReferencePlan plan = partition_plan(n, k);
    const double pmin = min_purity(plan);
    for (int i = 1; i <= purity_points; ++i) {
      const double s = pmin + (1.0 - pmin) * i / (purity_points + 1);
      const BorderSearchResult search =
          border_search(n, k, s, budget, mix_seed(seed, i), threads);
      const double violation = search.best_tau - border_tau(n, k, s);
      ++report.instances;
      if (violation > report.max_violation) {
        report.max_violation = violation;
        std::ostringstream os;
        os << "{\"n\":" << n << ",\"k\":" << k << ",\"purity\":" << s
           << ",\"best_tau\":" << search.best_tau
           << ",\"argmax\":" << (search.argmax_description.empty()
                                     ? "null"
                                     : search.argmax_description)
           << "}";
        report.worst_case = os.str();
      }
    }
  }
  report.passed = report.max_violation <= report.tolerance;
  return report;
}

}  // namespace wdeloc
