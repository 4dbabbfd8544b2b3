#pragma once

#include <string>
#include <vector>

#include "wdeloc/density_matrix.hpp"

namespace wdeloc {

/// k-partite delocalization of a population vector: tau_k = k! * e_k(p)
/// where e_k is the k-th elementary symmetric polynomial.  For k <= 5 this
/// reproduces the explicit moment polynomials (see tau_moment_poly).
/// Computed with the all-positive product recurrence, O(n k), which is exact
/// for vectors with fewer than k nonzero entries: tau_k is then exactly 0.
double tau(const Eigen::VectorXd& populations, int k);

/// tau_k evaluated on the site populations of rho (the measures are basis
/// dependent and always act on the stored site basis).
double tau_of(const DensityMatrix& rho, int k);

/// Explicit polynomials in the moments M_2..M_5 for k = 2..5, e.g.
/// tau_3 = 1 - 3 M_2 + 2 M_3.  Kept as an independent algebraic route; the
/// test suite checks it against tau() on random inputs.
double tau_moment_poly(const Eigen::VectorXd& populations, int k);

/// Pairwise tangle between modes a and b: 4 |rho_ab|^2.
double tangle(const DensityMatrix& rho, int a, int b);

/// Sum of tangles over all ordered pairs a != b.
double total_tangle(const DensityMatrix& rho);

/// Bipartite delocalization as purity minus the second moment.  Always
/// equals total_tangle / 4 on the single-excitation subspace.
double e2_purity_form(const DensityMatrix& rho);

/// Largest possible tau_k on an n-site simplex: k! C(n,k) / n^k, reached by
/// uniform populations (the pure W_n value).
double tau_max(int n, int k);

/// How E_k was obtained for one k.
enum class EkMethod { ClosedForm, Numeric, BelowThreshold };

const char* to_string(EkMethod method);

/// Purity, moments, tau and E values for k = 2..n for one state.  Filled by
/// refstate::profile(); measures alone populate everything except e/method.
struct DelocalizationProfile {
  int dim = 0;
  double purity = 0.0;
  std::vector<double> moments;  // M_2 .. M_n
  std::vector<double> tau;      // tau_2 .. tau_n
  std::vector<double> e;        // E_2 .. E_n
  std::vector<EkMethod> method; // per-k provenance

  double moment_k(int k) const { return moments.at(k - 2); }
  double tau_k(int k) const { return tau.at(k - 2); }
  double e_k(int k) const { return e.at(k - 2); }
};

}  // namespace wdeloc
