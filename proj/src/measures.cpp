#include "wdeloc/measures.hpp"

#include <cmath>

namespace wdeloc {

namespace {

// Elementary symmetric polynomial e_k via the characteristic-polynomial
// recurrence e_j += x * e_{j-1}.  All terms are nonnegative for simplex
// inputs, so there is no cancellation.
double elementary_symmetric(const Eigen::VectorXd& x, int k) {
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    const int top = std::min<int>(k, static_cast<int>(i) + 1);
    for (int j = top; j >= 1; --j) e[j] += xi * e[j - 1];
  }
  return e[static_cast<std::size_t>(k)];
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_k_range(int k, Eigen::Index n) {
  if (k < 2 || k > n) {
    throw Error(ErrorKind::KOutOfRange, "need 2 <= k <= n");
  }
}

}  // namespace

double tau(const Eigen::VectorXd& populations, int k) {
  check_k_range(k, populations.size());
  return factorial(k) * elementary_symmetric(populations, k);
}

double tau_of(const DensityMatrix& rho, int k) {
  return tau(rho.populations(), k);
}

double tau_moment_poly(const Eigen::VectorXd& populations, int k) {
  check_k_range(k, populations.size());
  if (k > 5) {
    throw Error(ErrorKind::KOutOfRange, "moment polynomials are given for k <= 5");
  }
  double m[6] = {0, 1, 0, 0, 0, 0};
  for (int order = 2; order <= k; ++order) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < populations.size(); ++j) {
      sum += std::pow(populations(j), order);
    }
    m[order] = sum;
  }
  switch (k) {
    case 2:
      return 1.0 - m[2];
    case 3:
      return 1.0 - 3.0 * m[2] + 2.0 * m[3];
    case 4:
      return 1.0 - 6.0 * m[2] + 8.0 * m[3] + 3.0 * m[2] * m[2] - 6.0 * m[4];
    case 5:
      return 1.0 - 10.0 * m[2] + 20.0 * m[3] + 15.0 * m[2] * m[2] -
             30.0 * m[4] - 20.0 * m[2] * m[3] + 24.0 * m[5];
    default:
      return 0.0;  // unreachable
  }
}

double tangle(const DensityMatrix& rho, int a, int b) {
  const int n = rho.dim();
  if (a < 0 || a >= n || b < 0 || b >= n) {
    throw Error(ErrorKind::IndexOutOfRange, "mode index outside [0, n)");
  }
  if (a == b) {
    throw Error(ErrorKind::EqualIndices, "tangle needs two distinct modes");
  }
  return 4.0 * std::norm(rho(a, b));
}

double total_tangle(const DensityMatrix& rho) {
  const int n = rho.dim();
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) sum += 8.0 * std::norm(rho(a, b));
  }
  return sum;
}

double e2_purity_form(const DensityMatrix& rho) {
  return purity(rho) - moment(rho, 2);
}

double tau_max(int n, int k) {
  check_k_range(k, n);
  // k! C(n,k) / n^k = n! / ((n-k)! n^k)
  double value = 1.0;
  for (int i = 0; i < k; ++i) value *= double(n - i) / double(n);
  return value;
}

const char* to_string(EkMethod method) {
  switch (method) {
    case EkMethod::ClosedForm: return "closed-form";
    case EkMethod::Numeric: return "numeric";
    case EkMethod::BelowThreshold: return "below-threshold";
  }
  return "unknown";
}

}  // namespace wdeloc
