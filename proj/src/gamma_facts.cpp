#include <cmath>
#include <stdexcept>
#include <vector>

#include "lrucluster/analytics.hpp"

namespace lrucluster {

double gamma_tail_bound(double capacity, double eta) {
  if (!(capacity > 1.0)) throw std::invalid_argument("gamma_tail_bound needs C > 1");
  if (!(eta > 0.0)) throw std::invalid_argument("gamma_tail_bound needs eta > 0");
  // phi(1 + eta) = eta - log(1 + eta)
  const double rate = eta - std::log1p(eta);
  return 2.0 * std::exp(-capacity * rate);
}

double gamma_central_moment(double capacity, int k) {
  if (!(capacity > 1.0)) throw std::invalid_argument("gamma_central_moment needs C > 1");
  if (k < 0) throw std::invalid_argument("gamma_central_moment needs k >= 0");
  // Gamma(C, 1) has cumulants kappa_n = C (n - 1)!. For X = G / C the
  // cumulants are kappa_n / C^n = (n - 1)! / C^(n - 1), evaluated in log
  // space, and central moments follow from
  //   mu_n = sum_{j=0}^{n-2} binom(n-1, j) kappa_{n-j} mu_j.
  std::vector<double> mu(static_cast<std::size_t>(k) + 1, 0.0);
  mu[0] = 1.0;
  const double log_c = std::log(capacity);
  auto scaled_cumulant = [&](int n) {
    return std::exp(std::lgamma(static_cast<double>(n)) - (n - 1) * log_c);
  };
  for (int n = 2; n <= k; ++n) {
    double acc = 0.0;
    double binom = 1.0;  // binom(n - 1, j)
    for (int j = 0; j <= n - 2; ++j) {
      if (j != 1) acc += binom * scaled_cumulant(n - j) * mu[static_cast<std::size_t>(j)];
      binom = binom * (n - 1 - j) / (j + 1);
    }
    mu[static_cast<std::size_t>(n)] = acc;
  }
  return mu[static_cast<std::size_t>(k)];
}

}  // namespace lrucluster
