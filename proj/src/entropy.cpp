#include "qbound/entropy.hpp"

#include <cmath>

namespace qbound {

double plogp(double m) {
  if (m <= 0.0) return 0.0;
  return -m * std::log2(m);
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return plogp(p) + plogp(1.0 - p);
}

double entropy(std::span<const double> masses) {
  double h = 0.0;
  for (double m : masses) h += plogp(m);
  return h;
}

double golden_rate() { return std::log2((1.0 + std::sqrt(5.0)) / 2.0); }

}  // namespace qbound
