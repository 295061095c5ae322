#pragma once

#include <span>

namespace qbound {

/// Binary entropy in bits; H2(0) = H2(1) = 0.
double binary_entropy(double p);

/// Entropy in bits of a (not necessarily normalized) mass vector, with 0 log 0 = 0.
/// Entries are used as given; callers normalize when they need a distribution.
double entropy(std::span<const double> masses);

/// -m log2 m with the 0 log 0 = 0 convention.
double plogp(double m);

/// log2 of the golden ratio, the (1,inf)-RLL noiseless capacity.
double golden_rate();

}  // namespace qbound
