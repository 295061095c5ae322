#pragma once

#include <array>
#include <cstddef>

namespace qbound {

/// Feedback capacity of the (1,inf)-RLL constrained BEC:
/// max over p in [0, 1/2] of H2(p) / (1/(1-eps) + p).
double oracle_bec(double eps);

/// Feedback capacity of the dicode erasure channel:
/// max over p in [0,1] of (1-eps)(p + eps H2(p)) / (eps + (1-eps) p).
double oracle_dec(double eps);

/// Closed-form pieces of the three-parameter trapdoor upper bound.
struct TrapdoorTerms {
  double delta, kappa1, kappa2, kappa3;
};
TrapdoorTerms trapdoor_terms(const std::array<double, 3>& a, double p);

/// Upper-bound expression at one (a1, a2, a3); NaN when delta <= 0.
double trapdoor_upper_expr(const std::array<double, 3>& a, double p);

/// The part of the trapdoor expression outside the entropy term,
/// 2(k3 - k1 a1 - k2 a2 - a3/2). Never positive.
double trapdoor_lambda2(const std::array<double, 3>& a, double p);

/// Same quantity at p = 1/2 via its expanded numerator over delta.
double trapdoor_lambda2_half_explicit(const std::array<double, 3>& a);

struct TrapdoorUpper {
  double value = 0.0;
  std::array<double, 3> argmax{};
  std::size_t skipped = 0;  // probe points with delta <= 0
};

/// Maximizes the trapdoor expression over [0,1]^3: grid of step `grid_step`,
/// then local refinement of the best grid points.
TrapdoorUpper oracle_trapdoor_upper(double p, double grid_step = 1e-2);

/// H2(alpha) / (2 - alpha) at one alpha.
double trapdoor_lower_expr(double alpha);

/// max over alpha of H2(alpha)/(2 - alpha); equals log2 of the golden ratio.
double oracle_trapdoor_lower();

}  // namespace qbound
