#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qbound::search {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  std::size_t max_evals = 4000;
  double initial_step = 0.1;
  double f_tol = 1e-12;   // stop when the simplex value spread drops below this
  double x_tol = 1e-10;   // ... and its diameter drops below this
  std::size_t restarts_in_place = 2;  // rebuild the simplex at the optimum to escape collapse
};

struct Result {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evals = 0;
};

/// Maximizes f from x0. Coordinates are left unconstrained; callers fold
/// feasibility into f (e.g. by projecting inside the objective).
Result nelder_mead_max(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts = {});

/// Maximizes a unimodal scalar function on [lo, hi] by golden-section search.
Result golden_max(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

/// Scalar maximization robust to mild multimodality: dense scan, then golden
/// section around the best scan point.
Result scan_then_golden_max(const std::function<double(double)>& f, double lo, double hi,
                            std::size_t scan_points = 2001, double tol = 1e-12);

/// Euclidean projection of v onto {w : w_i >= floor, sum w = 1}.
std::vector<double> project_to_simplex(std::span<const double> v, double floor = 0.0);

}  // namespace qbound::search
