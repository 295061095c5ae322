#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qbound {

/// Regular lattice on the probability simplex: all integer compositions of
/// `resolution` into `dim` parts, each read as a belief k / resolution.
class BeliefGrid {
 public:
  BeliefGrid(std::size_t dim, std::size_t resolution);

  std::size_t dim() const { return dim_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t size() const { return nodes_.size(); }

  const std::vector<int>& composition(std::size_t i) const { return nodes_[i]; }
  std::vector<double> belief(std::size_t i) const;

  /// Index of a composition (lexicographic rank). Throws on invalid input.
  std::size_t rank(std::span<const int> composition) const;

  /// Freudenthal (Kuhn) simplex containing b: up to dim vertices with convex weights
  /// reproducing b exactly. Zero-weight vertices are dropped.
  std::vector<std::pair<std::size_t, double>> interpolate(std::span<const double> b) const;

  /// Closest lattice point by largest-remainder rounding.
  std::size_t nearest(std::span<const double> b) const;

 private:
  std::size_t count(std::size_t total, std::size_t parts) const;

  std::size_t dim_, resolution_;
  std::vector<std::vector<int>> nodes_;
  std::vector<std::vector<std::size_t>> binom_;
};

}  // namespace qbound
