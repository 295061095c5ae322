#include "qbound/belief_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qbound/error.hpp"

namespace qbound {

namespace {

void enumerate(std::vector<int>& c, std::size_t i, int left, std::vector<std::vector<int>>& out) {
  if (i + 1 == c.size()) {
    c[i] = left;
    out.push_back(c);
    return;
  }
  for (int v = 0; v <= left; ++v) {
    c[i] = v;
    enumerate(c, i + 1, left - v, out);
  }
}

}  // namespace

BeliefGrid::BeliefGrid(std::size_t dim, std::size_t resolution) : dim_(dim), resolution_(resolution) {
  if (dim_ == 0 || resolution_ == 0) throw Error(ErrorCode::invalid_argument, "belief grid needs positive sizes");
  const std::size_t n = resolution_ + dim_;
  binom_.assign(n + 1, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    binom_[i][0] = 1;
    for (std::size_t j = 1; j <= i; ++j) binom_[i][j] = binom_[i - 1][j - 1] + binom_[i - 1][j];
  }
  std::vector<int> c(dim_);
  enumerate(c, 0, static_cast<int>(resolution_), nodes_);
}

std::size_t BeliefGrid::count(std::size_t total, std::size_t parts) const {
  // Compositions of `total` into `parts` nonnegative parts.
  if (parts == 0) return total == 0 ? 1 : 0;
  return binom_[total + parts - 1][parts - 1];
}

std::vector<double> BeliefGrid::belief(std::size_t i) const {
  std::vector<double> b(dim_);
  for (std::size_t k = 0; k < dim_; ++k) b[k] = static_cast<double>(nodes_[i][k]) / static_cast<double>(resolution_);
  return b;
}

std::size_t BeliefGrid::rank(std::span<const int> c) const {
  if (c.size() != dim_) throw Error(ErrorCode::invalid_argument, "composition has wrong dimension");
  std::size_t r = 0;
  std::size_t left = resolution_;
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    if (c[i] < 0 || static_cast<std::size_t>(c[i]) > left)
      throw Error(ErrorCode::invalid_argument, "not a composition of the grid resolution");
    for (int v = 0; v < c[i]; ++v) r += count(left - static_cast<std::size_t>(v), dim_ - i - 1);
    left -= static_cast<std::size_t>(c[i]);
  }
  if (static_cast<std::size_t>(c[dim_ - 1]) != left)
    throw Error(ErrorCode::invalid_argument, "not a composition of the grid resolution");
  return r;
}

namespace {
// Fractions within this of zero come from rounding, not from the belief.
constexpr double kWeightFloor = 1e-13;
}  // namespace

std::vector<std::pair<std::size_t, double>> BeliefGrid::interpolate(std::span<const double> b) const {
  const std::size_t n = dim_;
  const double res = static_cast<double>(resolution_);
  if (n == 1) return {{0, 1.0}};
  // Tail sums x_i = N * sum_{k >= i} b_k (x_0 = N), split into floor and fraction.
  std::vector<double> x(n);
  double tail = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    tail += b[i];
    x[i] = res * tail;
  }
  x[0] = res;
  // Tail sums must be non-increasing for every Kuhn vertex to be a composition.
  for (std::size_t i = 1; i < n; ++i) x[i] = std::clamp(x[i], 0.0, x[i - 1]);
  std::vector<int> base(n);
  std::vector<double> frac(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double fl = std::floor(x[i]);
    base[i] = static_cast<int>(fl);
    frac[i] = x[i] - fl;
  }
  base[0] = static_cast<int>(resolution_);
  std::vector<std::size_t> order(n - 1);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return frac[a] > frac[c]; });

  auto to_index = [&](const std::vector<int>& tails) {
    std::vector<int> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = tails[i] - (i + 1 < n ? tails[i + 1] : 0);
    return rank(comp);
  };

  std::vector<std::pair<std::size_t, double>> out;
  std::vector<int> vertex = base;
  double prev = 1.0;
  for (std::size_t j = 0; j <= n - 1; ++j) {
    double next = j < n - 1 ? frac[order[j]] : 0.0;
    double w = prev - next;
    if (w > kWeightFloor) out.emplace_back(to_index(vertex), w);
    if (j < n - 1) {
      vertex[order[j]] += 1;
      prev = next;
    }
  }
  double total = 0.0;
  for (const auto& [idx, w] : out) total += w;
  for (auto& [idx, w] : out) w /= total;
  return out;
}

std::size_t BeliefGrid::nearest(std::span<const double> b) const {
  const double res = static_cast<double>(resolution_);
  std::vector<int> comp(dim_);
  std::vector<std::pair<double, std::size_t>> rem(dim_);
  int total = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double v = b[i] * res;
    comp[i] = static_cast<int>(std::floor(v));
    rem[i] = {v - comp[i], i};
    total += comp[i];
  }
  std::sort(rem.begin(), rem.end(), std::greater<>());
  for (std::size_t k = 0; total < static_cast<int>(resolution_); ++k, ++total) comp[rem[k % dim_].second] += 1;
  return rank(comp);
}

}  // namespace qbound
