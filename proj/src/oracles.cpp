#include "qbound/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qbound/entropy.hpp"
#include "qbound/error.hpp"
#include "qbound/search.hpp"

namespace qbound {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::invalid_argument, std::string(what) + " must lie in [0,1]");
}

}  // namespace

double oracle_bec(double eps) {
  require_unit(eps, "erasure probability");
  if (eps >= 1.0) return 0.0;
  auto f = [eps](double p) { return binary_entropy(p) / (1.0 / (1.0 - eps) + p); };
  return search::scan_then_golden_max(f, 0.0, 0.5, 1001, 1e-12).value;
}

double oracle_dec(double eps) {
  require_unit(eps, "erasure probability");
  if (eps >= 1.0) return 0.0;
  if (eps <= 0.0) return 1.0;
  auto f = [eps](double p) {
    return (1.0 - eps) * (p + eps * binary_entropy(p)) / (eps + (1.0 - eps) * p);
  };
  return search::scan_then_golden_max(f, 0.0, 1.0, 2001, 1e-12).value;
}

TrapdoorTerms trapdoor_terms(const std::array<double, 3>& a, double p) {
  const auto [a1, a2, a3] = a;
  const double q = 1.0 - p;
  TrapdoorTerms t{};
  t.delta = 2.0 * q * (a1 - a2 + a1 * a3 - a1 * a2 + a2 * a3) + 4.0 * a1 * p - 2.0 * a3 + 2.0;
  t.kappa1 = (1.0 - a3) * (1.0 - a2 * q) / t.delta;
  t.kappa2 = a1 * (p + a3 * q) / t.delta;
  t.kappa3 = a1 * (1.0 - a2 * q) / t.delta;
  return t;
}

double trapdoor_upper_expr(const std::array<double, 3>& a, double p) {
  const auto [a1, a2, a3] = a;
  const double q = 1.0 - p;
  const auto t = trapdoor_terms(a, p);
  if (!(t.delta > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double k12 = t.kappa1 + t.kappa2;
  double entropy_term = 0.0;
  if (k12 > 0.0) entropy_term = 2.0 * k12 * binary_entropy((t.kappa1 * (1.0 - a1 * q) + t.kappa2 * q * a2) / k12);
  // a3/2 is weighted by H2(p) and subtracted like the other two terms; this keeps
  // the value within [0, 1] bit and matches trapdoor_lambda2 at p = 1/2.
  return entropy_term - 2.0 * binary_entropy(p) * (t.kappa1 * a1 + t.kappa2 * a2 + 0.5 * a3) + 2.0 * t.kappa3;
}

double trapdoor_lambda2(const std::array<double, 3>& a, double p) {
  const auto t = trapdoor_terms(a, p);
  return 2.0 * (t.kappa3 - t.kappa1 * a[0] - t.kappa2 * a[1] - 0.5 * a[2]);
}

double trapdoor_lambda2_half_explicit(const std::array<double, 3>& a) {
  const auto [a1, a2, a3] = a;
  const double delta = 3 * a1 - a2 + a1 * a3 - a1 * a2 + a2 * a3 - 2 * a3 + 2;
  const double num = a2 * a3 - a1 * a2 - a1 * a3 - 2 * a3 - a1 * a3 * a3 - a2 * a3 * a3 + 2 * a3 * a3 -
                     a1 * a2 * a3;
  return num / delta;
}

TrapdoorUpper oracle_trapdoor_upper(double p, double grid_step) {
  require_unit(p, "trapdoor parameter p");
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  TrapdoorUpper out;
  out.value = -std::numeric_limits<double>::infinity();

  struct Probe {
    double v;
    std::array<double, 3> a;
  };
  constexpr std::size_t kKeep = 8;
  std::vector<Probe> top;
  for (std::size_t i = 0; i <= steps; ++i)
    for (std::size_t j = 0; j <= steps; ++j)
      for (std::size_t k = 0; k <= steps; ++k) {
        std::array<double, 3> a{i * grid_step, j * grid_step, k * grid_step};
        for (double& c : a) c = std::min(c, 1.0);
        double v = trapdoor_upper_expr(a, p);
        if (std::isnan(v)) {
          ++out.skipped;
          continue;
        }
        if (top.size() < kKeep || v > top.back().v) {
          top.push_back({v, a});
          std::sort(top.begin(), top.end(), [](const Probe& x, const Probe& y) { return x.v > y.v; });
          if (top.size() > kKeep) top.pop_back();
        }
      }

  auto clamp_box = [](std::span<const double> x) {
    std::array<double, 3> a{};
    for (std::size_t i = 0; i < 3; ++i) a[i] = std::clamp(x[i], 0.0, 1.0);
    return a;
  };
  search::NelderMeadOptions nm;
  nm.initial_step = grid_step;
  nm.f_tol = 1e-13;
  nm.x_tol = 1e-11;
  nm.max_evals = 6000;
  for (const auto& probe : top) {
    if (probe.v > out.value) {
      out.value = probe.v;
      out.argmax = probe.a;
    }
    auto f = [&](std::span<const double> x) {
      auto a = clamp_box(x);
      double v = trapdoor_upper_expr(a, p);
      double excess = 0.0;
      for (std::size_t i = 0; i < 3; ++i) excess += std::abs(x[i] - a[i]);
      return std::isnan(v) ? -1e9 : v - excess;
    };
    auto r = search::nelder_mead_max(f, {probe.a[0], probe.a[1], probe.a[2]}, nm);
    auto a = clamp_box(r.x);
    double v = trapdoor_upper_expr(a, p);
    if (!std::isnan(v) && v > out.value) {
      out.value = v;
      out.argmax = a;
    }
  }
  return out;
}

double trapdoor_lower_expr(double alpha) { return binary_entropy(alpha) / (2.0 - alpha); }

double oracle_trapdoor_lower() {
  return search::scan_then_golden_max(trapdoor_lower_expr, 0.0, 1.0, 2001, 1e-13).value;
}

}  // namespace qbound
