#include "qbound/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbound::search {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

Result run_once(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts,
                std::size_t budget) {
  const std::size_t n = x0.size();
  Result out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evals;
    return f(x);
  };
  if (n == 0) {
    out.value = eval(x0);
    out.x = std::move(x0);
    return out;
  }

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({x0, eval(x0)});
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x0;
    xi[i] += opts.initial_step;
    simplex.push_back({xi, eval(xi)});
  }

  constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  std::vector<double> centroid(n), trial(n);
  auto along = [&](double t) {
    // centroid + t * (centroid - worst)
    for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + t * (centroid[i] - simplex.back().x[i]);
    return trial;
  };

  while (out.evals < budget) {
    std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    double spread = simplex.front().f - simplex.back().f;
    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        diameter = std::max(diameter, std::abs(simplex[k].x[i] - simplex[0].x[i]));
    if (spread <= opts.f_tol && diameter <= opts.x_tol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i] / static_cast<double>(n);

    auto xr = along(alpha);
    double fr = eval(xr);
    if (fr > simplex.front().f) {
      auto xe = along(gamma);
      double fe = eval(xe);
      simplex.back() = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr > simplex[n - 1].f) {
      simplex.back() = {xr, fr};
    } else {
      bool outside = fr > simplex.back().f;
      auto xc = along(outside ? rho : -rho);
      double fc = eval(xc);
      if (fc > std::max(outside ? fr : simplex.back().f, simplex.back().f)) {
        simplex.back() = {xc, fc};
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          for (std::size_t i = 0; i < n; ++i)
            simplex[k].x[i] = simplex[0].x[i] + sigma * (simplex[k].x[i] - simplex[0].x[i]);
          simplex[k].f = eval(simplex[k].x);
        }
      }
    }
  }
  auto best = std::max_element(simplex.begin(), simplex.end(),
                               [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  out.x = best->x;
  out.value = best->f;
  return out;
}

}  // namespace

Result nelder_mead_max(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts) {
  Result best = run_once(f, std::move(x0), opts, opts.max_evals);
  std::size_t used = best.evals;
  NelderMeadOptions inner = opts;
  for (std::size_t r = 0; r < opts.restarts_in_place && used < opts.max_evals; ++r) {
    inner.initial_step = opts.initial_step * std::pow(0.1, static_cast<double>(r + 1));
    Result again = run_once(f, best.x, inner, opts.max_evals - used);
    used += again.evals;
    if (again.value > best.value) best = std::move(again);
  }
  best.evals = used;
  return best;
}

Result golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  std::size_t evals = 2;
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  Result r;
  double x = 0.5 * (a + b);
  double fx = f(x);
  r.x = {x};
  r.value = fx;
  // Endpoint maxima are common (e.g. rates vanishing at a boundary).
  for (double e : {lo, hi}) {
    double fe = f(e);
    if (fe > r.value) {
      r.value = fe;
      r.x = {e};
    }
  }
  r.evals = evals + 3;
  return r;
}

Result scan_then_golden_max(const std::function<double(double)>& f, double lo, double hi,
                            std::size_t scan_points, double tol) {
  scan_points = std::max<std::size_t>(scan_points, 3);
  const double h = (hi - lo) / static_cast<double>(scan_points - 1);
  std::size_t best_i = 0;
  double best_f = -INFINITY;
  for (std::size_t i = 0; i < scan_points; ++i) {
    double v = f(lo + h * static_cast<double>(i));
    if (v > best_f) {
      best_f = v;
      best_i = i;
    }
  }
  double a = std::max(lo, lo + h * (static_cast<double>(best_i) - 1.0));
  double b = std::min(hi, lo + h * (static_cast<double>(best_i) + 1.0));
  Result r = golden_max(f, a, b, tol);
  r.evals += scan_points;
  if (best_f > r.value) {
    r.value = best_f;
    r.x = {lo + h * static_cast<double>(best_i)};
  }
  return r;
}

std::vector<double> project_to_simplex(std::span<const double> v, double floor) {
  const std::size_t n = v.size();
  // Shift so the floor becomes zero, project onto the scaled simplex, shift back.
  const double mass = 1.0 - floor * static_cast<double>(n);
  std::vector<double> w(v.begin(), v.end());
  for (double& x : w) x -= floor;
  std::vector<double> sorted = w;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cumulative += sorted[i];
    double t = (cumulative - mass) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  for (double& x : w) x = std::max(x - theta, 0.0) + floor;
  return w;
}

}  // namespace qbound::search
