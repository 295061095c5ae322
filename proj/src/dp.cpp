#include "qbound/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <random>
#include <tuple>

#include "qbound/entropy.hpp"
#include "qbound/error.hpp"
#include "qbound/search.hpp"

namespace qbound {

double dp_reward(const UnifilarChannel& ch, std::span<const double> z, std::span<const double> action) {
  const std::size_t nx = ch.nx();
  double h_y = 0.0, h_cond = 0.0;
  for (std::size_t s = 0; s < ch.ns(); ++s)
    for (std::size_t x = 0; x < nx; ++x)
      if (action[s * nx + x] > 0.0 && !ch.allowed(x, s))
        throw Error(ErrorCode::invalid_argument, "action puts mass on a masked input");
  for (std::size_t y = 0; y < ch.ny(); ++y) {
    double py = 0.0;
    for (std::size_t s = 0; s < ch.ns(); ++s)
      for (std::size_t x = 0; x < nx; ++x) {
        const double m = z[s] * action[s * nx + x];
        if (m <= 0.0) continue;
        const double w = ch.prob(y, x, s);
        py += m * w;
        h_cond += m * plogp(w);
      }
    h_y += plogp(py);
  }
  return std::max(0.0, h_y - h_cond);
}

BeliefDp::BeliefDp(const UnifilarChannel& ch, std::size_t resolution, Interpolation interp)
    : ch_(ch), grid_(ch.ns(), resolution), interp_(interp) {
  require_valid(ch_);
  permitted_.resize(ch_.ns());
  for (std::size_t s = 0; s < ch_.ns(); ++s) {
    for (std::size_t x = 0; x < ch_.nx(); ++x)
      if (ch_.allowed(x, s)) permitted_[s].push_back(x);
    action_dims_ += permitted_[s].size() - 1;
  }
}

std::vector<double> BeliefDp::decode_action(std::span<const double> theta) const {
  std::vector<double> action(ch_.ns() * ch_.nx(), 0.0);
  std::size_t offset = 0;
  std::vector<double> v;
  for (std::size_t s = 0; s < ch_.ns(); ++s) {
    const auto& xs = permitted_[s];
    v.assign(xs.size(), 0.0);
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) rest -= (v[i] = theta[offset + i]);
    v.back() = rest;
    offset += xs.size() - 1;
    auto w = search::project_to_simplex(v, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) action[s * ch_.nx() + xs[i]] = w[i];
  }
  return action;
}

std::vector<double> BeliefDp::encode_action(std::span<const double> action) const {
  std::vector<double> theta;
  theta.reserve(action_dims_);
  for (std::size_t s = 0; s < ch_.ns(); ++s)
    for (std::size_t i = 0; i + 1 < permitted_[s].size(); ++i) theta.push_back(action[s * ch_.nx() + permitted_[s][i]]);
  return theta;
}

std::vector<double> BeliefDp::uniform_action() const {
  std::vector<double> action(ch_.ns() * ch_.nx(), 0.0);
  for (std::size_t s = 0; s < ch_.ns(); ++s)
    for (std::size_t x : permitted_[s]) action[s * ch_.nx() + x] = 1.0 / static_cast<double>(permitted_[s].size());
  return action;
}

double BeliefDp::value_at(std::span<const double> values, std::span<const double> z) const {
  if (interp_ == Interpolation::nearest) return values[grid_.nearest(z)];
  double v = 0.0;
  for (const auto& [i, w] : grid_.interpolate(z)) v += w * values[i];
  return v;
}

double BeliefDp::q_value(std::span<const double> values, std::span<const double> z,
                         std::span<const double> action) const {
  const std::size_t ns = ch_.ns(), nx = ch_.nx();
  double h_y = 0.0, h_cond = 0.0, future = 0.0;
  std::vector<double> mass(ns);
  for (std::size_t y = 0; y < ch_.ny(); ++y) {
    std::fill(mass.begin(), mass.end(), 0.0);
    double py = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      if (z[s] <= 0.0) continue;
      for (std::size_t x = 0; x < nx; ++x) {
        const double m = z[s] * action[s * nx + x];
        if (m <= 0.0) continue;
        const double w = ch_.prob(y, x, s);
        h_cond += m * plogp(w);
        if (w <= 0.0) continue;
        mass[ch_.next(x, y, s)] += m * w;
        py += m * w;
      }
    }
    if (py <= 0.0) continue;
    h_y += plogp(py);
    for (double& m : mass) m /= py;
    future += py * value_at(values, mass);
  }
  return std::max(0.0, h_y - h_cond) + future;
}

BeliefDp::Greedy BeliefDp::greedy(std::span<const double> values, std::span<const double> z,
                                  const ActionSearchOptions& opts, const std::vector<double>* warm) const {
  if (action_dims_ == 0) {
    auto a = uniform_action();
    return {q_value(values, z, a), a};
  }
  auto f = [&](std::span<const double> theta) {
    auto a = decode_action(theta);
    double off = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) off += std::max(0.0, -theta[i]) + std::max(0.0, theta[i] - 1.0);
    return q_value(values, z, a) - 10.0 * off;
  };

  std::vector<double> best_theta = encode_action(uniform_action());
  double best = f(best_theta);

  // Coarse scan over the product of per-state simplex lattices.
  const auto m = static_cast<std::size_t>(std::llround(1.0 / opts.grid_step));
  std::vector<std::vector<std::vector<double>>> per_state;
  std::size_t total = 1;
  for (std::size_t s = 0; s < ch_.ns(); ++s) {
    const std::size_t k = permitted_[s].size();
    std::vector<std::vector<double>> pts;
    if (k == 1) {
      pts.push_back({});
    } else {
      std::vector<std::size_t> c(k - 1, 0);
      // enumerate lattice points with sum <= m
      std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
        if (i == c.size()) {
          std::vector<double> p(c.size());
          for (std::size_t j = 0; j < c.size(); ++j) p[j] = static_cast<double>(c[j]) / static_cast<double>(m);
          pts.push_back(std::move(p));
          return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
          c[i] = v;
          rec(i + 1, left - v);
        }
      };
      rec(0, m);
    }
    total *= pts.size();
    per_state.push_back(std::move(pts));
  }
  if (total <= 4096) {
    std::vector<std::size_t> idx(ch_.ns(), 0);
    std::vector<double> theta;
    while (true) {
      theta.clear();
      for (std::size_t s = 0; s < ch_.ns(); ++s)
        theta.insert(theta.end(), per_state[s][idx[s]].begin(), per_state[s][idx[s]].end());
      double v = f(theta);
      if (v > best) {
        best = v;
        best_theta = theta;
      }
      std::size_t s = 0;
      while (s < ch_.ns() && ++idx[s] == per_state[s].size()) idx[s++] = 0;
      if (s == ch_.ns()) break;
    }
  }

  search::NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.initial_step = opts.grid_step / 2;
  nm.f_tol = opts.f_tol;
  nm.x_tol = 1e-9;
  nm.restarts_in_place = 1;
  auto polished = search::nelder_mead_max(f, best_theta, nm);
  if (polished.value > best) {
    best = polished.value;
    best_theta = polished.x;
  }
  if (warm && !warm->empty()) {
    auto w = search::nelder_mead_max(f, encode_action(*warm), nm);
    if (w.value > best) {
      best = w.value;
      best_theta = w.x;
    }
  }
  auto action = decode_action(best_theta);
  return {q_value(values, z, action), std::move(action)};
}

void BeliefDp::sweep_serial(std::span<const double> values, std::span<double> next,
                            std::vector<std::vector<double>>& actions, const ActionSearchOptions& opts) const {
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    auto g = greedy(values, grid_.belief(i), opts, &actions[i]);
    next[i] = g.value;
    actions[i] = std::move(g.action);
  }
}

void BeliefDp::sweep_parallel(std::span<const double> values, std::span<double> next,
                              std::vector<std::vector<double>>& actions, const ActionSearchOptions& opts) const {
  const auto n = static_cast<long>(grid_.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    auto g = greedy(values, grid_.belief(k), opts, &actions[k]);
    next[k] = g.value;
    actions[k] = std::move(g.action);
  }
}

ValueIterationResult value_iteration(const UnifilarChannel& ch, const ValueIterationOptions& opts) {
  BeliefDp dp(ch, opts.resolution, opts.interpolation);
  const std::size_t n = dp.grid().size();
  ValueIterationResult out;
  out.resolution = opts.resolution;
  out.values.assign(n, 0.0);
  out.actions.assign(n, {});
  std::vector<double> next(n, 0.0);
  double prev_span = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < opts.max_iters; ++k) {
    if (opts.parallel)
      dp.sweep_parallel(out.values, next, out.actions, opts.action);
    else
      dp.sweep_serial(out.values, next, out.actions, opts.action);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = next[i] - out.values[i];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    const double span = hi - lo;
    out.span_history.push_back(span);
    if (span > prev_span + 1e-9) out.span_monotone = false;
    prev_span = span;
    out.lower = lo;
    out.upper = hi;
    out.iterations = k + 1;
    const double offset = next[0];
    for (std::size_t i = 0; i < n; ++i) out.values[i] = next[i] - offset;
    if (span <= opts.span_tol) {
      out.converged = true;
      break;
    }
  }
  out.rate = 0.5 * (out.lower + out.upper);
  return out;
}

VisitHistogram rollout(const UnifilarChannel& ch, const ValueIterationResult& vi, const RolloutOptions& opts) {
  BeliefDp dp(ch, vi.resolution);
  VisitHistogram hist;
  hist.cluster_tol = opts.cluster_tol;
  hist.channel = ch;
  if (opts.steps == 0) return hist;

  std::vector<double> z = opts.start.value_or(std::vector<double>(ch.ns(), 1.0 / static_cast<double>(ch.ns())));
  if (z.size() != ch.ns()) throw Error(ErrorCode::invalid_argument, "start belief has wrong dimension");

  using Key = std::vector<long long>;
  auto cell_key = [&](const std::vector<double>& b) {
    Key k(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) k[i] = std::llround(b[i] / opts.cluster_tol);
    return k;
  };
  auto exact_key = [](const std::vector<double>& b) {
    Key k(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) k[i] = std::llround(b[i] * 1e12);
    return k;
  };

  std::map<Key, std::vector<double>> action_cache;
  auto act = [&](const std::vector<double>& b) -> const std::vector<double>& {
    auto key = exact_key(b);
    auto it = action_cache.find(key);
    if (it == action_cache.end()) {
      if (action_cache.size() > 100000) action_cache.clear();
      it = action_cache.emplace(key, dp.greedy(vi.values, b, opts.action).action).first;
    }
    return it->second;
  };

  std::map<Key, std::size_t> cell_index;
  std::vector<std::vector<double>> sums;
  auto visit = [&](const std::vector<double>& b, const std::vector<double>& action) {
    auto key = cell_key(b);
    auto [it, inserted] = cell_index.emplace(key, hist.cells.size());
    if (inserted) {
      hist.cells.push_back({std::vector<double>(b.size(), 0.0), 0, action});
      sums.emplace_back(b.size(), 0.0);
    }
    auto& cell = hist.cells[it->second];
    cell.count += 1;
    for (std::size_t i = 0; i < b.size(); ++i) sums[it->second][i] += b[i];
    return it->second;
  };

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> trans;
  std::mt19937_64 rng(opts.seed);
  std::vector<double> py(ch.ny());
  std::optional<std::size_t> pending;  // cell of the current belief, if counted
  for (std::size_t t = 0; t < opts.burn_in + opts.steps; ++t) {
    const std::vector<double> action = act(z);
    for (std::size_t y = 0; y < ch.ny(); ++y) py[y] = output_probability(ch, z, action, y);
    std::discrete_distribution<std::size_t> draw(py.begin(), py.end());
    const std::size_t y = draw(rng);
    auto nz = bcjr_update(ch, z, action, y);
    if (t >= opts.burn_in) {
      const std::size_t from = pending ? *pending : visit(z, action);
      const std::size_t to = visit(nz, act(nz));
      trans[{from, y, to}] += 1;
      pending = to;
    }
    z = std::move(nz);
  }
  for (std::size_t c = 0; c < hist.cells.size(); ++c)
    for (std::size_t i = 0; i < ch.ns(); ++i)
      hist.cells[c].belief[i] = sums[c][i] / static_cast<double>(hist.cells[c].count);
  for (const auto& [k, count] : trans)
    hist.transitions.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), count});
  return hist;
}

}  // namespace qbound
