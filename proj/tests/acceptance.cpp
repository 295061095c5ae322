// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qbound/bcjr.hpp"
#include "qbound/bound.hpp"
#include "qbound/channel.hpp"
#include "qbound/coupled.hpp"
#include "qbound/dp.hpp"
#include "qbound/error.hpp"
#include "qbound/oracles.hpp"
#include "qbound/qgraph.hpp"
#include "support.hpp"

using namespace qbound;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double h2(double p) { return -testsupport::log2_safe(p) * p - testsupport::log2_safe(1 - p) * (1 - p); }

// Dense scan followed by ternary refinement around the best scan point.
double scalar_max(const std::function<double(double)>& f, double lo, double hi) {
  const int n = 20000;
  int best = 0;
  double best_v = -1e300;
  for (int i = 0; i <= n; ++i) {
    const double v = f(lo + (hi - lo) * i / n);
    if (v > best_v) best_v = v, best = i;
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / n, b = lo + (hi - lo) * std::min(best + 1, n) / n;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(m1) < f(m2)) a = m1; else b = m2;
  }
  return std::max(best_v, f(0.5 * (a + b)));
}

double ref_bec(double eps) {
  if (eps >= 1.0) return 0.0;
  return scalar_max([eps](double p) { return h2(p) / (1.0 / (1.0 - eps) + p); }, 0.0, 0.5);
}

double ref_dec(double eps) {
  if (eps >= 1.0) return 0.0;
  if (eps <= 0.0) return 1.0;
  return scalar_max([eps](double p) { return (1 - eps) * (p + eps * h2(p)) / (eps + (1 - eps) * p); }, 0.0, 1.0);
}

const double kGolden = std::log2((1.0 + std::sqrt(5.0)) / 2.0);

struct Report {
  int failed = 0;
  void line(int id, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

void criterion1(Report& r) {
  const auto t0 = Clock::now();
  double worst = 0.0, at_zero = 0.0;
  for (int k = 0; k <= 9; ++k) {
    const double eps = 0.1 * k;
    const double v = optimize_upper(builtin_bec_no11(eps), builtin_bec2()).value;
    worst = std::max({worst, std::abs(v - oracle_bec(eps)), std::abs(v - ref_bec(eps))});
    if (k == 0) at_zero = v;
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-4 && secs < 10.0 && std::abs(at_zero - kGolden) <= 1e-4 &&
                  std::abs(oracle_bec(0.0) - kGolden) <= 1e-4;
  r.line(1, ok, fmt("BEC upper vs closed form, max gap %.2e, value at eps=0 %.6f, %.2f s", worst, at_zero, secs));
}

void criterion2(Report& r) {
  double worst = 0.0;
  for (int k = 0; k <= 9; ++k) {
    const double eps = 0.1 * k;
    const auto ch = builtin_bec_no11(eps);
    double best = -1.0;
    for (int i = 0; i <= 500; ++i) {
      try {
        best = std::max(best, lower_bound(ch, builtin_bec3(), bec3_lower_policy(ch, i * 1e-3)).rate);
      } catch (const Error&) {
      }
    }
    worst = std::max({worst, std::abs(best - oracle_bec(eps)), std::abs(best - ref_bec(eps))});
  }
  r.line(2, worst <= 1e-4, fmt("BEC certified lower bound vs closed form, max gap %.2e", worst));
}

void criterion3(Report& r) {
  UpperOptions o;
  o.ties = dec3_symmetry_ties();
  double worst = 0.0, cond_gap = 0.0;
  bool invariant = true;
  const std::vector<double> want{1.0, 0.0, 0.5};
  for (int k = 0; k <= 10; ++k) {
    const double eps = 0.1 * k;
    const auto ch = builtin_dec(eps);
    const auto res = optimize_upper(ch, builtin_dec3(), o);
    worst = std::max({worst, std::abs(res.value - oracle_dec(eps)), std::abs(res.value - ref_dec(eps))});
    if (k == 0 || k == 10) continue;  // no erasures, or nothing but erasures
    const auto rep = is_bcjr_invariant(ch, builtin_dec3(), res.policy);
    invariant = invariant && rep.invariant;
    for (std::size_t q = 0; q < 3; ++q) {
      if (rep.conditionals[q].empty()) {
        invariant = false;
        continue;
      }
      cond_gap = std::max(cond_gap, std::abs(rep.conditionals[q][0] - want[q]));
    }
  }
  const bool ok = worst <= 1e-4 && invariant && cond_gap <= 1e-8;
  r.line(3, ok, fmt("DEC upper vs closed form, max gap %.2e; maximizer invariant %.0f, conditional gap %.2e",
                    worst, invariant ? 1.0 : 0.0, cond_gap));
}

// Three-parameter trapdoor pieces, written out again from the definitions.
struct Kappa {
  double delta, k1, k2, k3;
};

Kappa kappa(double a1, double a2, double a3, double p) {
  const double q = 1 - p;
  Kappa k{};
  k.delta = 2 * q * (a1 - a2 + a1 * a3 - a1 * a2 + a2 * a3) + 4 * a1 * p - 2 * a3 + 2;
  k.k1 = (1 - a3) * (1 - a2 * q) / k.delta;
  k.k2 = a1 * (p + a3 * q) / k.delta;
  k.k3 = a1 * (1 - a2 * q) / k.delta;
  return k;
}

void criterion4(Report& r) {
  const double at_half = oracle_trapdoor_upper(0.5).value;
  double min_margin = 1e300;
  for (int k = 1; k <= 19; ++k) min_margin = std::min(min_margin, oracle_trapdoor_upper(0.05 * k).value - kGolden);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t positive = 0, mismatched = 0, probes = 0;
  while (probes < 10000) {
    const double a1 = unit(rng), a2 = unit(rng), a3 = unit(rng), p = unit(rng);
    const auto k = kappa(a1, a2, a3, p);
    if (!(k.delta > 0.0)) continue;
    ++probes;
    const double lam = 2 * (k.k3 - k.k1 * a1 - k.k2 * a2 - 0.5 * a3);
    if (lam > 1e-12) ++positive;
    if (std::abs(lam - trapdoor_lambda2({a1, a2, a3}, p)) > 1e-12) ++mismatched;
    if (std::abs(trapdoor_lambda2({a1, a2, a3}, 0.5) - trapdoor_lambda2_half_explicit({a1, a2, a3})) > 1e-12)
      ++mismatched;
  }

  const double lower = oracle_trapdoor_lower();
  const double lower_ref = scalar_max([](double a) { return h2(a) / (2 - a); }, 0.0, 1.0);
  const bool ok = std::abs(at_half - 0.694242) <= 1e-3 && min_margin >= -1e-6 && positive == 0 &&
                  mismatched == 0 && std::abs(lower - 0.694242) <= 1e-6 && std::abs(lower - lower_ref) <= 1e-9 &&
                  std::abs(lower - kGolden) <= 1e-9;
  r.line(4, ok,
         fmt("trapdoor upper at 1/2 %.6f, min margin over golden rate %.2e, lower %.7f", at_half, min_margin, lower) +
             ", " + std::to_string(positive) + " positive of " + std::to_string(probes) + " probes");
}

void criterion5(Report& r) {
  double worst = 0.0;
  const std::vector<double> grid{0.25, 0.5, 0.75};
  for (double eps : grid)
    for (double p : grid) {
      {
        const auto st = stationary(builtin_bec_no11(eps), builtin_bec2(), bec2_policy(p));
        worst = std::max(worst, max_gap(st.pi, {1 / (1 + p), eps * p / (1 + p), 0.0, (1 - eps) * p / (1 + p)}));
      }
      if (p <= 0.5) {
        const auto ch = builtin_bec_no11(eps);
        const auto st = stationary(ch, builtin_bec3(), bec3_lower_policy(ch, p));
        const double eb = 1 - eps, d = 1 + eb * p;
        worst = std::max(worst, max_gap(st.pi, {0.0, eb * p / d, eb / d, 0.0, eps * (1 - p) / d, eps * p / d}));
      }
      for (double a : grid) {
        const auto st = stationary(builtin_dec(eps), builtin_dec3(), dec3_policy(a, p));
        const double d = 2 * eps + 2 * (1 - eps) * p;
        worst = std::max(worst, max_gap(st.pi, {(1 - eps) * p / d, 0.0, 0.0, (1 - eps) * p / d, eps / d, eps / d}));
      }
    }
  r.line(5, worst <= 1e-10, fmt("stationary vectors vs closed forms, max gap %.2e", worst));
}

struct LoopResult {
  double rate = 0.0, secs = 0.0;
  std::size_t cells = 0;
  bool isomorphic = false;
  std::string error;
};

LoopResult close_loop(const UnifilarChannel& ch, const QGraph& expect) {
  LoopResult out;
  try {
    const auto t0 = Clock::now();
    ValueIterationOptions o;
    o.resolution = 100;
    const auto vi = value_iteration(ch, o);
    out.secs = seconds_since(t0);
    out.rate = vi.rate;
    RolloutOptions ro;
    ro.steps = 200000;
    const auto hist = rollout(ch, vi, ro);
    out.cells = hist.cells.size();
    const auto ex = extract_qgraph(hist, ro.cluster_tol);
    out.isomorphic = find_isomorphism(ex.graph, expect).has_value();
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

void criterion6(Report& r) {
  const auto dec = close_loop(builtin_dec(0.5), builtin_dec3());
  const auto bec = close_loop(builtin_bec_no11(0.5), builtin_bec3());
  const double gap = std::abs(dec.rate - ref_dec(0.5));
  const bool ok = dec.error.empty() && bec.error.empty() && gap <= 1e-2 && dec.secs < 60.0 && dec.cells == 3 &&
                  dec.isomorphic && bec.isomorphic;
  std::string what = fmt("DEC value iteration gap %.2e in %.1f s, ", gap, dec.secs) + std::to_string(dec.cells) +
                     " cells, dec3 " + (dec.isomorphic ? "recovered" : "missed") + ", bec3 " +
                     (bec.isomorphic ? "recovered" : "missed");
  if (!dec.error.empty()) what += "; dec error: " + dec.error;
  if (!bec.error.empty()) what += "; bec error: " + bec.error;
  r.line(6, ok, what);
}

void criterion7(Report& r) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Class coverage on random strongly connected channels with every output possible
  // from every state, and irreducible Q-graphs.
  int lemma_pairs = 0, lemma_fail = 0;
  while (lemma_pairs < 200) {
    auto ch = testsupport::random_channel(rng, 2, 2 + lemma_pairs % 2, 2 + lemma_pairs % 3, 0.4);
    auto qg = testsupport::random_qgraph(rng, 1 + lemma_pairs % 5, ch.ny());
    if (!is_strongly_connected(ch) || !is_irreducible(qg) || !testsupport::full_output_support(ch)) continue;
    ++lemma_pairs;
    if (!lemma1_check(build_coupled(ch, qg))) ++lemma_fail;
  }

  // Belief update: simplex and Bayes mixing against the predictive law.
  int fuzz_fail = 0;
  auto simplex = [&](std::size_t n) {
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v) s += (x = unit(rng) < 0.2 ? 0.0 : unit(rng));
    if (s == 0.0) v[0] = s = 1.0;
    for (auto& x : v) x /= s;
    return v;
  };
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t nx = 2 + trial % 2, ny = 2 + trial % 3, ns = 1 + trial % 4;
    auto ch = testsupport::random_channel(rng, nx, ny, ns, 0.3);
    const auto z = simplex(ns);
    std::vector<double> action;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto row = simplex(nx);
      action.insert(action.end(), row.begin(), row.end());
    }
    std::vector<double> predicted(ns, 0.0), mixed(ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
          predicted[ch.next(x, y, s)] += z[s] * action[s * nx + x] * ch.prob(y, x, s);
    bool bad = false;
    for (std::size_t y = 0; y < ny; ++y) {
      const double py = output_probability(ch, z, action, y);
      if (py <= 0.0) continue;
      const auto b = bcjr_update(ch, z, action, y);
      double sum = 0.0;
      for (double v : b) {
        bad = bad || v < 0.0;
        sum += v;
      }
      bad = bad || std::abs(sum - 1.0) > 1e-12;
      for (std::size_t s = 0; s < ns; ++s) mixed[s] += py * b[s];
    }
    if (bad || max_gap(mixed, predicted) > 1e-12) ++fuzz_fail;
  }

  // Residual of every accepted stationary solve, measured on the dense chain.
  int solves = 0;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    auto ch = testsupport::random_channel(rng, 2, 2, 1 + trial % 4, 0.3);
    auto qg = testsupport::random_qgraph(rng, 1 + trial % 4, 2);
    auto u = testsupport::random_policy(rng, ch, qg.nq(), unit(rng) < 0.5 ? 0.0 : 0.02);
    Stationary st;
    try {
      st = stationary(ch, qg, u);
    } catch (const Error&) {
      continue;
    }
    ++solves;
    const auto P = testsupport::chain(ch, qg, u);
    std::vector<double> next(P.size(), 0.0);
    for (std::size_t i = 0; i < P.size(); ++i)
      for (std::size_t j = 0; j < P.size(); ++j) next[j] += st.pi[i] * P[i][j];
    worst_residual = std::max(worst_residual, max_gap(next, st.pi));
  }

  // Certified lower bounds against the optimized upper bound on the same graph.
  int ordered_fail = 0, ordered = 0;
  UpperOptions tied;
  tied.ties = dec3_symmetry_ties();
  for (double eps : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto bec = builtin_bec_no11(eps);
    const double bec_hi = optimize_upper(bec, builtin_bec3()).value;
    for (double p : {0.1, 0.3, 0.45}) {
      ++ordered;
      if (lower_bound(bec, builtin_bec3(), bec3_lower_policy(bec, p)).rate > bec_hi + 1e-6) ++ordered_fail;
    }
    const auto dec = builtin_dec(eps);
    const double dec_hi = optimize_upper(dec, builtin_dec3(), tied).value;
    for (double p : {0.2, 0.5, 0.8}) {
      ++ordered;
      if (lower_bound(dec, builtin_dec3(), dec3_policy(0.5, p)).rate > dec_hi + 1e-6) ++ordered_fail;
    }
  }

  const bool ok = lemma_fail == 0 && fuzz_fail == 0 && solves > 0 && worst_residual <= 1e-10 && ordered_fail == 0;
  r.line(7, ok,
         "class coverage " + std::to_string(lemma_pairs - lemma_fail) + "/" + std::to_string(lemma_pairs) +
             ", belief fuzz " + std::to_string(10000 - fuzz_fail) + "/10000, " + std::to_string(solves) +
             fmt(" solves with worst residual %.2e, ", worst_residual) + "lower <= upper " +
             std::to_string(ordered - ordered_fail) + "/" + std::to_string(ordered));
}

}  // namespace

int main() {
  Report r;
  const std::vector<void (*)(Report&)> criteria{criterion1, criterion2, criterion3, criterion4,
                                                criterion5, criterion6, criterion7};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i](r);
    } catch (const std::exception& e) {
      r.line(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", r.failed, criteria.size());
  return r.failed == 0 ? 0 : 1;
}
