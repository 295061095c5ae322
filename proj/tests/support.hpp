#pragma once

// Reference computations used only by the tests. Everything here is written
// from the definitions, without calling the library routine it checks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "qbound/channel.hpp"
#include "qbound/coupled.hpp"
#include "qbound/qgraph.hpp"

namespace testsupport {

inline double log2_safe(double v) { return v > 0.0 ? std::log2(v) : 0.0; }

inline qbound::UnifilarChannel random_channel(std::mt19937_64& rng, std::size_t nx, std::size_t ny, std::size_t ns,
                                              double zero_prob = 0.3) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_s(0, ns - 1), pick_y(0, ny - 1);
  std::vector<double> kernel(ny * nx * ns, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t s = 0; s < ns; ++s) {
      double sum = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        double w = unit(rng) < zero_prob ? 0.0 : unit(rng);
        kernel[(y * nx + x) * ns + s] = w;
        sum += w;
      }
      if (sum == 0.0) {
        const std::size_t y = pick_y(rng);
        kernel[(y * nx + x) * ns + s] = 1.0;
        sum = 1.0;
      }
      for (std::size_t y = 0; y < ny; ++y) kernel[(y * nx + x) * ns + s] /= sum;
    }
  std::vector<std::size_t> next(nx * ny * ns);
  for (auto& v : next) v = pick_s(rng);
  return qbound::UnifilarChannel(nx, ny, ns, std::move(kernel), std::move(next), {}, "random");
}

/// Every output has positive probability from every state under some input.
inline bool full_output_support(const qbound::UnifilarChannel& ch) {
  for (std::size_t s = 0; s < ch.ns(); ++s)
    for (std::size_t y = 0; y < ch.ny(); ++y) {
      double m = 0.0;
      for (std::size_t x = 0; x < ch.nx(); ++x) m += ch.prob(y, x, s);
      if (m <= 0.0) return false;
    }
  return true;
}

inline qbound::QGraph random_qgraph(std::mt19937_64& rng, std::size_t nq, std::size_t ny) {
  std::uniform_int_distribution<std::size_t> pick(0, nq - 1);
  std::vector<std::size_t> g(nq * ny);
  for (auto& v : g) v = pick(rng);
  return qbound::QGraph(nq, ny, std::move(g), "random");
}

/// Random policy with every permitted entry at least `floor`.
inline qbound::InputPolicy random_policy(std::mt19937_64& rng, const qbound::UnifilarChannel& ch, std::size_t nq,
                                         double floor = 0.02) {
  std::uniform_real_distribution<double> unit(floor, 1.0);
  qbound::InputPolicy u(ch.nx(), ch.ns(), nq);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t s = 0; s < ch.ns(); ++s) {
      double sum = 0.0;
      for (std::size_t x = 0; x < ch.nx(); ++x)
        if (ch.allowed(x, s)) sum += (u(x, s, q) = unit(rng));
      for (std::size_t x = 0; x < ch.nx(); ++x) u(x, s, q) /= sum;
    }
  return u;
}

/// Row-stochastic matrix on nodes q*ns+s, written out from the definition.
inline std::vector<std::vector<double>> chain(const qbound::UnifilarChannel& ch, const qbound::QGraph& qg,
                                              const qbound::InputPolicy& u) {
  const std::size_t ns = ch.ns(), n = ns * qg.nq();
  std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
  for (std::size_t q = 0; q < qg.nq(); ++q)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t x = 0; x < ch.nx(); ++x)
        for (std::size_t y = 0; y < ch.ny(); ++y) {
          const std::size_t to = qg.next(q, y) * ns + ch.next(x, y, s);
          P[q * ns + s][to] += u(x, s, q) * ch.prob(y, x, s);
        }
  return P;
}

/// Stationary vector by iterating the lazy chain (I+P)/2 from `start`.
inline std::vector<double> power_stationary(const std::vector<std::vector<double>>& P, std::vector<double> start,
                                            std::size_t max_iter = 200000) {
  const std::size_t n = P.size();
  std::vector<double> next(n);
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t j = 0; j < n; ++j) next[j] = 0.5 * start[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += 0.5 * start[i] * P[i][j];
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(next[j] - start[j]));
    start.swap(next);
    if (d < 1e-16) break;
  }
  return start;
}

/// sum p(s,q,x,y) log2[ W(y|x,s) / p(y|q) ].
inline double mutual_information(const qbound::UnifilarChannel& ch, const qbound::QGraph& qg,
                                 const qbound::InputPolicy& u, const std::vector<double>& pi) {
  const std::size_t ns = ch.ns();
  double total = 0.0;
  for (std::size_t q = 0; q < qg.nq(); ++q) {
    double pq = 0.0;
    std::vector<double> py(ch.ny(), 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      pq += pi[q * ns + s];
      for (std::size_t x = 0; x < ch.nx(); ++x)
        for (std::size_t y = 0; y < ch.ny(); ++y) py[y] += pi[q * ns + s] * u(x, s, q) * ch.prob(y, x, s);
    }
    if (pq <= 0.0) continue;
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t x = 0; x < ch.nx(); ++x)
        for (std::size_t y = 0; y < ch.ny(); ++y) {
          const double joint = pi[q * ns + s] * u(x, s, q) * ch.prob(y, x, s);
          if (joint <= 0.0) continue;
          total += joint * std::log2(ch.prob(y, x, s) * pq / py[y]);
        }
  }
  return total;
}

/// Capacity of a memoryless channel W[y][x] by Blahut-Arimoto.
inline double blahut_arimoto(const std::vector<std::vector<double>>& W, std::size_t iters = 20000) {
  const std::size_t ny = W.size(), nx = W[0].size();
  std::vector<double> p(nx, 1.0 / static_cast<double>(nx)), c(nx);
  double lo = 0.0, hi = 1.0;
  for (std::size_t it = 0; it < iters; ++it) {
    std::vector<double> py(ny, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) py[y] += W[y][x] * p[x];
    for (std::size_t x = 0; x < nx; ++x) {
      double d = 0.0;
      for (std::size_t y = 0; y < ny; ++y)
        if (W[y][x] > 0.0) d += W[y][x] * std::log2(W[y][x] / py[y]);
      c[x] = std::exp2(d);
    }
    double z = 0.0;
    for (std::size_t x = 0; x < nx; ++x) z += p[x] * c[x];
    lo = std::log2(z);
    hi = std::log2(*std::max_element(c.begin(), c.end()));
    if (hi - lo < 1e-12) break;
    for (std::size_t x = 0; x < nx; ++x) p[x] = p[x] * c[x] / z;
  }
  return 0.5 * (lo + hi);
}

/// Transitive closure by repeated squaring of the boolean reachability relation.
inline std::vector<std::vector<bool>> reach(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::vector<bool>> R(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    R[i][i] = true;
    for (std::size_t j : adj[i]) R[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (R[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (R[k][j]) R[i][j] = true;
  return R;
}

/// Closed classes from the closure: i is in a closed class iff everything it
/// reaches reaches it back. Classes sorted by smallest node.
inline std::vector<std::vector<std::size_t>> closed_classes_bruteforce(
    const std::vector<std::vector<std::size_t>>& adj) {
  const auto R = reach(adj);
  const std::size_t n = adj.size();
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    bool closed = true;
    for (std::size_t j = 0; j < n; ++j)
      if (R[i][j] && !R[j][i]) closed = false;
    if (!closed) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j)
      if (R[i][j]) {
        cls.push_back(j);
        used[j] = true;
      }
    out.push_back(cls);
  }
  return out;
}

/// Period of a strongly connected node set: gcd of k such that some node of the
/// set returns to itself in exactly k steps, k <= 2n^2.
inline std::size_t period_bruteforce(const std::vector<std::vector<std::size_t>>& adj,
                                     const std::vector<std::size_t>& cls) {
  const std::size_t n = adj.size();
  const std::size_t v0 = cls.front();
  std::vector<bool> cur(n, false), nxt(n);
  cur[v0] = true;
  std::size_t g = 0;
  for (std::size_t k = 1; k <= 2 * n * n + 2; ++k) {
    std::fill(nxt.begin(), nxt.end(), false);
    for (std::size_t i = 0; i < n; ++i)
      if (cur[i])
        for (std::size_t j : adj[i]) nxt[j] = true;
    cur.swap(nxt);
    if (cur[v0]) g = std::gcd(g, k);
  }
  return g;
}

/// The trapdoor context graph with four nodes that makes the mixing policy
/// BCJR-invariant; found by exhaustive search over all 4^8 tables.
inline qbound::QGraph trapdoor_q4() { return qbound::QGraph(4, 2, {2, 1, 3, 1, 2, 0, 2, 1}, "trapdoor-q4"); }

}  // namespace testsupport
