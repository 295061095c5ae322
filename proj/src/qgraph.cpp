#include "qbound/qgraph.hpp"

#include <algorithm>
#include <numeric>

#include "qbound/channel.hpp"
#include "qbound/digraph.hpp"
#include "qbound/error.hpp"

namespace qbound {

QGraph::QGraph(std::size_t nq, std::size_t ny, std::vector<std::size_t> next, std::string name)
    : nq_(nq), ny_(ny), g_(std::move(next)), name_(std::move(name)) {
  if (nq_ == 0 || ny_ == 0) throw Error(ErrorCode::invalid_argument, "Q-graph sizes must be positive");
  if (g_.size() != nq_ * ny_)
    throw Error(ErrorCode::invalid_argument, "Q-graph table must have nq*ny entries");
  for (std::size_t v : g_)
    if (v >= nq_) throw Error(ErrorCode::invalid_argument, "Q-graph edge target out of range");
}

bool is_irreducible(const QGraph& qg) {
  digraph::Adjacency adj(qg.nq());
  for (std::size_t q = 0; q < qg.nq(); ++q)
    for (std::size_t y = 0; y < qg.ny(); ++y) adj[q].push_back(qg.next(q, y));
  return digraph::is_strongly_connected(adj);
}

std::size_t run(const QGraph& qg, std::size_t q0, std::span<const std::size_t> outputs) {
  if (q0 >= qg.nq()) throw Error(ErrorCode::invalid_argument, "initial context out of range");
  std::size_t q = q0;
  for (std::size_t y : outputs) {
    if (y >= qg.ny()) throw Error(ErrorCode::invalid_argument, "output symbol out of range");
    q = qg.next(q, y);
  }
  return q;
}

std::optional<std::vector<std::size_t>> find_isomorphism(const QGraph& a, const QGraph& b) {
  if (a.nq() != b.nq() || a.ny() != b.ny()) return std::nullopt;
  const std::size_t n = a.nq();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

  auto consistent = [&](const std::vector<std::size_t>& m) {
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t y = 0; y < a.ny(); ++y)
        if (b.next(m[q], y) != m[a.next(q, y)]) return false;
    return true;
  };

  if (is_irreducible(a)) {
    // Deterministic transitions: the image of node 0 fixes the whole map.
    for (std::size_t root = 0; root < n; ++root) {
      std::vector<std::size_t> m(n, kUnset);
      std::vector<bool> used(n, false);
      std::vector<std::size_t> todo{0};
      m[0] = root;
      used[root] = true;
      bool ok = true;
      while (!todo.empty() && ok) {
        std::size_t q = todo.back();
        todo.pop_back();
        for (std::size_t y = 0; y < a.ny() && ok; ++y) {
          std::size_t qa = a.next(q, y), qb = b.next(m[q], y);
          if (m[qa] == kUnset) {
            if (used[qb]) {
              ok = false;
            } else {
              m[qa] = qb;
              used[qb] = true;
              todo.push_back(qa);
            }
          } else {
            ok = m[qa] == qb;
          }
        }
      }
      if (ok && consistent(m)) return m;
    }
    return std::nullopt;
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n > 9) return std::nullopt;
  do {
    if (consistent(perm)) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

QGraph relabel(const QGraph& qg, std::span<const std::size_t> perm) {
  if (perm.size() != qg.nq()) throw Error(ErrorCode::invalid_argument, "permutation size mismatch");
  std::vector<std::size_t> g(qg.nq() * qg.ny());
  for (std::size_t q = 0; q < qg.nq(); ++q)
    for (std::size_t y = 0; y < qg.ny(); ++y) g[perm[q] * qg.ny() + y] = perm[qg.next(q, y)];
  return QGraph(qg.nq(), qg.ny(), std::move(g), qg.name());
}

QGraph builtin_single(std::size_t ny) { return QGraph(1, ny, std::vector<std::size_t>(ny, 0), "single"); }

QGraph builtin_bec2() {
  using namespace bec_out;
  std::vector<std::size_t> g(2 * 3);
  auto set = [&](std::size_t q, std::size_t y, std::size_t to) { g[q * 3 + y] = to; };
  set(0, zero, 0);
  set(0, erasure, 0);
  set(0, one, 1);
  set(1, zero, 0);
  set(1, one, 0);
  set(1, erasure, 0);
  return QGraph(2, 3, std::move(g), "bec2");
}

QGraph builtin_bec3() {
  using namespace bec_out;
  std::vector<std::size_t> g(3 * 3);
  auto set = [&](std::size_t q, std::size_t y, std::size_t to) { g[q * 3 + y] = to; };
  for (std::size_t q = 0; q < 3; ++q) {
    set(q, one, 0);
    set(q, zero, 1);
  }
  set(0, erasure, 1);
  set(1, erasure, 2);
  set(2, erasure, 2);
  return QGraph(3, 3, std::move(g), "bec3");
}

QGraph builtin_dec3() {
  using namespace dec_out;
  std::vector<std::size_t> g(3 * 4);
  for (std::size_t q = 0; q < 3; ++q) {
    g[q * 4 + minus] = 0;
    g[q * 4 + plus] = 1;
    g[q * 4 + erasure] = 2;
    g[q * 4 + zero] = q;
  }
  return QGraph(3, 4, std::move(g), "dec3");
}

}  // namespace qbound
