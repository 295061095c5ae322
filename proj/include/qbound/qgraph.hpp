#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qbound {

/// Output-driven context automaton: node q moves to g(q,y) on output y.
class QGraph {
 public:
  /// `next` is laid out [q][y]. Throws Error(invalid_argument) on shape or range errors.
  QGraph(std::size_t nq, std::size_t ny, std::vector<std::size_t> next, std::string name = {});

  std::size_t nq() const { return nq_; }
  std::size_t ny() const { return ny_; }
  const std::string& name() const { return name_; }
  std::size_t next(std::size_t q, std::size_t y) const { return g_[q * ny_ + y]; }
  const std::vector<std::size_t>& table() const { return g_; }

 private:
  std::size_t nq_, ny_;
  std::vector<std::size_t> g_;
  std::string name_;
};

bool is_irreducible(const QGraph& qg);

/// Context reached from q0 after the output sequence; throws on out-of-range symbols.
std::size_t run(const QGraph& qg, std::size_t q0, std::span<const std::size_t> outputs);

/// Node map m with g2(m(q), y) = m(g1(q, y)) for all q, y, if one exists.
std::optional<std::vector<std::size_t>> find_isomorphism(const QGraph& a, const QGraph& b);

/// Copy of `qg` with node q renamed perm[q].
QGraph relabel(const QGraph& qg, std::span<const std::size_t> perm);

/// Single context; I(X,S;Y|Q) then reduces to I(X,S;Y).
QGraph builtin_single(std::size_t ny);

/// Two-node graph for the constrained BEC (outputs 0, 1, ?): y=1 moves q1 to q2, q2 returns to q1.
QGraph builtin_bec2();

/// Three-node graph for the constrained BEC: 1 -> q1, 0 -> q2, erasures walk q1 -> q2 -> q3 -> q3.
QGraph builtin_bec3();

/// Three-node graph for the DEC (outputs -1, 0, 1, ?): -1 -> q1, 1 -> q2, ? -> q3, 0 stays.
QGraph builtin_dec3();

}  // namespace qbound
