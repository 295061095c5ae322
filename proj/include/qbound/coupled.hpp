#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qbound/channel.hpp"
#include "qbound/digraph.hpp"
#include "qbound/qgraph.hpp"

namespace qbound {

inline constexpr double kPruneTol = 1e-9;

/// Conditional input distribution u(x|s,q), one row per (s,q) pair.
class InputPolicy {
 public:
  InputPolicy(std::size_t nx, std::size_t ns, std::size_t nq);
  /// Uniform over the inputs each state permits.
  static InputPolicy uniform(const UnifilarChannel& ch, std::size_t nq);

  std::size_t nx() const { return nx_; }
  std::size_t ns() const { return ns_; }
  std::size_t nq() const { return nq_; }

  double operator()(std::size_t x, std::size_t s, std::size_t q) const {
    return u_[(q * ns_ + s) * nx_ + x];
  }
  double& operator()(std::size_t x, std::size_t s, std::size_t q) { return u_[(q * ns_ + s) * nx_ + x]; }

  /// Raw storage, rows ordered by node index q*ns + s.
  const std::vector<double>& data() const { return u_; }

 private:
  std::size_t nx_, ns_, nq_;
  std::vector<double> u_;
};

/// Row sums, ranges, mask agreement and shape; empty result means valid.
std::vector<std::string> policy_issues(const UnifilarChannel& ch, std::size_t nq, const InputPolicy& u);
void require_valid_policy(const UnifilarChannel& ch, std::size_t nq, const InputPolicy& u);

struct CoupledEdge {
  std::size_t from, to;
  std::size_t x, y;
  double w;  // channel probability W(y|x,s) of the label
};

/// (S,Q)-coupled graph. Node (s,q) has index q*ns + s.
struct CoupledGraph {
  std::size_t ns = 0, nq = 0;
  std::vector<CoupledEdge> edges;
  std::string channel_name, qgraph_name;

  std::size_t size() const { return ns * nq; }
  std::size_t node(std::size_t s, std::size_t q) const { return q * ns + s; }
  std::size_t state_of(std::size_t v) const { return v % ns; }
  std::size_t context_of(std::size_t v) const { return v / ns; }
  digraph::Adjacency adjacency() const;
};

/// Throws Error(alphabet_mismatch) when the output alphabets differ.
CoupledGraph build_coupled(const UnifilarChannel& ch, const QGraph& qg);

std::vector<std::vector<std::size_t>> closed_classes(const CoupledGraph& cg);

/// At least one closed class exists and every closed class meets every state
/// and every context. The context half can fail when some output is
/// impossible from some state, even for a strongly connected channel.
bool lemma1_check(const CoupledGraph& cg);

/// Drops edges whose input label has u(x|s,q) <= tol.
CoupledGraph prune(const CoupledGraph& cg, const InputPolicy& u, double tol = kPruneTol);

bool in_P_pi(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u, double tol = kPruneTol);

std::size_t period(const CoupledGraph& cg, const std::vector<std::size_t>& cls);
std::vector<std::vector<std::size_t>> cyclic_partition(const CoupledGraph& cg,
                                                       const std::vector<std::size_t>& cls);

/// Closed class of `cg` selected by `anchor` (the class reachable from it
/// that contains it), or the first closed class in node order.
std::vector<std::size_t> select_class(const CoupledGraph& cg, std::optional<std::size_t> anchor);

/// Dense transfer matrix T[(s,q) -> (s',q')] = sum over labels of W(y|x,s) u(x|s,q), row-major.
std::vector<double> transfer_matrix(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u);

struct StationaryOptions {
  double prune_tol = kPruneTol;
  /// Restrict to the closed class containing this node when the pruned graph has several.
  std::optional<std::size_t> anchor;
  /// Solve on this node set (a closed class of the unpruned graph) instead of
  /// classifying the pruned graph; used by the optimizer.
  std::optional<std::vector<std::size_t>> restrict_to;
};

struct Stationary {
  std::vector<double> pi;             // indexed by node q*ns + s
  std::vector<std::size_t> cls;       // closed class carrying the mass
  double residual = 0.0;              // ||pi T - pi||_inf
};

inline constexpr double kResidualReject = 1e-8;

/// Unique stationary distribution of the chain induced by `u`.
/// Throws Error(not_in_p_pi) if the pruned graph has several closed classes and
/// no anchor selects one, Error(singular_system) if the solve fails.
Stationary stationary(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                      const StationaryOptions& opts = {});

}  // namespace qbound
