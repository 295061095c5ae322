#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbound/bcjr.hpp"
#include "qbound/belief_grid.hpp"
#include "qbound/channel.hpp"
#include "qbound/qgraph.hpp"

namespace qbound {

/// I(X,S;Y) in bits under z(s) u(x|s) W(y|x,s); action rows laid out [s][x].
/// Throws Error(invalid_argument) if the action uses a masked input.
double dp_reward(const UnifilarChannel& ch, std::span<const double> z, std::span<const double> action);

enum class Interpolation { barycentric, nearest };

struct ActionSearchOptions {
  double grid_step = 0.1;        // coarse scan of each state's input simplex
  std::size_t max_evals = 400;   // Nelder-Mead polish per node
  double f_tol = 1e-13;
};

struct ValueIterationOptions {
  std::size_t resolution = 100;
  std::size_t max_iters = 2000;
  double span_tol = 1e-7;
  Interpolation interpolation = Interpolation::barycentric;
  ActionSearchOptions action;
  bool parallel = true;
};

struct ValueIterationResult {
  double rate = 0.0;                  // midpoint of the final bracket
  double lower = 0.0, upper = 0.0;    // min / max of V_{k+1} - V_k
  std::size_t iterations = 0;
  bool converged = false;
  bool span_monotone = true;          // bracket width never grew (beyond 1e-9)
  std::vector<double> span_history;
  std::vector<double> values;         // relative values on the grid
  std::vector<std::vector<double>> actions;  // greedy action per grid node
  std::size_t resolution = 0;
};

/// Grid-based Bellman operator for the belief-state feedback-capacity DP.
class BeliefDp {
 public:
  BeliefDp(const UnifilarChannel& ch, std::size_t resolution, Interpolation interp = Interpolation::barycentric);

  const UnifilarChannel& channel() const { return ch_; }
  const BeliefGrid& grid() const { return grid_; }

  /// Free coordinates of an action: each state's permitted inputs minus one.
  std::size_t action_dims() const { return action_dims_; }
  std::vector<double> decode_action(std::span<const double> theta) const;
  std::vector<double> uniform_action() const;

  /// V evaluated off-grid.
  double value_at(std::span<const double> values, std::span<const double> z) const;

  /// reward + sum_y p(y) V(B(z,u,y)).
  double q_value(std::span<const double> values, std::span<const double> z, std::span<const double> action) const;

  struct Greedy {
    double value;
    std::vector<double> action;
  };
  /// Coarse scan plus Nelder-Mead polish, optionally warm-started.
  Greedy greedy(std::span<const double> values, std::span<const double> z, const ActionSearchOptions& opts,
                const std::vector<double>* warm = nullptr) const;

  /// One Jacobi sweep: next[i] = max_u Q(node_i, u); updates warm actions in place.
  void sweep_serial(std::span<const double> values, std::span<double> next,
                    std::vector<std::vector<double>>& actions, const ActionSearchOptions& opts) const;
  void sweep_parallel(std::span<const double> values, std::span<double> next,
                      std::vector<std::vector<double>>& actions, const ActionSearchOptions& opts) const;

 private:
  std::vector<double> encode_action(std::span<const double> action) const;

  UnifilarChannel ch_;
  BeliefGrid grid_;
  Interpolation interp_;
  std::vector<std::vector<std::size_t>> permitted_;
  std::size_t action_dims_ = 0;
};

/// Relative value iteration; the offset is the value at the first grid node.
ValueIterationResult value_iteration(const UnifilarChannel& ch, const ValueIterationOptions& opts = {});

struct VisitCell {
  std::vector<double> belief;   // centroid of visited beliefs
  std::size_t count = 0;
  std::vector<double> action;   // greedy action used there
};

struct VisitTransition {
  std::size_t from, y, to, count;
};

struct VisitHistogram {
  std::vector<VisitCell> cells;
  std::vector<VisitTransition> transitions;
  double cluster_tol = 1e-3;
  std::optional<UnifilarChannel> channel;
};

struct RolloutOptions {
  std::size_t steps = 200000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 7;
  double cluster_tol = 1e-3;
  std::optional<std::vector<double>> start;  // default: uniform belief
  ActionSearchOptions action{0.05, 600, 1e-14};
};

/// Simulates the closed-loop belief process under the greedy policy of `vi`.
VisitHistogram rollout(const UnifilarChannel& ch, const ValueIterationResult& vi, const RolloutOptions& opts = {});

struct ExtractedGraph {
  QGraph graph;
  std::vector<std::vector<double>> beliefs;  // centroid per node
  std::vector<std::vector<double>> actions;  // action per node
  std::vector<std::size_t> counts;
  std::size_t completed_edges = 0;           // (q,y) pairs filled by the belief update
};

/// Merges cells within `cluster_tol`, reads edges off the transitions and
/// completes unobserved (q,y) pairs by the belief update. Throws
/// Error(extraction_failed) when an image lands away from every node.
ExtractedGraph extract_qgraph(const VisitHistogram& hist, double cluster_tol = 1e-3);

/// Policy u(x|s,q) taking each extracted node's action.
InputPolicy policy_from_extraction(const ExtractedGraph& ex, const UnifilarChannel& ch);

}  // namespace qbound
