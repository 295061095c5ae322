#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbound/channel.hpp"
#include "qbound/coupled.hpp"
#include "qbound/qgraph.hpp"

namespace qbound {

/// I(X,S;Y|Q) in bits under W(y|x,s) u(x|s,q) pi(s,q).
/// Throws Error(not_in_p_pi) if `u` induces several closed classes.
double objective(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u);

/// Same, with pi already known (entries outside its class are zero).
double objective_given(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                       const std::vector<double>& pi);

/// Per-context pieces: H(Y|Q=q) and H(Y|X,S,Q=q), and p(q).
struct ContextTerms {
  std::vector<double> p_q, h_y_given_q, h_y_given_xsq;
};
ContextTerms context_terms(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                           const std::vector<double>& pi);

/// Row (s,q) of `follower` copies row `leader` with inputs permuted by perm[x].
struct PolicyTie {
  std::size_t leader_s, leader_q, follower_s, follower_q;
  std::vector<std::size_t> perm;
};

struct UpperOptions {
  std::size_t restarts = 8;
  std::size_t max_evals = 20000;  // per local search
  double floor = 1e-7;            // interior clipping of every permitted input
  double grid_step = 1e-2;        // 0 disables the grid pass
  std::size_t max_grid_dims = 3;
  std::uint64_t seed = 1;
  std::optional<std::size_t> anchor_state, anchor_context;
  std::vector<PolicyTie> ties;
  bool boundary_probe = true;
};

struct UpperDiagnostics {
  std::size_t free_parameters = 0;
  std::size_t evaluations = 0;
  std::size_t p_pi_violations = 0;
  bool grid_used = false;
  double grid_value = 0.0;
  std::vector<double> restart_values;
  double boundary_value = 0.0;
  bool boundary_improved = false;
  std::size_t period = 1;
  std::vector<std::vector<std::size_t>> closed_classes;
  std::vector<std::string> warnings;
};

struct BoundResult {
  double value = 0.0;  // bits per channel use; best found
  InputPolicy policy{1, 1, 1};
  std::vector<double> pi;
  std::vector<std::size_t> cls;
  UpperDiagnostics diagnostics;
};

/// Maximizes I(X,S;Y|Q) over policies: grid pass for few free parameters,
/// multistart Nelder-Mead on simplex-projected rows, then a boundary probe.
BoundResult optimize_upper(const UnifilarChannel& ch, const QGraph& qg, const UpperOptions& opts = {});

/// The symmetric DEC tying: (s=1,q2) mirrors (s=0,q1) and (s=1,q3) mirrors (s=0,q3).
std::vector<PolicyTie> dec3_symmetry_ties();

enum class ChannelFamily { trapdoor, dec, bec_no11 };
ChannelFamily parse_family(const std::string& name);
const char* family_name(ChannelFamily f);
UnifilarChannel make_family_channel(ChannelFamily f, double param);
/// Closed-form reference for the family at `param`.
double family_oracle(ChannelFamily f, double param);

struct SweepRow {
  double param = 0.0;
  bool ok = false;
  double upper = 0.0;
  double oracle = 0.0;
  std::string error;
};

/// optimize_upper across `params`; rows fail independently.
std::vector<SweepRow> sweep(ChannelFamily family, const QGraph& qg, const std::vector<double>& params,
                            const UpperOptions& opts = {}, bool with_oracle = true);

/// CSV with header param,upper_bound,oracle,gap; failed rows leave numbers empty.
std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_oracle = true);

/// Inclusive arithmetic grid from..to with `step`, robust to rounding.
std::vector<double> param_grid(double from, double to, double step);

}  // namespace qbound
