#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbound/channel.hpp"
#include "qbound/coupled.hpp"
#include "qbound/qgraph.hpp"

namespace qbound {

using Belief = std::vector<double>;

inline constexpr double kInvarianceTol = 1e-8;

/// p(y) = sum_{x,s} W(y|x,s) u(x|s) z(s) for an action row u laid out [s][x].
double output_probability(const UnifilarChannel& ch, std::span<const double> z, std::span<const double> action,
                          std::size_t y);

/// Forward BCJR step B(z, y). Throws Error(invalid_argument) if p(y) == 0.
Belief bcjr_update(const UnifilarChannel& ch, std::span<const double> z, std::span<const double> action,
                   std::size_t y);

/// Action row of `u` at context q, laid out [s][x].
std::vector<double> action_at(const InputPolicy& u, std::size_t q);

/// Aperiodic pruned closed class. Throws Error(not_in_p_pi) if the policy has several classes.
bool is_aperiodic_input(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                        double tol = kPruneTol);

struct InvarianceReport {
  bool invariant = false;
  std::vector<Belief> conditionals;     // pi(s|q); empty for contexts with pi(q) = 0
  std::vector<std::size_t> skipped;     // contexts outside the closed class
  std::optional<std::size_t> q, y;      // first violation
  double gap = 0.0;                     // its infinity-norm gap
  std::vector<double> pi;
  std::string note;
};

/// Checks B(pi_{S|Q=q}, y) == pi_{S|Q=g(q,y)} for every (q,y) with p(y|q) > prob_tol.
/// Throws Error(periodic_class) if the input is not aperiodic.
InvarianceReport is_bcjr_invariant(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                                   double prob_tol = kPruneTol, double inv_tol = kInvarianceTol);

struct LowerBound {
  double rate = 0.0;
  InvarianceReport report;
};

/// Certified achievable rate I(X,S;Y|Q); throws Error(not_certified) with the
/// witness in the message when invariance fails.
LowerBound lower_bound(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                       double prob_tol = kPruneTol, double inv_tol = kInvarianceTol);

/// Lower-bound policy family on the three-node BEC graph: p(x=1|s=0,q2) = p,
/// p(x=1|s=0,q3) = p/(1-p), p in [0, 1/2]; q1 reuses p (it is never visited with s=0).
InputPolicy bec3_lower_policy(const UnifilarChannel& bec, double p);

/// Symmetric DEC policy: p(x=0|s=0,q1) = p(x=1|s=1,q2) = a, p(x=1|s=0,q3) = p(x=0|s=1,q3) = p.
/// The unreachable rows (s=1,q1), (s=0,q2) are uniform.
InputPolicy dec3_policy(double a, double p);

/// Policy on the bec2 graph with p(x=1|s=0,q1) = p and x=0 elsewhere except uniform at (s=0,q2).
InputPolicy bec2_policy(double p);

/// Trapdoor policy for a four-node context graph with binary outputs, parameterized by z in [0,1]
/// and the channel parameter p; r = zp/(1-(1-p)z) is the mixing probability.
/// Throws Error(invalid_argument) unless qg has 4 nodes and 2 outputs.
InputPolicy trapdoor_lower_policy(double z, double p, const QGraph& qg);

/// Expected conditionals pi(s=0|q1..q4) of the trapdoor policy.
std::vector<double> trapdoor_expected_conditionals(double z, double p);

}  // namespace qbound
