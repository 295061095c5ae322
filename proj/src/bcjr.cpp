#include "qbound/bcjr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbound/bound.hpp"
#include "qbound/error.hpp"

namespace qbound {

double output_probability(const UnifilarChannel& ch, std::span<const double> z, std::span<const double> action,
                          std::size_t y) {
  double p = 0.0;
  for (std::size_t s = 0; s < ch.ns(); ++s) {
    if (z[s] <= 0.0) continue;
    for (std::size_t x = 0; x < ch.nx(); ++x) p += ch.prob(y, x, s) * action[s * ch.nx() + x] * z[s];
  }
  return p;
}

Belief bcjr_update(const UnifilarChannel& ch, std::span<const double> z, std::span<const double> action,
                   std::size_t y) {
  if (z.size() != ch.ns() || action.size() != ch.ns() * ch.nx() || y >= ch.ny())
    throw Error(ErrorCode::invalid_argument, "bcjr_update: shape mismatch");
  Belief next(ch.ns(), 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < ch.ns(); ++s) {
    if (z[s] <= 0.0) continue;
    for (std::size_t x = 0; x < ch.nx(); ++x) {
      const double m = ch.prob(y, x, s) * action[s * ch.nx() + x] * z[s];
      next[ch.next(x, y, s)] += m;
      total += m;
    }
  }
  if (!(total > 0.0)) throw Error(ErrorCode::invalid_argument, "bcjr_update: output has zero probability");
  for (double& v : next) v /= total;
  return next;
}

std::vector<double> action_at(const InputPolicy& u, std::size_t q) {
  std::vector<double> a(u.ns() * u.nx());
  for (std::size_t s = 0; s < u.ns(); ++s)
    for (std::size_t x = 0; x < u.nx(); ++x) a[s * u.nx() + x] = u(x, s, q);
  return a;
}

namespace {

std::vector<std::size_t> single_pruned_class(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                                             double tol, CoupledGraph* pruned_out) {
  require_valid_policy(ch, qg.nq(), u);
  auto pruned = prune(build_coupled(ch, qg), u, tol);
  auto classes = closed_classes(pruned);
  if (classes.size() != 1) {
    std::ostringstream os;
    os << "policy induces " << classes.size() << " closed classes";
    throw Error(ErrorCode::not_in_p_pi, os.str());
  }
  if (pruned_out) *pruned_out = std::move(pruned);
  return classes.front();
}

}  // namespace

bool is_aperiodic_input(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u, double tol) {
  CoupledGraph pruned;
  auto cls = single_pruned_class(ch, qg, u, tol, &pruned);
  return period(pruned, cls) == 1;
}

InvarianceReport is_bcjr_invariant(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                                   double prob_tol, double inv_tol) {
  if (!is_aperiodic_input(ch, qg, u, prob_tol))
    throw Error(ErrorCode::periodic_class, "input is not aperiodic");
  StationaryOptions so;
  so.prune_tol = prob_tol;
  auto st = stationary(ch, qg, u, so);

  InvarianceReport rep;
  rep.pi = st.pi;
  const std::size_t ns = ch.ns();
  std::vector<double> p_q(qg.nq(), 0.0);
  rep.conditionals.assign(qg.nq(), {});
  for (std::size_t q = 0; q < qg.nq(); ++q) {
    for (std::size_t s = 0; s < ns; ++s) p_q[q] += st.pi[q * ns + s];
    if (p_q[q] <= prob_tol) {
      rep.skipped.push_back(q);
      continue;
    }
    Belief b(ns);
    for (std::size_t s = 0; s < ns; ++s) b[s] = st.pi[q * ns + s] / p_q[q];
    rep.conditionals[q] = std::move(b);
  }
  if (!rep.skipped.empty()) rep.note = "contexts with zero stationary mass were skipped";

  rep.invariant = true;
  for (std::size_t q = 0; q < qg.nq() && rep.invariant; ++q) {
    if (rep.conditionals[q].empty()) continue;
    const auto action = action_at(u, q);
    for (std::size_t y = 0; y < ch.ny(); ++y) {
      if (output_probability(ch, rep.conditionals[q], action, y) <= prob_tol) continue;
      auto image = bcjr_update(ch, rep.conditionals[q], action, y);
      const auto& target = rep.conditionals[qg.next(q, y)];
      double gap = 0.0;
      if (target.empty()) {
        gap = 1.0;
      } else {
        for (std::size_t s = 0; s < ns; ++s) gap = std::max(gap, std::abs(image[s] - target[s]));
      }
      if (gap > inv_tol) {
        rep.invariant = false;
        rep.q = q;
        rep.y = y;
        rep.gap = gap;
        break;
      }
    }
  }
  return rep;
}

LowerBound lower_bound(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u, double prob_tol,
                       double inv_tol) {
  LowerBound out;
  out.report = is_bcjr_invariant(ch, qg, u, prob_tol, inv_tol);
  if (!out.report.invariant) {
    std::ostringstream os;
    os << "policy is not BCJR-invariant: context q=" << *out.report.q << " output y=" << ch.y_label(*out.report.y)
       << " gap=" << out.report.gap;
    throw Error(ErrorCode::not_certified, os.str());
  }
  out.rate = objective_given(ch, qg, u, out.report.pi);
  return out;
}

InputPolicy bec3_lower_policy(const UnifilarChannel& bec, double p) {
  if (!(p >= 0.0 && p <= 0.5)) throw Error(ErrorCode::invalid_argument, "BEC policy parameter must lie in [0, 1/2]");
  InputPolicy u(bec.nx(), bec.ns(), 3);
  const double r[3] = {p, p, p / (1.0 - p)};
  for (std::size_t q = 0; q < 3; ++q) {
    u(1, 0, q) = r[q];
    u(0, 0, q) = 1.0 - r[q];
    u(0, 1, q) = 1.0;
  }
  return u;
}

InputPolicy dec3_policy(double a, double p) {
  InputPolicy u(2, 2, 3);
  u(0, 0, 0) = a;
  u(1, 0, 0) = 1.0 - a;
  u(1, 1, 1) = a;
  u(0, 1, 1) = 1.0 - a;
  u(1, 0, 2) = p;
  u(0, 0, 2) = 1.0 - p;
  u(0, 1, 2) = p;
  u(1, 1, 2) = 1.0 - p;
  u(0, 1, 0) = u(1, 1, 0) = 0.5;
  u(0, 0, 1) = u(1, 0, 1) = 0.5;
  return u;
}

InputPolicy bec2_policy(double p) {
  InputPolicy u(2, 2, 2);
  u(1, 0, 0) = p;
  u(0, 0, 0) = 1.0 - p;
  u(0, 0, 1) = u(1, 0, 1) = 0.5;
  u(0, 1, 0) = 1.0;
  u(0, 1, 1) = 1.0;
  return u;
}

InputPolicy trapdoor_lower_policy(double z, double p, const QGraph& qg) {
  if (qg.nq() != 4 || qg.ny() != 2)
    throw Error(ErrorCode::invalid_argument, "trapdoor policy needs a 4-node graph with binary outputs");
  if (!(z >= 0.0 && z <= 1.0 && p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::invalid_argument, "trapdoor policy parameters must lie in [0,1]");
  const double denom = 1.0 - (1.0 - p) * z;
  const double r = denom > 0.0 ? z * p / denom : 1.0;
  InputPolicy u(2, 2, 4);
  // p(x=0|s=0,q) for q1..q4 and p(x=1|s=1,q) for q1..q4.
  const double stay0[4] = {1.0, 1.0, r, r};
  const double stay1[4] = {r, r, 1.0, 1.0};
  for (std::size_t q = 0; q < 4; ++q) {
    u(0, 0, q) = stay0[q];
    u(1, 0, q) = 1.0 - stay0[q];
    u(1, 1, q) = stay1[q];
    u(0, 1, q) = 1.0 - stay1[q];
  }
  return u;
}

std::vector<double> trapdoor_expected_conditionals(double z, double p) {
  return {(1.0 - p) * z, 1.0 - z, z, 1.0 - (1.0 - p) * z};
}

}  // namespace qbound
