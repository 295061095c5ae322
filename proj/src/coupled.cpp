#include "qbound/coupled.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbound/error.hpp"

namespace qbound {

InputPolicy::InputPolicy(std::size_t nx, std::size_t ns, std::size_t nq)
    : nx_(nx), ns_(ns), nq_(nq), u_(nx * ns * nq, 0.0) {}

InputPolicy InputPolicy::uniform(const UnifilarChannel& ch, std::size_t nq) {
  InputPolicy u(ch.nx(), ch.ns(), nq);
  for (std::size_t s = 0; s < ch.ns(); ++s) {
    double count = 0;
    for (std::size_t x = 0; x < ch.nx(); ++x) count += ch.allowed(x, s) ? 1 : 0;
    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t x = 0; x < ch.nx(); ++x) u(x, s, q) = ch.allowed(x, s) ? 1.0 / count : 0.0;
  }
  return u;
}

std::vector<std::string> policy_issues(const UnifilarChannel& ch, std::size_t nq, const InputPolicy& u) {
  std::vector<std::string> issues;
  if (u.nx() != ch.nx() || u.ns() != ch.ns() || u.nq() != nq) {
    issues.push_back("policy shape does not match channel/Q-graph");
    return issues;
  }
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t s = 0; s < ch.ns(); ++s) {
      double sum = 0.0;
      for (std::size_t x = 0; x < ch.nx(); ++x) {
        double v = u(x, s, q);
        std::ostringstream os;
        if (!(v >= 0.0 && v <= 1.0)) {
          os << "u(x=" << x << "|s=" << s << ",q=" << q << ") = " << v << " outside [0,1]";
          issues.push_back(os.str());
        } else if (v > 0.0 && !ch.allowed(x, s)) {
          os << "u(x=" << x << "|s=" << s << ",q=" << q << ") = " << v << " but input is masked";
          issues.push_back(os.str());
        }
        sum += v;
      }
      if (!(std::abs(sum - 1.0) <= kKernelTol)) {
        std::ostringstream os;
        os << "policy row (s=" << s << ",q=" << q << ") sums to " << sum;
        issues.push_back(os.str());
      }
    }
  return issues;
}

void require_valid_policy(const UnifilarChannel& ch, std::size_t nq, const InputPolicy& u) {
  auto issues = policy_issues(ch, nq, u);
  if (issues.empty()) return;
  std::string msg = "invalid policy";
  for (const auto& i : issues) msg += "; " + i;
  throw Error(ErrorCode::invalid_argument, msg);
}

digraph::Adjacency CoupledGraph::adjacency() const {
  digraph::Adjacency adj(size());
  for (const auto& e : edges) adj[e.from].push_back(e.to);
  return adj;
}

CoupledGraph build_coupled(const UnifilarChannel& ch, const QGraph& qg) {
  if (ch.ny() != qg.ny()) {
    std::ostringstream os;
    os << "channel has " << ch.ny() << " outputs but Q-graph has " << qg.ny();
    throw Error(ErrorCode::alphabet_mismatch, os.str());
  }
  CoupledGraph cg;
  cg.ns = ch.ns();
  cg.nq = qg.nq();
  cg.channel_name = ch.name();
  cg.qgraph_name = qg.name();
  for (std::size_t q = 0; q < qg.nq(); ++q)
    for (std::size_t s = 0; s < ch.ns(); ++s)
      for (std::size_t x = 0; x < ch.nx(); ++x) {
        if (!ch.allowed(x, s)) continue;
        for (std::size_t y = 0; y < ch.ny(); ++y) {
          double w = ch.prob(y, x, s);
          if (w <= 0.0) continue;
          cg.edges.push_back({cg.node(s, q), cg.node(ch.next(x, y, s), qg.next(q, y)), x, y, w});
        }
      }
  return cg;
}

std::vector<std::vector<std::size_t>> closed_classes(const CoupledGraph& cg) {
  return digraph::closed_classes(cg.adjacency());
}

bool lemma1_check(const CoupledGraph& cg) {
  auto classes = closed_classes(cg);
  if (classes.empty()) return false;
  for (const auto& cls : classes) {
    std::vector<bool> seen_s(cg.ns, false), seen_q(cg.nq, false);
    for (std::size_t v : cls) {
      seen_s[cg.state_of(v)] = true;
      seen_q[cg.context_of(v)] = true;
    }
    if (std::find(seen_s.begin(), seen_s.end(), false) != seen_s.end()) return false;
    if (std::find(seen_q.begin(), seen_q.end(), false) != seen_q.end()) return false;
  }
  return true;
}

CoupledGraph prune(const CoupledGraph& cg, const InputPolicy& u, double tol) {
  CoupledGraph out = cg;
  out.edges.clear();
  for (const auto& e : cg.edges)
    if (u(e.x, cg.state_of(e.from), cg.context_of(e.from)) > tol) out.edges.push_back(e);
  return out;
}

bool in_P_pi(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u, double tol) {
  require_valid_policy(ch, qg.nq(), u);
  return closed_classes(prune(build_coupled(ch, qg), u, tol)).size() == 1;
}

std::size_t period(const CoupledGraph& cg, const std::vector<std::size_t>& cls) {
  return digraph::period(cg.adjacency(), cls);
}

std::vector<std::vector<std::size_t>> cyclic_partition(const CoupledGraph& cg,
                                                       const std::vector<std::size_t>& cls) {
  return digraph::cyclic_partition(cg.adjacency(), cls);
}

std::vector<std::size_t> select_class(const CoupledGraph& cg, std::optional<std::size_t> anchor) {
  auto classes = closed_classes(cg);
  if (!anchor) return classes.front();
  for (const auto& cls : classes)
    if (std::binary_search(cls.begin(), cls.end(), *anchor)) return cls;
  // Anchor is transient: take the first closed class it can reach.
  auto reach = digraph::reachable_from(cg.adjacency(), *anchor);
  for (const auto& cls : classes)
    if (reach[cls.front()]) return cls;
  return classes.front();
}

std::vector<double> transfer_matrix(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u) {
  const std::size_t ns = ch.ns(), n = ns * qg.nq();
  std::vector<double> t(n * n, 0.0);
  for (std::size_t q = 0; q < qg.nq(); ++q)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t x = 0; x < ch.nx(); ++x) {
        double ux = u(x, s, q);
        if (ux <= 0.0) continue;
        for (std::size_t y = 0; y < ch.ny(); ++y) {
          double w = ch.prob(y, x, s);
          if (w <= 0.0) continue;
          t[(q * ns + s) * n + qg.next(q, y) * ns + ch.next(x, y, s)] += w * ux;
        }
      }
  return t;
}

Stationary stationary(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                      const StationaryOptions& opts) {
  const std::size_t n = ch.ns() * qg.nq();
  Stationary result;
  if (opts.restrict_to) {
    result.cls = *opts.restrict_to;
  } else {
    auto pruned = prune(build_coupled(ch, qg), u, opts.prune_tol);
    auto classes = closed_classes(pruned);
    if (classes.size() == 1) {
      result.cls = classes.front();
    } else if (opts.anchor) {
      result.cls = select_class(pruned, opts.anchor);
    } else {
      std::ostringstream os;
      os << "policy induces " << classes.size() << " closed classes";
      throw Error(ErrorCode::not_in_p_pi, os.str());
    }
  }

  auto t = transfer_matrix(ch, qg, u);
  const auto& cls = result.cls;
  const std::size_t m = cls.size();
  // Balance equations (T_C^T - I) pi = 0 with the last row replaced by sum(pi) = 1.
  Eigen::MatrixXd a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        t[cls[j] * n + cls[i]] - (i == j ? 1.0 : 0.0);
  a.row(static_cast<Eigen::Index>(m - 1)).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  b(static_cast<Eigen::Index>(m - 1)) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < static_cast<Eigen::Index>(m))
    throw Error(ErrorCode::singular_system, "stationary system is singular on the selected class");
  Eigen::VectorXd sol = lu.solve(b);

  result.pi.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double v = std::max(0.0, sol(static_cast<Eigen::Index>(i)));
    result.pi[cls[i]] = v;
    total += v;
  }
  for (double& v : result.pi) v /= total;

  for (std::size_t j = 0; j < n; ++j) {
    double acc = -result.pi[j];
    for (std::size_t i : cls) acc += result.pi[i] * t[i * n + j];
    result.residual = std::max(result.residual, std::abs(acc));
  }
  if (!(result.residual <= kResidualReject)) {
    std::ostringstream os;
    os << "stationary residual " << result.residual << " exceeds " << kResidualReject;
    throw Error(ErrorCode::singular_system, os.str());
  }
  return result;
}

}  // namespace qbound
