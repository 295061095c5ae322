#include "qbound/bound.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "qbound/entropy.hpp"
#include "qbound/error.hpp"
#include "qbound/oracles.hpp"
#include "qbound/search.hpp"

namespace qbound {

ContextTerms context_terms(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                           const std::vector<double>& pi) {
  const std::size_t ns = ch.ns(), nq = qg.nq(), ny = ch.ny();
  ContextTerms terms;
  terms.p_q.assign(nq, 0.0);
  terms.h_y_given_q.assign(nq, 0.0);
  terms.h_y_given_xsq.assign(nq, 0.0);
  std::vector<double> p_yq(ny);
  for (std::size_t q = 0; q < nq; ++q) {
    std::fill(p_yq.begin(), p_yq.end(), 0.0);
    double cond = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      const double mass = pi[q * ns + s];
      if (mass <= 0.0) continue;
      terms.p_q[q] += mass;
      for (std::size_t x = 0; x < ch.nx(); ++x) {
        const double ux = u(x, s, q);
        if (ux <= 0.0) continue;
        double hrow = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
          const double w = ch.prob(y, x, s);
          p_yq[y] += w * ux * mass;
          hrow += plogp(w);
        }
        cond += mass * ux * hrow;
      }
    }
    if (terms.p_q[q] <= 0.0) continue;
    double h = 0.0;
    for (double m : p_yq) h += plogp(m / terms.p_q[q]);
    terms.h_y_given_q[q] = h;
    terms.h_y_given_xsq[q] = cond / terms.p_q[q];
  }
  return terms;
}

double objective_given(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u,
                       const std::vector<double>& pi) {
  auto terms = context_terms(ch, qg, u, pi);
  double value = 0.0;
  for (std::size_t q = 0; q < qg.nq(); ++q)
    value += terms.p_q[q] * (terms.h_y_given_q[q] - terms.h_y_given_xsq[q]);
  return std::max(0.0, value);
}

double objective(const UnifilarChannel& ch, const QGraph& qg, const InputPolicy& u) {
  require_valid_policy(ch, qg.nq(), u);
  return objective_given(ch, qg, u, stationary(ch, qg, u).pi);
}

std::vector<PolicyTie> dec3_symmetry_ties() {
  return {{0, 0, 1, 1, {1, 0}}, {0, 2, 1, 2, {1, 0}}};
}

namespace {

// Maps free coordinates to a policy: each free (s,q) row over its k permitted
// inputs takes k-1 coordinates, the last entry closes the row, and the row is
// projected onto the simplex with an interior floor.
class Parameterization {
 public:
  Parameterization(const UnifilarChannel& ch, std::size_t nq, const std::vector<std::size_t>& cls,
                   std::vector<PolicyTie> ties, double floor)
      : ns_(ch.ns()), ties_(std::move(ties)), floor_(floor), base_(InputPolicy::uniform(ch, nq)) {
    std::vector<bool> follower(ns_ * nq, false);
    for (const auto& t : ties_) {
      if (t.perm.size() != ch.nx() || t.leader_s >= ns_ || t.follower_s >= ns_ || t.leader_q >= nq ||
          t.follower_q >= nq)
        throw Error(ErrorCode::invalid_argument, "policy tie out of range");
      for (std::size_t x = 0; x < ch.nx(); ++x)
        if (ch.allowed(x, t.leader_s) != ch.allowed(t.perm[x], t.follower_s))
          throw Error(ErrorCode::invalid_argument, "policy tie does not respect the input mask");
      follower[t.follower_q * ns_ + t.follower_s] = true;
    }
    std::size_t offset = 0;
    for (std::size_t v : cls) {
      if (follower[v]) continue;
      Row row{v % ns_, v / ns_, {}, offset};
      for (std::size_t x = 0; x < ch.nx(); ++x)
        if (ch.allowed(x, row.s)) row.inputs.push_back(x);
      if (row.inputs.size() < 2) continue;
      offset += row.inputs.size() - 1;
      rows_.push_back(std::move(row));
    }
    dims_ = offset;
  }

  std::size_t dims() const { return dims_; }

  InputPolicy decode(std::span<const double> theta, double* infeasibility = nullptr) const {
    InputPolicy u = base_;
    double off = 0.0;
    std::vector<double> v;
    for (const auto& row : rows_) {
      const std::size_t k = row.inputs.size();
      v.assign(k, 0.0);
      double rest = 1.0;
      for (std::size_t i = 0; i + 1 < k; ++i) {
        v[i] = theta[row.offset + i];
        rest -= v[i];
      }
      v[k - 1] = rest;
      auto w = search::project_to_simplex(v, floor_);
      for (std::size_t i = 0; i < k; ++i) {
        off += std::abs(w[i] - v[i]);
        u(row.inputs[i], row.s, row.q) = w[i];
      }
    }
    apply_ties(u);
    if (infeasibility) *infeasibility = off;
    return u;
  }

  std::vector<double> encode(const InputPolicy& u) const {
    std::vector<double> theta(dims_);
    for (const auto& row : rows_)
      for (std::size_t i = 0; i + 1 < row.inputs.size(); ++i) theta[row.offset + i] = u(row.inputs[i], row.s, row.q);
    return theta;
  }

  void apply_ties(InputPolicy& u) const {
    for (const auto& t : ties_)
      for (std::size_t x = 0; x < u.nx(); ++x) u(t.perm[x], t.follower_s, t.follower_q) = u(x, t.leader_s, t.leader_q);
  }

  std::vector<double> random_point(std::mt19937_64& rng) const {
    std::vector<double> theta(dims_);
    std::exponential_distribution<double> expo(1.0);
    for (const auto& row : rows_) {
      std::vector<double> e(row.inputs.size());
      double sum = 0.0;
      for (double& x : e) sum += (x = expo(rng));
      for (std::size_t i = 0; i + 1 < e.size(); ++i) theta[row.offset + i] = e[i] / sum;
    }
    return theta;
  }

  std::vector<double> uniform_point() const {
    std::vector<double> theta(dims_);
    for (const auto& row : rows_)
      for (std::size_t i = 0; i + 1 < row.inputs.size(); ++i)
        theta[row.offset + i] = 1.0 / static_cast<double>(row.inputs.size());
    return theta;
  }

  /// Calls visit(theta) for every lattice point with spacing 1/m in every row.
  template <class Visit>
  void for_each_lattice_point(std::size_t m, Visit&& visit) const {
    std::vector<std::vector<std::vector<double>>> per_row;
    for (const auto& row : rows_) {
      std::vector<std::vector<double>> pts;
      std::vector<std::size_t> c(row.inputs.size() - 1, 0);
      lattice(c, 0, m, m, pts);
      per_row.push_back(std::move(pts));
    }
    std::vector<std::size_t> idx(rows_.size(), 0);
    std::vector<double> theta(dims_);
    while (true) {
      for (std::size_t r = 0; r < rows_.size(); ++r)
        std::copy(per_row[r][idx[r]].begin(), per_row[r][idx[r]].end(), theta.begin() + static_cast<long>(rows_[r].offset));
      visit(theta);
      std::size_t r = 0;
      while (r < rows_.size() && ++idx[r] == per_row[r].size()) idx[r++] = 0;
      if (r == rows_.size()) break;
    }
  }

  /// Deterministic policies on the free rows (one input per row); stops at `limit`.
  std::vector<InputPolicy> corners(std::size_t limit) const {
    std::size_t count = 1;
    for (const auto& row : rows_) {
      count *= row.inputs.size();
      if (count > limit) return {};
    }
    std::vector<InputPolicy> out;
    std::vector<std::size_t> pick(rows_.size(), 0);
    while (true) {
      InputPolicy u = base_;
      for (std::size_t r = 0; r < rows_.size(); ++r)
        for (std::size_t i = 0; i < rows_[r].inputs.size(); ++i)
          u(rows_[r].inputs[i], rows_[r].s, rows_[r].q) = i == pick[r] ? 1.0 : 0.0;
      apply_ties(u);
      out.push_back(std::move(u));
      std::size_t r = 0;
      while (r < rows_.size() && ++pick[r] == rows_[r].inputs.size()) pick[r++] = 0;
      if (r == rows_.size()) break;
    }
    return out;
  }

 private:
  struct Row {
    std::size_t s, q;
    std::vector<std::size_t> inputs;
    std::size_t offset;
  };

  static void lattice(std::vector<std::size_t>& c, std::size_t i, std::size_t left, std::size_t m,
                      std::vector<std::vector<double>>& out) {
    if (i == c.size()) {
      std::vector<double> p(c.size());
      for (std::size_t j = 0; j < c.size(); ++j) p[j] = static_cast<double>(c[j]) / static_cast<double>(m);
      out.push_back(std::move(p));
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      c[i] = v;
      lattice(c, i + 1, left - v, m, out);
    }
  }

  std::size_t ns_;
  std::vector<PolicyTie> ties_;
  double floor_;
  InputPolicy base_;
  std::vector<Row> rows_;
  std::size_t dims_ = 0;
};

constexpr double kPenalty = 10.0;
constexpr double kFailed = -1e9;
constexpr double kSnap = 1e-4;
constexpr double kLatticeSlack = 1e-12;
constexpr std::size_t kCornerLimit = 4096;

std::vector<std::size_t> pick_class(const CoupledGraph& cg, const UpperOptions& opts, UpperDiagnostics& diag) {
  auto classes = closed_classes(cg);
  diag.closed_classes = classes;
  auto adj = cg.adjacency();
  if (opts.anchor_state || opts.anchor_context) {
    std::size_t anchor = cg.node(opts.anchor_state.value_or(0), opts.anchor_context.value_or(0));
    if (anchor >= cg.size()) throw Error(ErrorCode::invalid_argument, "anchor node out of range");
    auto cls = select_class(cg, anchor);
    diag.period = digraph::period(adj, cls);
    if (diag.period != 1) diag.warnings.push_back("selected closed class is periodic; the bound assumes aperiodicity");
    return cls;
  }
  for (const auto& cls : classes)
    if (digraph::period(adj, cls) == 1) {
      diag.period = 1;
      return cls;
    }
  throw Error(ErrorCode::periodic_class, "no aperiodic closed class in the coupled graph");
}

// Value of a boundary policy if it keeps a single aperiodic closed class inside `cls`.
std::optional<std::pair<double, std::vector<double>>> boundary_value(const UnifilarChannel& ch, const QGraph& qg,
                                                                     const CoupledGraph& cg,
                                                                     const std::vector<std::size_t>& cls,
                                                                     const InputPolicy& u) {
  auto pruned = prune(cg, u, kPruneTol);
  std::vector<std::vector<std::size_t>> inside;
  for (auto& c : closed_classes(pruned))
    if (std::binary_search(cls.begin(), cls.end(), c.front())) inside.push_back(std::move(c));
  if (inside.size() != 1) return std::nullopt;
  if (digraph::period(pruned.adjacency(), inside.front()) != 1) return std::nullopt;
  StationaryOptions so;
  so.restrict_to = inside.front();
  try {
    auto st = stationary(ch, qg, u, so);
    return std::make_pair(objective_given(ch, qg, u, st.pi), std::move(st.pi));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

BoundResult optimize_upper(const UnifilarChannel& ch, const QGraph& qg, const UpperOptions& opts) {
  require_valid(ch);
  auto cg = build_coupled(ch, qg);
  BoundResult result;
  auto& diag = result.diagnostics;
  if (!is_strongly_connected(ch)) diag.warnings.push_back("channel is not strongly connected");
  if (!is_irreducible(qg)) diag.warnings.push_back("Q-graph is not irreducible");

  result.cls = pick_class(cg, opts, diag);
  Parameterization param(ch, qg.nq(), result.cls, opts.ties, opts.floor);
  diag.free_parameters = param.dims();

  StationaryOptions so;
  so.restrict_to = result.cls;
  auto exact = [&](const InputPolicy& u, std::vector<double>* pi_out) {
    auto st = stationary(ch, qg, u, so);
    double v = objective_given(ch, qg, u, st.pi);
    if (pi_out) *pi_out = std::move(st.pi);
    return v;
  };
  std::size_t violations = 0, evals = 0;
  auto f = [&](std::span<const double> theta) {
    double off = 0.0;
    auto u = param.decode(theta, &off);
    try {
      return exact(u, nullptr) - kPenalty * off;
    } catch (const Error&) {
#pragma omp atomic
      ++violations;
      return kFailed;
    }
  };

  search::NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.initial_step = 0.1;

  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_theta = param.uniform_point();

  if (opts.grid_step > 0.0 && param.dims() > 0 && param.dims() <= opts.max_grid_dims) {
    diag.grid_used = true;
    const auto m = static_cast<std::size_t>(std::llround(1.0 / opts.grid_step));
    param.for_each_lattice_point(m, [&](const std::vector<double>& theta) {
      ++evals;
      double v = f(theta);
      if (v > best) {
        best = v;
        best_theta = theta;
      }
    });
    diag.grid_value = best;
    search::NelderMeadOptions fine = nm;
    fine.initial_step = opts.grid_step;
    auto r = search::nelder_mead_max(f, best_theta, fine);
    evals += r.evals;
    if (r.value > best) {
      best = r.value;
      best_theta = r.x;
    }
  }

  const std::size_t starts = std::max<std::size_t>(opts.restarts, 1);
  std::vector<search::Result> runs(starts);
  std::vector<std::size_t> run_evals(starts, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < starts; ++r) {
    std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + r);
    auto x0 = r == 0 ? param.uniform_point() : param.random_point(rng);
    runs[r] = search::nelder_mead_max(f, x0, nm);
    run_evals[r] = runs[r].evals;
  }
  for (std::size_t r = 0; r < starts; ++r) {
    evals += run_evals[r];
    diag.restart_values.push_back(runs[r].value);
    if (runs[r].value > best) {
      best = runs[r].value;
      best_theta = runs[r].x;
    }
  }
  if (best <= kFailed) throw Error(ErrorCode::not_in_p_pi, "every start fell outside the admissible policy set");

  // Local search stalls ~sqrt(f_tol) away from a flat optimum; pull each
  // coordinate back onto the lattice when that costs nothing measurable.
  const double lattice = opts.grid_step > 0.0 ? opts.grid_step : 1e-2;
  for (std::size_t i = 0; i < best_theta.size(); ++i) {
    auto trial = best_theta;
    trial[i] = std::round(trial[i] / lattice) * lattice;
    if (trial[i] == best_theta[i]) continue;
    ++evals;
    const double v = f(trial);
    if (v >= best - kLatticeSlack) {
      best = std::max(best, v);
      best_theta = std::move(trial);
    }
  }

  result.policy = param.decode(best_theta);
  result.value = exact(result.policy, &result.pi);

  if (opts.boundary_probe) {
    std::vector<InputPolicy> candidates;
    InputPolicy snapped = result.policy;
    for (std::size_t q = 0; q < qg.nq(); ++q)
      for (std::size_t s = 0; s < ch.ns(); ++s) {
        double sum = 0.0;
        for (std::size_t x = 0; x < ch.nx(); ++x) {
          if (snapped(x, s, q) < kSnap) snapped(x, s, q) = 0.0;
          sum += snapped(x, s, q);
        }
        for (std::size_t x = 0; x < ch.nx(); ++x) snapped(x, s, q) /= sum;
      }
    candidates.push_back(std::move(snapped));
    for (auto& c : param.corners(kCornerLimit)) candidates.push_back(std::move(c));
    diag.boundary_value = -std::numeric_limits<double>::infinity();
    for (const auto& u : candidates) {
      ++evals;
      auto bv = boundary_value(ch, qg, cg, result.cls, u);
      if (!bv) {
        ++violations;
        continue;
      }
      diag.boundary_value = std::max(diag.boundary_value, bv->first);
      if (bv->first > result.value) {
        result.value = bv->first;
        result.policy = u;
        result.pi = std::move(bv->second);
        diag.boundary_improved = true;
      }
    }
  }
  diag.evaluations = evals;
  diag.p_pi_violations = violations;
  return result;
}

ChannelFamily parse_family(const std::string& name) {
  if (name == "trapdoor") return ChannelFamily::trapdoor;
  if (name == "dec") return ChannelFamily::dec;
  if (name == "bec" || name == "bec_no11") return ChannelFamily::bec_no11;
  throw Error(ErrorCode::invalid_argument, "unknown channel family '" + name + "'");
}

const char* family_name(ChannelFamily f) {
  switch (f) {
    case ChannelFamily::trapdoor: return "trapdoor";
    case ChannelFamily::dec: return "dec";
    case ChannelFamily::bec_no11: return "bec_no11";
  }
  return "?";
}

UnifilarChannel make_family_channel(ChannelFamily f, double param) {
  switch (f) {
    case ChannelFamily::trapdoor: return builtin_trapdoor(param);
    case ChannelFamily::dec: return builtin_dec(param);
    case ChannelFamily::bec_no11: return builtin_bec_no11(param);
  }
  throw Error(ErrorCode::invalid_argument, "unknown channel family");
}

double family_oracle(ChannelFamily f, double param) {
  switch (f) {
    case ChannelFamily::trapdoor: return oracle_trapdoor_upper(param).value;
    case ChannelFamily::dec: return oracle_dec(param);
    case ChannelFamily::bec_no11: return oracle_bec(param);
  }
  throw Error(ErrorCode::invalid_argument, "unknown channel family");
}

std::vector<SweepRow> sweep(ChannelFamily family, const QGraph& qg, const std::vector<double>& params,
                            const UpperOptions& opts, bool with_oracle) {
  std::vector<SweepRow> rows(params.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < params.size(); ++i) {
    SweepRow& row = rows[i];
    row.param = params[i];
    try {
      row.upper = optimize_upper(make_family_channel(family, row.param), qg, opts).value;
      if (with_oracle) row.oracle = family_oracle(family, row.param);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_oracle) {
  std::ostringstream os;
  os << "param,upper_bound,oracle,gap\n" << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.param << ',';
    if (r.ok) {
      os << r.upper << ',';
      if (with_oracle) os << r.oracle << ',' << (r.upper - r.oracle);
      else os << ',';
    } else {
      os << ",,";
    }
    os << '\n';
  }
  return os.str();
}

std::vector<double> param_grid(double from, double to, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::invalid_argument, "grid step must be positive");
  std::vector<double> out;
  if (to < from) return out;
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    double v = from + step * static_cast<double>(i);
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

}  // namespace qbound
