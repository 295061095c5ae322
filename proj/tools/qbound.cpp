// qbound: command-line front end for the bound, certification, DP and
// extraction routines.
//
// Exit codes: 0 success, 1 usage error, 2 library or I/O error,
// 3 lower bound refused because the policy is not BCJR-invariant.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qbound/bcjr.hpp"
#include "qbound/bound.hpp"
#include "qbound/coupled.hpp"
#include "qbound/dp.hpp"
#include "qbound/error.hpp"
#include "qbound/io.hpp"
#include "qbound/oracles.hpp"

namespace {

using qbound::io::json;

struct Globals {
  bool json_out = false;
  std::uint64_t seed = 1;
  std::optional<double> tol;
};

json number(const char* kind, double v) { return {{"kind", kind}, {"value", v}}; }

std::string digest(const std::vector<std::string>& parts) {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : parts)
    for (unsigned char c : p) h = (h ^ c) * 0x100000001b3ULL;
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// Inputs are digested by content so builtins and files hash the same way.
std::string input_text(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) return spec;
  std::ifstream in(spec);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Report {
  std::string command;
  std::vector<std::string> inputs;
  json results = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json to_json() const {
    std::vector<std::string> texts;
    for (const auto& i : inputs) texts.push_back(input_text(i));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {{"command", command}, {"inputs", inputs},          {"inputs_digest", digest(texts)},
            {"results", results}, {"wall_time_s", secs},      {"version", QBOUND_VERSION}};
  }
};

std::string fmt(double v, int prec = 8) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::string list(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

std::string node_name(std::size_t v, std::size_t ns) {
  return "(s" + std::to_string(v % ns) + ",q" + std::to_string(v / ns) + ")";
}

std::string node_list(const std::vector<std::size_t>& v, std::size_t ns) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + node_name(v[i], ns);
  return s;
}

json policy_table(const qbound::InputPolicy& u, std::ostream* human) {
  if (human) {
    *human << "  policy u(x|s,q):\n";
    for (std::size_t q = 0; q < u.nq(); ++q)
      for (std::size_t s = 0; s < u.ns(); ++s) {
        *human << "    q" << q << " s" << s << ":";
        for (std::size_t x = 0; x < u.nx(); ++x) *human << ' ' << fmt(u(x, s, q), 6);
        *human << '\n';
      }
  }
  return qbound::io::to_json(u);
}

void print_pi(const std::vector<double>& pi, std::size_t ns, std::size_t nq) {
  std::cout << "  stationary pi(s,q):\n      ";
  for (std::size_t s = 0; s < ns; ++s) std::cout << std::setw(12) << ("s" + std::to_string(s));
  std::cout << '\n';
  for (std::size_t q = 0; q < nq; ++q) {
    std::cout << "    q" << q;
    for (std::size_t s = 0; s < ns; ++s) std::cout << std::setw(12) << fmt(pi[q * ns + s], 8);
    std::cout << '\n';
  }
}

void emit(const Globals& g, const Report& r, const std::function<void()>& human) {
  if (g.json_out)
    std::cout << r.to_json().dump(2) << '\n';
  else
    human();
}

// ---------------------------------------------------------------------------

struct UpperArgs {
  std::string channel, qgraph, policy_out;
  std::size_t restarts = 8, max_evals = 20000;
  double grid_step = 1e-2;
  bool dec3_ties = false, no_boundary = false;
  std::optional<std::size_t> anchor_state, anchor_context;
};

int cmd_bound_upper(const Globals& g, const UpperArgs& a) {
  Report r{"bound-upper", {a.channel, a.qgraph}};
  const auto ch = qbound::io::load_channel(a.channel);
  const auto qg = qbound::io::load_qgraph(a.qgraph, ch.ny());
  qbound::UpperOptions opts;
  opts.restarts = a.restarts;
  opts.max_evals = a.max_evals;
  opts.grid_step = a.grid_step;
  opts.seed = g.seed;
  opts.anchor_state = a.anchor_state;
  opts.anchor_context = a.anchor_context;
  opts.boundary_probe = !a.no_boundary;
  if (a.dec3_ties) opts.ties = qbound::dec3_symmetry_ties();
  const auto res = qbound::optimize_upper(ch, qg, opts);
  const auto& d = res.diagnostics;

  r.results["upper_bound"] = number("upper-bound", res.value);
  r.results["policy"] = qbound::io::to_json(res.policy);
  r.results["stationary"] = res.pi;
  r.results["closed_class"] = res.cls;
  r.results["diagnostics"] = {{"free_parameters", d.free_parameters}, {"evaluations", d.evaluations},
                              {"p_pi_violations", d.p_pi_violations}, {"grid_used", d.grid_used},
                              {"grid_value", number("upper-bound", d.grid_value)},
                              {"boundary_improved", d.boundary_improved}, {"period", d.period},
                              {"closed_classes", d.closed_classes}, {"warnings", d.warnings}};
  if (!a.policy_out.empty()) qbound::io::write_json(a.policy_out, qbound::io::to_json(res.policy));

  emit(g, r, [&] {
    std::cout << "channel " << ch.name() << ", Q-graph " << qg.name() << " (" << qg.nq() << " nodes)\n";
    std::cout << "upper bound (best found): " << fmt(res.value) << " bits/use\n";
    std::cout << "  free parameters " << d.free_parameters << ", evaluations " << d.evaluations
              << (d.grid_used ? ", grid pass used" : "") << (d.boundary_improved ? ", boundary policy won" : "")
              << '\n';
    std::cout << "  closed class " << node_list(res.cls, ch.ns()) << '\n';
    for (const auto& w : d.warnings) std::cout << "  warning: " << w << '\n';
    policy_table(res.policy, &std::cout);
    print_pi(res.pi, ch.ns(), qg.nq());
  });
  return 0;
}

// ---------------------------------------------------------------------------

struct LowerArgs {
  std::string channel, qgraph, policy;
};

int cmd_bound_lower(const Globals& g, const LowerArgs& a) {
  Report r{"bound-lower", {a.channel, a.qgraph, a.policy}};
  const auto ch = qbound::io::load_channel(a.channel);
  const auto qg = qbound::io::load_qgraph(a.qgraph, ch.ny());
  const auto u = qbound::io::policy_from_json(qbound::io::read_json(a.policy));
  const double inv_tol = g.tol.value_or(qbound::kInvarianceTol);
  const auto rep = qbound::is_bcjr_invariant(ch, qg, u, qbound::kPruneTol, inv_tol);

  json conds = json::array();
  for (const auto& c : rep.conditionals) conds.push_back(c);
  r.results["conditionals"] = conds;
  r.results["invariance_tol"] = inv_tol;
  if (!rep.invariant) {
    json witness = {{"q", rep.q ? json(*rep.q) : json(nullptr)},
                    {"y", rep.y ? json(*rep.y) : json(nullptr)},
                    {"gap", rep.gap},
                    {"note", rep.note}};
    r.results["certified"] = false;
    r.results["rate"] = nullptr;
    r.results["witness"] = witness;
    json err = {{"error", "not_certified"}, {"certified", false}, {"witness", witness}};
    std::cerr << err.dump() << '\n';
    emit(g, r, [&] {
      std::cout << "not certified: B(pi(.|q" << (rep.q ? std::to_string(*rep.q) : "?") << "), y="
                << (rep.y ? ch.y_label(*rep.y) : "?") << ") misses the target conditional by " << rep.gap << '\n';
    });
    return 3;
  }
  const auto lb = qbound::lower_bound(ch, qg, u, qbound::kPruneTol, inv_tol);
  r.results["certified"] = true;
  r.results["rate"] = number("certified-lower", lb.rate);
  emit(g, r, [&] {
    std::cout << "certified lower bound: " << fmt(lb.rate) << " bits/use\n";
    std::cout << "  conditionals pi(s|q):\n";
    for (std::size_t q = 0; q < rep.conditionals.size(); ++q) {
      std::cout << "    q" << q << ":";
      if (rep.conditionals[q].empty()) std::cout << " (outside the closed class)";
      for (double v : rep.conditionals[q]) std::cout << ' ' << fmt(v, 10);
      std::cout << '\n';
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------

struct GraphArgs {
  std::string channel, qgraph, policy;
};

int cmd_graph_info(const Globals& g, const GraphArgs& a) {
  Report r{"graph-info", {a.channel, a.qgraph}};
  const auto ch = qbound::io::load_channel(a.channel);
  const auto qg = qbound::io::load_qgraph(a.qgraph, ch.ny());
  const double tol = g.tol.value_or(qbound::kPruneTol);
  auto cg = qbound::build_coupled(ch, qg);

  json edges = json::array();
  for (std::size_t q = 0; q < qg.nq(); ++q)
    for (std::size_t y = 0; y < qg.ny(); ++y) edges.push_back({{"from", q}, {"y", y}, {"to", qg.next(q, y)}});
  r.results["qgraph"] = {{"nodes", qg.nq()}, {"edges", edges}, {"irreducible", qbound::is_irreducible(qg)}};
  r.results["channel_strongly_connected"] = qbound::is_strongly_connected(ch);
  r.results["lemma1"] = qbound::lemma1_check(cg);

  auto describe = [&](const qbound::CoupledGraph& graph) {
    json classes = json::array();
    for (const auto& c : qbound::closed_classes(graph)) {
      const auto d = qbound::period(graph, c);
      classes.push_back({{"nodes", c}, {"period", d}, {"partition", qbound::cyclic_partition(graph, c)}});
    }
    return classes;
  };
  r.results["coupled"] = {{"nodes", cg.size()}, {"edges", cg.edges.size()}, {"closed_classes", describe(cg)}};

  std::optional<qbound::Stationary> st;
  std::optional<qbound::CoupledGraph> pruned;
  if (!a.policy.empty()) {
    r.inputs.push_back(a.policy);
    const auto u = qbound::io::policy_from_json(qbound::io::read_json(a.policy));
    qbound::require_valid_policy(ch, qg.nq(), u);
    pruned = qbound::prune(cg, u, tol);
    r.results["pruned"] = {{"edges", pruned->edges.size()},
                           {"closed_classes", describe(*pruned)},
                           {"in_P_pi", qbound::in_P_pi(ch, qg, u, tol)}};
    qbound::StationaryOptions so;
    so.prune_tol = tol;
    st = qbound::stationary(ch, qg, u, so);
    r.results["stationary"] = {{"pi", st->pi}, {"class", st->cls}, {"residual", st->residual}};
  }

  emit(g, r, [&] {
    std::cout << "Q-graph " << qg.name() << ": " << qg.nq() << " nodes, " << qg.nq() * qg.ny() << " edges, "
              << (qbound::is_irreducible(qg) ? "irreducible" : "reducible") << '\n';
    for (std::size_t q = 0; q < qg.nq(); ++q) {
      std::cout << "  q" << q << ":";
      for (std::size_t y = 0; y < qg.ny(); ++y) std::cout << "  " << ch.y_label(y) << "->q" << qg.next(q, y);
      std::cout << '\n';
    }
    auto show = [&](const char* title, const qbound::CoupledGraph& graph) {
      std::cout << title << " (" << graph.edges.size() << " edges)\n";
      for (const auto& c : qbound::closed_classes(graph)) {
        std::cout << "  closed class " << node_list(c, ch.ns()) << ", period " << qbound::period(graph, c) << '\n';
        const auto parts = qbound::cyclic_partition(graph, c);
        if (parts.size() > 1)
          for (std::size_t i = 0; i < parts.size(); ++i)
            std::cout << "    A" << i << " = " << node_list(parts[i], ch.ns()) << '\n';
      }
    };
    show("coupled graph", cg);
    if (pruned) show("pruned by policy", *pruned);
    if (st) print_pi(st->pi, ch.ns(), qg.nq());
  });
  return 0;
}

// ---------------------------------------------------------------------------

struct DpArgs {
  std::string channel, out;
  std::size_t resolution = 100, steps = 200000, burn_in = 1000, max_iters = 2000;
  double span_tol = 1e-7, cluster_tol = 1e-3;
  bool nearest = false, serial = false;
};

int cmd_dp_simulate(const Globals& g, const DpArgs& a) {
  Report r{"dp-simulate", {a.channel}};
  const auto ch = qbound::io::load_channel(a.channel);
  qbound::ValueIterationOptions vo;
  vo.resolution = a.resolution;
  vo.max_iters = a.max_iters;
  vo.span_tol = a.span_tol;
  vo.interpolation = a.nearest ? qbound::Interpolation::nearest : qbound::Interpolation::barycentric;
  vo.parallel = !a.serial;
  const auto vi = qbound::value_iteration(ch, vo);

  qbound::RolloutOptions ro;
  ro.steps = a.steps;
  ro.burn_in = a.burn_in;
  ro.seed = g.seed;
  ro.cluster_tol = g.tol.value_or(a.cluster_tol);
  const auto hist = qbound::rollout(ch, vi, ro);
  if (!a.out.empty()) qbound::io::write_json(a.out, qbound::io::to_json(hist));

  r.results["rate"] = number("dp-estimate", vi.rate);
  r.results["bracket"] = {number("dp-estimate", vi.lower), number("dp-estimate", vi.upper)};
  r.results["iterations"] = vi.iterations;
  r.results["converged"] = vi.converged;
  r.results["cells"] = hist.cells.size();
  r.results["transitions"] = hist.transitions.size();
  emit(g, r, [&] {
    std::cout << "value iteration on " << ch.name() << " (resolution " << a.resolution << "): rate "
              << fmt(vi.rate) << " in [" << fmt(vi.lower) << ", " << fmt(vi.upper) << "], " << vi.iterations
              << " iterations" << (vi.converged ? "" : " (not converged)") << '\n';
    std::cout << "rollout: " << a.steps << " steps, " << hist.cells.size() << " belief cells\n";
    for (const auto& c : hist.cells) {
      std::cout << "  (";
      for (std::size_t i = 0; i < c.belief.size(); ++i) std::cout << (i ? ", " : "") << fmt(c.belief[i], 6);
      std::cout << ")  " << c.count << '\n';
    }
    if (!a.out.empty()) std::cout << "histogram written to " << a.out << '\n';
  });
  return 0;
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string hist, out, policy_out;
  double cluster_tol = 1e-3;
};

int cmd_extract(const Globals& g, const ExtractArgs& a) {
  Report r{"extract-qgraph", {a.hist}};
  const auto hist = qbound::io::histogram_from_json(qbound::io::read_json(a.hist));
  const auto ex = qbound::extract_qgraph(hist, g.tol.value_or(a.cluster_tol));
  if (!a.out.empty()) qbound::io::write_json(a.out, qbound::io::to_json(ex.graph));
  if (!a.policy_out.empty())
    qbound::io::write_json(a.policy_out, qbound::io::to_json(qbound::policy_from_extraction(ex, *hist.channel)));
  r.results["qgraph"] = qbound::io::to_json(ex.graph);
  r.results["beliefs"] = ex.beliefs;
  r.results["counts"] = ex.counts;
  r.results["completed_edges"] = ex.completed_edges;
  emit(g, r, [&] {
    std::cout << "extracted Q-graph: " << ex.graph.nq() << " nodes (" << ex.completed_edges
              << " edges completed by the belief update)\n";
    for (std::size_t q = 0; q < ex.graph.nq(); ++q) {
      std::cout << "  q" << q << " belief (";
      for (std::size_t i = 0; i < ex.beliefs[q].size(); ++i) std::cout << (i ? ", " : "") << fmt(ex.beliefs[q][i], 6);
      std::cout << "):";
      for (std::size_t y = 0; y < ex.graph.ny(); ++y) std::cout << "  y" << y << "->q" << ex.graph.next(q, y);
      std::cout << '\n';
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string family, param = "eps", qgraph, out;
  double from = 0.0, to = 0.9, step = 0.1;
  std::size_t restarts = 8;
  bool no_oracle = false, dec3_ties = false;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  const auto fam = qbound::parse_family(a.family);
  const std::string expected = fam == qbound::ChannelFamily::trapdoor ? "p" : "eps";
  if (a.param != expected)
    throw qbound::Error(qbound::ErrorCode::invalid_argument,
                        "family " + a.family + " is parameterized by --param " + expected);
  Report r{"sweep", {a.qgraph}};
  const auto probe = qbound::make_family_channel(fam, fam == qbound::ChannelFamily::trapdoor ? 0.5 : 0.0);
  const auto qg = qbound::io::load_qgraph(a.qgraph, probe.ny());
  qbound::UpperOptions opts;
  opts.restarts = a.restarts;
  opts.seed = g.seed;
  if (a.dec3_ties) opts.ties = qbound::dec3_symmetry_ties();
  const auto rows = qbound::sweep(fam, qg, qbound::param_grid(a.from, a.to, a.step), opts, !a.no_oracle);
  const auto csv = qbound::sweep_csv(rows, !a.no_oracle);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw qbound::Error(qbound::ErrorCode::io, "cannot write " + a.out);
    out << csv;
  }
  json jr = json::array();
  for (const auto& row : rows) {
    json e = {{"param", row.param}, {"ok", row.ok}};
    if (row.ok) {
      e["upper_bound"] = number("upper-bound", row.upper);
      if (!a.no_oracle) e["oracle"] = number("oracle", row.oracle);
    } else {
      e["error"] = row.error;
    }
    jr.push_back(e);
  }
  r.results["rows"] = jr;
  emit(g, r, [&] {
    if (a.out.empty())
      std::cout << csv;
    else
      std::cout << rows.size() << " rows written to " << a.out << '\n';
  });
  return 0;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string family;
  std::optional<double> eps, p;
};

int cmd_oracles(const Globals& g, const OracleArgs& a) {
  Report r{"oracles", {}};
  const auto fam = qbound::parse_family(a.family);
  std::vector<std::pair<std::string, double>> lines;
  if (fam == qbound::ChannelFamily::trapdoor) {
    const double p = a.p.value_or(0.5);
    const auto up = qbound::oracle_trapdoor_upper(p);
    r.results["p"] = p;
    r.results["trapdoor_upper"] = number("oracle", up.value);
    r.results["trapdoor_upper_argmax"] = up.argmax;
    r.results["trapdoor_lower"] = number("oracle", qbound::oracle_trapdoor_lower());
    lines = {{"trapdoor upper bound (p=" + fmt(p, 4) + ")", up.value},
             {"trapdoor lower bound", qbound::oracle_trapdoor_lower()}};
  } else {
    if (!a.eps) throw qbound::Error(qbound::ErrorCode::invalid_argument, "--eps is required for " + a.family);
    const double v = qbound::family_oracle(fam, *a.eps);
    r.results["eps"] = *a.eps;
    r.results["oracle"] = number("oracle", v);
    lines = {{std::string(qbound::family_name(fam)) + " feedback capacity (eps=" + fmt(*a.eps, 4) + ")", v}};
  }
  emit(g, r, [&] {
    for (const auto& [label, v] : lines) std::cout << label << ": " << fmt(v, 10) << '\n';
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upper and lower bounds on the feedback capacity of unifilar finite-state channels"};
  app.set_version_flag("--version", std::string("qbound ") + QBOUND_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  double tol = 0.0;
  app.add_flag("--json", g.json_out, "Print a JSON report instead of tables");
  app.add_option("--seed", g.seed, "Seed for every stochastic step")->capture_default_str();
  auto* tol_opt = app.add_option("--tol", tol,
                                 "Numerical tolerance: pruning (graph-info), invariance (bound-lower), "
                                 "clustering (dp-simulate, extract-qgraph)");

  UpperArgs up;
  auto* c_up = app.add_subcommand("bound-upper", "Maximize I(X,S;Y|Q) over input policies");
  c_up->add_option("--channel", up.channel, "Channel JSON or builtin:NAME:PARAM")->required();
  c_up->add_option("--qgraph", up.qgraph, "Q-graph JSON or builtin:NAME")->required();
  c_up->add_option("--restarts", up.restarts)->capture_default_str();
  c_up->add_option("--max-evals", up.max_evals)->capture_default_str();
  c_up->add_option("--grid-step", up.grid_step, "Lattice spacing of the grid pass (0 disables)")->capture_default_str();
  c_up->add_option("--anchor-state", up.anchor_state);
  c_up->add_option("--anchor-context", up.anchor_context);
  c_up->add_flag("--tie-dec3", up.dec3_ties, "Apply the DEC mirror tying to the dec3 graph");
  c_up->add_flag("--no-boundary", up.no_boundary, "Skip the boundary probe");
  c_up->add_option("--policy-out", up.policy_out, "Write the maximizing policy");

  LowerArgs lo;
  auto* c_lo = app.add_subcommand("bound-lower", "Certify I(X,S;Y|Q) of a BCJR-invariant policy");
  c_lo->add_option("--channel", lo.channel)->required();
  c_lo->add_option("--qgraph", lo.qgraph)->required();
  c_lo->add_option("--policy", lo.policy)->required()->check(CLI::ExistingFile);

  GraphArgs gi;
  auto* c_gi = app.add_subcommand("graph-info", "Classes, period and cyclic partition of the coupled graph");
  c_gi->add_option("--channel", gi.channel)->required();
  c_gi->add_option("--qgraph", gi.qgraph)->required();
  c_gi->add_option("--policy", gi.policy)->check(CLI::ExistingFile);

  DpArgs dp;
  auto* c_dp = app.add_subcommand("dp-simulate", "Value iteration on the belief simplex and a greedy rollout");
  c_dp->add_option("--channel", dp.channel)->required();
  c_dp->add_option("--resolution", dp.resolution)->capture_default_str();
  c_dp->add_option("--steps", dp.steps)->capture_default_str();
  c_dp->add_option("--burn-in", dp.burn_in)->capture_default_str();
  c_dp->add_option("--max-iters", dp.max_iters)->capture_default_str();
  c_dp->add_option("--span-tol", dp.span_tol)->capture_default_str();
  c_dp->add_option("--cluster-tol", dp.cluster_tol)->capture_default_str();
  c_dp->add_flag("--nearest", dp.nearest, "Nearest-node lookup instead of barycentric interpolation");
  c_dp->add_flag("--serial", dp.serial, "Use the serial sweep");
  c_dp->add_option("--out", dp.out, "Histogram JSON");

  ExtractArgs ex;
  auto* c_ex = app.add_subcommand("extract-qgraph", "Read a Q-graph off a rollout histogram");
  c_ex->add_option("--hist", ex.hist)->required()->check(CLI::ExistingFile);
  c_ex->add_option("--cluster-tol", ex.cluster_tol)->capture_default_str();
  c_ex->add_option("--out", ex.out, "Q-graph JSON");
  c_ex->add_option("--policy-out", ex.policy_out, "Policy JSON taking each node's action");

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "Upper bound across a channel family parameter");
  c_sw->add_option("--family", sw.family, "trapdoor | dec | bec")->required();
  c_sw->add_option("--param", sw.param, "eps (dec, bec) or p (trapdoor)")->capture_default_str();
  c_sw->add_option("--from", sw.from)->capture_default_str();
  c_sw->add_option("--to", sw.to)->capture_default_str();
  c_sw->add_option("--step", sw.step)->capture_default_str();
  c_sw->add_option("--qgraph", sw.qgraph)->required();
  c_sw->add_option("--restarts", sw.restarts)->capture_default_str();
  c_sw->add_flag("--tie-dec3", sw.dec3_ties);
  c_sw->add_flag("--no-oracle", sw.no_oracle);
  c_sw->add_option("--out", sw.out, "CSV path (stdout if omitted)");

  OracleArgs orc;
  auto* c_or = app.add_subcommand("oracles", "Closed-form reference values");
  c_or->add_option("--channel-family", orc.family, "trapdoor | dec | bec")->required();
  c_or->add_option("--eps", orc.eps);
  c_or->add_option("--p", orc.p);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (tol_opt->count() > 0) g.tol = tol;

  try {
    if (c_up->parsed()) return cmd_bound_upper(g, up);
    if (c_lo->parsed()) return cmd_bound_lower(g, lo);
    if (c_gi->parsed()) return cmd_graph_info(g, gi);
    if (c_dp->parsed()) return cmd_dp_simulate(g, dp);
    if (c_ex->parsed()) return cmd_extract(g, ex);
    if (c_sw->parsed()) return cmd_sweep(g, sw);
    if (c_or->parsed()) return cmd_oracles(g, orc);
  } catch (const qbound::Error& e) {
    std::cerr << json{{"error", qbound::to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 1;
}
