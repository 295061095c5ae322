#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "qbound/dp.hpp"
#include "qbound/error.hpp"

namespace qbound {
namespace {

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct Cluster {
  std::vector<double> centroid;
  std::size_t count = 0;
  std::vector<std::size_t> members;
};

void absorb(Cluster& into, const Cluster& from) {
  const double wa = static_cast<double>(into.count), wb = static_cast<double>(from.count);
  for (std::size_t i = 0; i < into.centroid.size(); ++i)
    into.centroid[i] = (wa * into.centroid[i] + wb * from.centroid[i]) / (wa + wb);
  into.count += from.count;
  into.members.insert(into.members.end(), from.members.begin(), from.members.end());
}

std::vector<Cluster> cluster_cells(const VisitHistogram& hist, double tol) {
  std::vector<std::size_t> order(hist.cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return hist.cells[a].count > hist.cells[b].count; });

  // Leader pass keeps the pairwise stage small.
  std::vector<Cluster> out;
  for (std::size_t c : order) {
    const auto& cell = hist.cells[c];
    if (cell.count == 0) continue;
    Cluster single{cell.belief, cell.count, {c}};
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Cluster& k) { return sup_distance(k.centroid, cell.belief) <= tol; });
    if (it == out.end())
      out.push_back(std::move(single));
    else
      absorb(*it, single);
  }

  // Centroid linkage until no two centroids are within tol.
  while (out.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        const double d = sup_distance(out[i].centroid, out[j].centroid);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    if (best > tol) break;
    absorb(out[bi], out[bj]);
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return out;
}

std::vector<double> uniform_action(const UnifilarChannel& ch) {
  std::vector<double> a(ch.ns() * ch.nx(), 0.0);
  for (std::size_t s = 0; s < ch.ns(); ++s) {
    std::size_t k = 0;
    for (std::size_t x = 0; x < ch.nx(); ++x) k += ch.allowed(x, s) ? 1 : 0;
    for (std::size_t x = 0; x < ch.nx(); ++x)
      if (ch.allowed(x, s)) a[s * ch.nx() + x] = 1.0 / static_cast<double>(k);
  }
  return a;
}

}  // namespace

ExtractedGraph extract_qgraph(const VisitHistogram& hist, double cluster_tol) {
  if (!hist.channel) throw Error(ErrorCode::invalid_argument, "histogram carries no channel");
  if (!(cluster_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "cluster tolerance must be positive");
  const UnifilarChannel& ch = *hist.channel;
  auto clusters = cluster_cells(hist, cluster_tol);
  if (clusters.empty()) throw Error(ErrorCode::extraction_failed, "histogram has no visited cells");

  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.centroid < b.centroid;
  });

  const std::size_t nq = clusters.size(), ny = ch.ny();
  std::vector<std::size_t> node_of(hist.cells.size(), nq);
  ExtractedGraph ex{QGraph(1, ny, std::vector<std::size_t>(ny, 0)), {}, {}, {}, 0};
  for (std::size_t q = 0; q < nq; ++q) {
    std::size_t lead = clusters[q].members.front();
    for (std::size_t c : clusters[q].members) {
      node_of[c] = q;
      if (hist.cells[c].count > hist.cells[lead].count) lead = c;
    }
    ex.beliefs.push_back(clusters[q].centroid);
    ex.actions.push_back(hist.cells[lead].action.empty() ? uniform_action(ch) : hist.cells[lead].action);
    ex.counts.push_back(clusters[q].count);
  }

  std::vector<std::map<std::size_t, std::size_t>> votes(nq * ny);
  for (const auto& t : hist.transitions) {
    if (t.from >= node_of.size() || t.to >= node_of.size() || t.y >= ny)
      throw Error(ErrorCode::invalid_argument, "transition refers to an unknown cell");
    const std::size_t a = node_of[t.from], b = node_of[t.to];
    if (a == nq || b == nq) continue;
    votes[a * ny + t.y][b] += t.count;
  }

  auto nearest_node = [&](std::span<const double> b) {
    std::size_t best = 0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < nq; ++q) {
      const double e = sup_distance(ex.beliefs[q], b);
      if (e < d) {
        d = e;
        best = q;
      }
    }
    return std::pair{best, d};
  };

  constexpr double kEta = 1e-6;
  const double snap = 10.0 * cluster_tol;
  const auto flat = uniform_action(ch);
  const std::vector<double> flat_z(ch.ns(), 1.0 / static_cast<double>(ch.ns()));
  std::vector<std::size_t> table(nq * ny, 0);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t y = 0; y < ny; ++y) {
      const auto& v = votes[q * ny + y];
      if (!v.empty()) {
        auto it = std::max_element(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        table[q * ny + y] = it->first;
        continue;
      }
      ++ex.completed_edges;
      const auto& z = ex.beliefs[q];
      const auto& a = ex.actions[q];
      if (output_probability(ch, z, a, y) > 1e-12) {
        auto [to, d] = nearest_node(bcjr_update(ch, z, a, y));
        if (d > snap)
          throw Error(ErrorCode::extraction_failed, "image of node " + std::to_string(q) + " under y=" +
                                                        std::to_string(y) + " is " + std::to_string(d) +
                                                        " from every node");
        table[q * ny + y] = to;
      } else {
        // Output never produced here; any target is consistent, take the perturbed image.
        std::vector<double> zp(z.size()), ap(a.size());
        for (std::size_t i = 0; i < z.size(); ++i) zp[i] = (1 - kEta) * z[i] + kEta * flat_z[i];
        for (std::size_t i = 0; i < a.size(); ++i) ap[i] = (1 - kEta) * a[i] + kEta * flat[i];
        if (output_probability(ch, zp, ap, y) > 0.0)
          table[q * ny + y] = nearest_node(bcjr_update(ch, zp, ap, y)).first;
        else
          table[q * ny + y] = q;
      }
    }
  ex.graph = QGraph(nq, ny, std::move(table), "extracted");
  return ex;
}

InputPolicy policy_from_extraction(const ExtractedGraph& ex, const UnifilarChannel& ch) {
  const std::size_t nq = ex.graph.nq();
  InputPolicy u(ch.nx(), ch.ns(), nq);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t s = 0; s < ch.ns(); ++s)
      for (std::size_t x = 0; x < ch.nx(); ++x) u(x, s, q) = ex.actions[q][s * ch.nx() + x];
  require_valid_policy(ch, nq, u);
  return u;
}

}  // namespace qbound
