#include "qbound/digraph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "qbound/error.hpp"

namespace qbound::digraph {

namespace {

// Iterative Tarjan; recursion depth would otherwise grow with |S|*|Q|.
class Tarjan {
 public:
  explicit Tarjan(const Adjacency& g)
      : g_(g), index_(g.size(), kUnvisited), low_(g.size(), 0), on_stack_(g.size(), false) {}

  std::vector<std::vector<std::size_t>> run() {
    for (std::size_t v = 0; v < g_.size(); ++v)
      if (index_[v] == kUnvisited) visit(v);
    for (auto& c : comps_) std::sort(c.begin(), c.end());
    std::sort(comps_.begin(), comps_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return std::move(comps_);
  }

 private:
  static constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

  void visit(std::size_t root) {
    std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
    open(root);
    while (!frames.empty()) {
      auto& [v, next_edge] = frames.back();
      if (next_edge < g_[v].size()) {
        std::size_t w = g_[v][next_edge++];
        if (index_[w] == kUnvisited) {
          open(w);
          frames.emplace_back(w, 0);
        } else if (on_stack_[w]) {
          low_[v] = std::min(low_[v], index_[w]);
        }
        continue;
      }
      if (low_[v] == index_[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack_.back();
          stack_.pop_back();
          on_stack_[w] = false;
          comp.push_back(w);
        } while (w != v);
        comps_.push_back(std::move(comp));
      }
      std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low_[frames.back().first] = std::min(low_[frames.back().first], low_[done]);
    }
  }

  void open(std::size_t v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = true;
  }

  const Adjacency& g_;
  std::vector<std::size_t> index_, low_;
  std::vector<bool> on_stack_;
  std::vector<std::size_t> stack_;
  std::size_t counter_ = 0;
  std::vector<std::vector<std::size_t>> comps_;
};

std::vector<long> bfs_levels(const Adjacency& graph, const std::vector<bool>& in_class,
                             std::size_t root) {
  std::vector<long> level(graph.size(), -1);
  std::queue<std::size_t> frontier;
  level[root] = 0;
  frontier.push(root);
  while (!frontier.empty()) {
    std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : graph[u]) {
      if (!in_class[v] || level[v] >= 0) continue;
      level[v] = level[u] + 1;
      frontier.push(v);
    }
  }
  return level;
}

std::vector<bool> membership(std::size_t n, const std::vector<std::size_t>& cls) {
  std::vector<bool> in(n, false);
  for (std::size_t v : cls) in.at(v) = true;
  return in;
}

}  // namespace

std::vector<std::vector<std::size_t>> strongly_connected_components(const Adjacency& graph) {
  return Tarjan(graph).run();
}

std::vector<std::vector<std::size_t>> closed_classes(const Adjacency& graph) {
  auto comps = strongly_connected_components(graph);
  std::vector<std::size_t> comp_of(graph.size());
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t v : comps[c]) comp_of[v] = c;
  std::vector<std::vector<std::size_t>> closed;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    bool leaves = false;
    for (std::size_t v : comps[c])
      for (std::size_t w : graph[v]) leaves = leaves || comp_of[w] != c;
    if (!leaves) closed.push_back(comps[c]);
  }
  return closed;
}

bool is_strongly_connected(const Adjacency& graph) {
  return graph.empty() || strongly_connected_components(graph).size() == 1;
}

std::vector<bool> reachable_from(const Adjacency& graph, std::size_t start) {
  std::vector<bool> seen(graph.size(), false);
  std::vector<std::size_t> todo{start};
  seen.at(start) = true;
  while (!todo.empty()) {
    std::size_t u = todo.back();
    todo.pop_back();
    for (std::size_t v : graph[u])
      if (!seen[v]) {
        seen[v] = true;
        todo.push_back(v);
      }
  }
  return seen;
}

std::size_t period(const Adjacency& graph, const std::vector<std::size_t>& cls) {
  if (cls.empty()) throw Error(ErrorCode::invalid_argument, "period: empty class");
  auto in = membership(graph.size(), cls);
  auto level = bfs_levels(graph, in, cls.front());
  Adjacency reverse(graph.size());
  for (std::size_t u : cls)
    for (std::size_t v : graph[u])
      if (in[v]) reverse[v].push_back(u);
  auto back = bfs_levels(reverse, in, cls.front());
  for (std::size_t u : cls)
    if (back[u] < 0)
      throw Error(ErrorCode::invalid_argument, "period: class is not strongly connected");
  long d = 0;
  for (std::size_t u : cls) {
    if (level[u] < 0)
      throw Error(ErrorCode::invalid_argument, "period: class is not strongly connected");
    for (std::size_t v : graph[u]) {
      if (!in[v]) throw Error(ErrorCode::invalid_argument, "period: class is not closed");
      d = std::gcd(d, std::abs(level[u] + 1 - level[v]));
    }
  }
  // An isolated sink node has no edges at all and therefore no cycle.
  if (d == 0) throw Error(ErrorCode::invalid_argument, "period: class has no cycle");
  return static_cast<std::size_t>(d);
}

std::vector<std::vector<std::size_t>> cyclic_partition(const Adjacency& graph,
                                                       const std::vector<std::size_t>& cls) {
  std::size_t d = period(graph, cls);
  auto in = membership(graph.size(), cls);
  auto level = bfs_levels(graph, in, cls.front());
  std::vector<std::vector<std::size_t>> parts(d);
  for (std::size_t v : cls) parts[static_cast<std::size_t>(level[v]) % d].push_back(v);
  return parts;
}

}  // namespace qbound::digraph
