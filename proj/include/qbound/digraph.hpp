#pragma once

#include <cstddef>
#include <vector>

namespace qbound::digraph {

/// Adjacency lists; parallel edges are allowed and harmless.
using Adjacency = std::vector<std::vector<std::size_t>>;

/// Strongly connected components (Tarjan), each sorted ascending,
/// components ordered by their smallest node.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Adjacency& graph);

/// Components with no edge leaving them.
std::vector<std::vector<std::size_t>> closed_classes(const Adjacency& graph);

bool is_strongly_connected(const Adjacency& graph);

/// Nodes reachable from `start` (including itself), as a membership mask.
std::vector<bool> reachable_from(const Adjacency& graph, std::size_t start);

/// Period of a closed communicating class: gcd over in-class edges u->v of
/// level(u) + 1 - level(v), with BFS levels from the class's first node.
/// Throws Error(invalid_argument) if `cls` is empty or not closed and strongly connected.
std::size_t period(const Adjacency& graph, const std::vector<std::size_t>& cls);

/// Cyclic classes A_0..A_{D-1}: every edge from A_i lands in A_{(i+1) mod D}.
/// A_0 holds the class's first node.
std::vector<std::vector<std::size_t>> cyclic_partition(const Adjacency& graph,
                                                       const std::vector<std::size_t>& cls);

}  // namespace qbound::digraph
