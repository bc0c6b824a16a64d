#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace funcsum::fcg {

using FunctionId = std::string;
using SccId = int;

// Directed caller->callee graph over function ids. Parallel calls collapse
// to one edge at parse time; self-loops (recursion) are allowed.
struct CallGraph {
  std::set<FunctionId> vertices;
  std::set<std::pair<FunctionId, FunctionId>> edges;  // (caller, callee)
  std::vector<FunctionId> entries;                    // designated roots, e.g. main

  bool has_vertex(const FunctionId& id) const { return vertices.count(id) > 0; }
};

// Throws ValidationError unless every edge endpoint and entry is a vertex.
void validate(const CallGraph& g);

// Strongly-connected components plus the acyclic condensation.
// Components are numbered 0..k-1 ordered by their smallest member id, so
// SccId comparisons double as the deterministic tie-break everywhere.
struct SccDecomposition {
  std::map<FunctionId, SccId> component_of;
  std::map<SccId, std::vector<FunctionId>> components;  // members sorted ascending
  std::set<std::pair<SccId, SccId>> condensed_edges;    // (caller scc, callee scc), no self edges
};

SccDecomposition tarjan_scc(const CallGraph& g);

// Unit-weight shortest distance from the entry set. Vertices no entry can
// reach are absent from the map.
struct DistanceMap {
  std::map<FunctionId, std::uint32_t> dist;

  std::optional<std::uint32_t> at(const FunctionId& id) const {
    auto it = dist.find(id);
    if (it == dist.end()) return std::nullopt;
    return it->second;
  }
};

DistanceMap dijkstra(const CallGraph& g);

// Condensed components ordered callee-first: for every condensed edge
// (A, B), B precedes A. Ties broken by ascending SccId.
std::vector<SccId> reverse_topsort(const SccDecomposition& scc);

// Total processing order over the graph's functions, callees before
// callers across components.
struct ProcessingList {
  std::vector<FunctionId> order;
};

// Callee-first function ordering: condensation in reverse topological
// order; within each component, pre-order DFS from the member closest to
// the entry set (unreachable treated as infinitely far, ties by smallest
// id), re-seeding by the same rule until the component is exhausted.
// Deterministic for a given graph.
ProcessingList resort(const CallGraph& g);

}  // namespace funcsum::fcg
