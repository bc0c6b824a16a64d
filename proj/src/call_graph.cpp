#include "funcsum/call_graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "funcsum/errors.hpp"

namespace funcsum::fcg {

namespace {

using Adjacency = std::map<FunctionId, std::vector<FunctionId>>;

// Successor lists in ascending callee order; the tie-break order for every
// traversal below.
Adjacency build_adjacency(const CallGraph& g) {
  Adjacency adj;
  for (const auto& v : g.vertices) adj[v];
  for (const auto& [from, to] : g.edges) adj[from].push_back(to);
  return adj;  // std::set iteration already yields sorted neighbors
}

}  // namespace

void validate(const CallGraph& g) {
  for (const auto& [from, to] : g.edges) {
    if (!g.has_vertex(from)) throw ValidationError("edge endpoint not declared: " + from);
    if (!g.has_vertex(to)) throw ValidationError("edge endpoint not declared: " + to);
  }
  for (const auto& e : g.entries) {
    if (!g.has_vertex(e)) throw ValidationError("entry vertex not declared: " + e);
  }
}

SccDecomposition tarjan_scc(const CallGraph& g) {
  const Adjacency adj = build_adjacency(g);

  struct VertexState {
    int index = -1;
    int lowlink = -1;
    bool on_stack = false;
  };
  std::map<FunctionId, VertexState> state;
  std::vector<FunctionId> stack;
  std::vector<std::vector<FunctionId>> raw_components;
  int next_index = 0;

  // Iterative Tarjan; the explicit frame stack keeps deep call chains from
  // exhausting the native stack.
  struct Frame {
    FunctionId vertex;
    std::size_t next_child = 0;
  };

  for (const auto& root : g.vertices) {
    if (state[root].index != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    while (!frames.empty()) {
      Frame& frame = frames.back();
      VertexState& vs = state[frame.vertex];
      if (frame.next_child == 0) {
        vs.index = vs.lowlink = next_index++;
        vs.on_stack = true;
        stack.push_back(frame.vertex);
      }
      const auto& children = adj.at(frame.vertex);
      bool descended = false;
      while (frame.next_child < children.size()) {
        const FunctionId& child = children[frame.next_child++];
        VertexState& cs = state[child];
        if (cs.index == -1) {
          frames.push_back({child, 0});
          descended = true;
          break;
        }
        if (cs.on_stack) vs.lowlink = std::min(vs.lowlink, cs.index);
      }
      if (descended) continue;

      if (vs.lowlink == vs.index) {
        std::vector<FunctionId> component;
        while (true) {
          FunctionId member = stack.back();
          stack.pop_back();
          state[member].on_stack = false;
          component.push_back(member);
          if (member == frame.vertex) break;
        }
        raw_components.push_back(std::move(component));
      }
      FunctionId finished = frame.vertex;
      frames.pop_back();
      if (!frames.empty()) {
        VertexState& ps = state[frames.back().vertex];
        ps.lowlink = std::min(ps.lowlink, state[finished].lowlink);
      }
    }
  }

  // Renumber by smallest member so component ids are stable across runs
  // regardless of visit order.
  for (auto& members : raw_components) std::sort(members.begin(), members.end());
  std::sort(raw_components.begin(), raw_components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  SccDecomposition scc;
  for (SccId id = 0; id < static_cast<SccId>(raw_components.size()); ++id) {
    for (const auto& member : raw_components[id]) scc.component_of[member] = id;
    scc.components[id] = std::move(raw_components[id]);
  }
  for (const auto& [from, to] : g.edges) {
    SccId a = scc.component_of.at(from);
    SccId b = scc.component_of.at(to);
    if (a != b) scc.condensed_edges.insert({a, b});
  }
  return scc;
}

DistanceMap dijkstra(const CallGraph& g) {
  const Adjacency adj = build_adjacency(g);
  DistanceMap result;
  // (dist, id) ordering makes the extraction order deterministic; with unit
  // weights this settles each vertex at its BFS level.
  std::set<std::pair<std::uint32_t, FunctionId>> frontier;
  for (const auto& entry : g.entries) {
    if (result.dist.emplace(entry, 0).second) frontier.insert({0, entry});
  }
  while (!frontier.empty()) {
    auto [d, v] = *frontier.begin();
    frontier.erase(frontier.begin());
    for (const auto& next : adj.at(v)) {
      auto it = result.dist.find(next);
      if (it == result.dist.end()) {
        result.dist.emplace(next, d + 1);
        frontier.insert({d + 1, next});
      } else if (d + 1 < it->second) {
        frontier.erase({it->second, next});
        it->second = d + 1;
        frontier.insert({d + 1, next});
      }
    }
  }
  return result;
}

std::vector<SccId> reverse_topsort(const SccDecomposition& scc) {
  // Kahn over outgoing condensed edges: components with no remaining
  // callees emit first, so every callee component precedes its callers.
  std::map<SccId, int> pending_callees;
  std::map<SccId, std::vector<SccId>> callers_of;
  for (const auto& [id, members] : scc.components) pending_callees[id] = 0;
  for (const auto& [caller, callee] : scc.condensed_edges) {
    ++pending_callees[caller];
    callers_of[callee].push_back(caller);
  }

  std::set<SccId> ready;
  for (const auto& [id, n] : pending_callees) {
    if (n == 0) ready.insert(id);
  }
  std::vector<SccId> order;
  order.reserve(scc.components.size());
  while (!ready.empty()) {
    SccId id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    auto it = callers_of.find(id);
    if (it == callers_of.end()) continue;
    for (SccId caller : it->second) {
      if (--pending_callees[caller] == 0) ready.insert(caller);
    }
  }
  if (order.size() != scc.components.size())
    throw ValidationError("condensed graph contains a cycle");  // unreachable by construction
  return order;
}

ProcessingList resort(const CallGraph& g) {
  const SccDecomposition scc = tarjan_scc(g);
  const std::vector<SccId> component_order = reverse_topsort(scc);
  const DistanceMap dist = dijkstra(g);
  const Adjacency adj = build_adjacency(g);

  constexpr std::uint64_t kUnreachable = std::numeric_limits<std::uint64_t>::max();
  auto rank = [&](const FunctionId& id) -> std::uint64_t {
    auto d = dist.at(id);
    return d ? *d : kUnreachable;
  };

  ProcessingList list;
  list.order.reserve(g.vertices.size());
  for (SccId cid : component_order) {
    const auto& members = scc.components.at(cid);
    std::set<FunctionId> remaining(members.begin(), members.end());
    while (!remaining.empty()) {
      // Seed: closest member to the entry set, smallest id on ties.
      FunctionId seed = *remaining.begin();
      for (const auto& m : remaining) {
        if (rank(m) < rank(seed)) seed = m;
      }
      // Pre-order DFS restricted to this component, smallest callee first.
      // remaining doubles as the visited filter: members of other
      // components were never in it, so the walk stays inside.
      struct Frame {
        FunctionId vertex;
        std::size_t next_child = 0;
      };
      remaining.erase(seed);
      list.order.push_back(seed);
      std::vector<Frame> frames{{seed, 0}};
      while (!frames.empty()) {
        Frame& frame = frames.back();
        const auto& children = adj.at(frame.vertex);
        bool descended = false;
        while (frame.next_child < children.size()) {
          const FunctionId& child = children[frame.next_child++];
          if (child == frame.vertex) continue;  // self-loop
          if (remaining.erase(child) > 0) {
            list.order.push_back(child);
            frames.push_back({child, 0});
            descended = true;
            break;
          }
        }
        if (!descended) frames.pop_back();
      }
    }
  }
  return list;
}

}  // namespace funcsum::fcg
