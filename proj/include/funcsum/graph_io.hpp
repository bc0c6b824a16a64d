#pragma once

#include <string_view>

#include "funcsum/call_graph.hpp"

namespace funcsum::fcg {

enum class GraphFormat { Json, Dot };

// Parses a call-graph document.
//
// JSON: {"vertices": [string], "edges": [[string,string]], "entries": [string]?}
// DOT:  digraph [name] { a -> b; c; entry="main"; }  -- attribute lists in
//       [] are ignored, edge chains a -> b -> c are accepted, vertices are
//       declared implicitly by appearance.
//
// Parallel edges collapse to one. When the document declares no entries,
// they default to the in-degree-0 vertices (ascending), and failing that
// to the single lexicographically smallest vertex.
//
// Throws ParseError for malformed documents (with line/position) and
// ValidationError for dangling edge endpoints or unknown entry ids.
CallGraph parse_call_graph(std::string_view input, GraphFormat format);

// Picks Json when the first non-space byte is '{', Dot otherwise.
GraphFormat sniff_graph_format(std::string_view input);

}  // namespace funcsum::fcg
