#pragma once

// Text format for directed graphs:
//
//   # comment
//   n=<count>          optional; otherwise node count = max id + 1
//   <src>\t<dst>       one link per line, 0-based ids
//   dangling:<id>      optional explicit marker for a node without links
//
// Any run of spaces or tabs separates the two ids.

#include <filesystem>
#include <iosfwd>

#include "robustrank/graph_matrix.hpp"

namespace robustrank {

// Throws InputError with the offending line number on malformed input.
EdgeList parse_edge_list(std::istream& in);

// Throws InputError if the file cannot be opened or parsed.
EdgeList read_edge_list(const std::filesystem::path& path);

// Writes the `n=` header, the links in order, then dangling directives.
void write_edge_list(std::ostream& out, const EdgeList& list);

}  // namespace robustrank
