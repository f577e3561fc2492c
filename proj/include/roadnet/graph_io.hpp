#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "roadnet/detect.hpp"
#include "roadnet/graph.hpp"

namespace roadnet {

/// Graph JSON: {"vertices": [[x, y], ...], "edges": [[i, j], ...]} with
/// 0-based indices written as i < j. The text layout is fixed (one vertex or
/// edge per line) so equal graphs serialize to identical bytes.
std::string graph_to_json(const PlanarGraph& g);

/// Throws ParseError with line/offset for malformed JSON and with the
/// offending index for dangling or self-referencing edges.
PlanarGraph graph_from_json(std::string_view text);

void write_graph(const std::filesystem::path& path, const PlanarGraph& g);
PlanarGraph read_graph(const std::filesystem::path& path);

/// CityScale-style adjacency text: one vertex per line,
///   x y [nx ny]...
/// separated by whitespace and/or commas; '#' starts a comment. Vertices are
/// identified by their coordinates; a neighbor never listed on its own line
/// is still added as a vertex. Vertex order is first appearance.
PlanarGraph graph_from_cityscale_text(std::string_view text);
PlanarGraph read_cityscale_graph(const std::filesystem::path& path);

/// Candidate list: {"candidates": [{"x": .., "y": .., "score": .., "source": ..}, ...]}.
std::string candidates_to_json(const std::vector<Candidate>& cands);
/// Throws ParseError for malformed documents.
std::vector<Candidate> candidates_from_json(std::string_view text);

/// Reads a whole file; throws Error if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace roadnet
