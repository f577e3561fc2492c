#include "roadnet/graph_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "roadnet/error.hpp"

namespace roadnet {

using nlohmann::json;

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte; ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

std::string number(double v) { return json(v).dump(); }

}  // namespace

std::string graph_to_json(const PlanarGraph& g) {
  std::ostringstream os;
  os << "{\n  \"vertices\": [";
  const auto& vs = g.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    os << (i ? ",\n    " : "\n    ") << '[' << number(vs[i].x) << ", " << number(vs[i].y) << ']';
  }
  os << (vs.empty() ? "],\n" : "\n  ],\n");
  os << "  \"edges\": [";
  const auto& es = g.edges();
  for (std::size_t i = 0; i < es.size(); ++i) {
    os << (i ? ",\n    " : "\n    ") << '[' << es[i].a << ", " << es[i].b << ']';
  }
  os << (es.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

PlanarGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(std::string("malformed graph JSON: ") + e.what(), line_of(text, byte), byte);
  }
  if (!doc.is_object()) throw ParseError("graph JSON must be an object");
  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw ParseError("graph JSON needs a \"vertices\" array");

  GraphBuilder b;
  const auto& verts = doc["vertices"];
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const auto& v = verts[i];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ParseError("vertex " + std::to_string(i) + " must be [x, y]");
    b.add_vertex({v[0].get<double>(), v[1].get<double>()});
  }

  if (doc.contains("edges")) {
    const auto& edges = doc["edges"];
    if (!edges.is_array()) throw ParseError("\"edges\" must be an array");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ParseError("edge " + std::to_string(k) + " must be [i, j] with integer indices");
      const auto i = e[0].get<std::int64_t>();
      const auto j = e[1].get<std::int64_t>();
      for (auto idx : {i, j}) {
        if (idx < 0 || static_cast<std::uint64_t>(idx) >= b.vertex_count()) {
          throw ParseError("edge " + std::to_string(k) + " references vertex index " + std::to_string(idx) +
                           " but the graph has " + std::to_string(b.vertex_count()) + " vertices");
        }
      }
      if (i == j) throw ParseError("edge " + std::to_string(k) + " is a self loop at vertex index " + std::to_string(i));
      b.add_edge(static_cast<VertexId>(i), static_cast<VertexId>(j));
    }
  }
  return b.build();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing " + path.string());
}

void write_graph(const std::filesystem::path& path, const PlanarGraph& g) {
  write_text_file(path, graph_to_json(g));
}

PlanarGraph read_graph(const std::filesystem::path& path) {
  try {
    return graph_from_json(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

PlanarGraph graph_from_cityscale_text(std::string_view text) {
  GraphBuilder b;
  std::map<std::pair<double, double>, VertexId> ids;
  auto vertex_for = [&](Vec2 p) {
    auto [it, inserted] = ids.try_emplace({p.x, p.y}, 0);
    if (inserted) it->second = b.add_vertex(p);
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    ++line_no;
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const char c = line[pos];
      if (c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '(' || c == ')' || c == ':') {
        ++pos;
        continue;
      }
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != ',' &&
             line[end] != '\r' && line[end] != '(' && line[end] != ')' && line[end] != ':')
        ++end;
      double v = 0.0;
      const auto token = line.substr(pos, end - pos);
      const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
        throw ParseError("invalid coordinate '" + std::string(token) + "'", line_no, line_start + pos);
      }
      values.push_back(v);
      pos = end;
    }

    if (!values.empty()) {
      if (values.size() % 2 != 0) {
        throw ParseError("expected an even number of coordinates", line_no, line_start);
      }
      const VertexId self = vertex_for({values[0], values[1]});
      for (std::size_t k = 2; k < values.size(); k += 2) {
        const VertexId other = vertex_for({values[k], values[k + 1]});
        if (other == self) {
          throw ParseError("vertex lists itself as a neighbor", line_no, line_start);
        }
        b.add_edge(self, other);
      }
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return b.build();
}

PlanarGraph read_cityscale_graph(const std::filesystem::path& path) {
  try {
    return graph_from_cityscale_text(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string candidates_to_json(const std::vector<Candidate>& cands) {
  std::ostringstream os;
  os << "{\n  \"candidates\": [";
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const Candidate& c = cands[i];
    os << (i ? ",\n    " : "\n    ") << "{\"x\": " << number(c.position.x) << ", \"y\": " << number(c.position.y)
       << ", \"score\": " << number(c.score) << ", \"source\": \"" << to_string(c.source) << "\"}";
  }
  os << (cands.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

std::vector<Candidate> candidates_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed candidate file: ") + e.what(), line_of(text, e.byte), e.byte);
  }
  if (!doc.is_object() || !doc.contains("candidates") || !doc["candidates"].is_array())
    throw ParseError("candidate file needs a \"candidates\" array");
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < doc["candidates"].size(); ++i) {
    const auto& c = doc["candidates"][i];
    try {
      Candidate cand;
      cand.position = {c.at("x").get<double>(), c.at("y").get<double>()};
      cand.score = c.value("score", 1.0);
      cand.source = candidate_source_from_string(c.value("source", std::string("keypoint")));
      if (!is_finite(cand.position)) throw ParseError("non-finite coordinate");
      out.push_back(cand);
    } catch (const json::exception& e) {
      throw ParseError("candidate " + std::to_string(i) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError("candidate " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace roadnet
