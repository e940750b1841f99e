#pragma once

#include "flawkit/color.hpp"
#include "flawkit/graph.hpp"
#include "flawkit/sat.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace flawkit {

/// A file could not be opened, read or written. The message carries the OS error text.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace flawkit

namespace flawkit::io {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Parses JSON, mapping syntax errors to ParseError at the offending line.
nlohmann::ordered_json parse_json(const std::string& text);

/// DIMACS CNF. Comment lines start with 'c'; a line starting with '%' ends the input.
/// Clauses may span lines and are terminated by 0.
sat::CspInstance parse_cnf(std::istream& in);
sat::CspInstance parse_cnf_text(const std::string& text);
sat::CspInstance parse_cnf_file(const std::string& path);
std::string emit_cnf(const sat::CspInstance& csp);

/// "v" lines with the DIMACS literal of every assigned variable, closed by "v 0".
std::string emit_assignment(const State& assignment);

/**
 * Graph text. Plain lines "u v" are 0-based; with a "p edge n m" header, lines "e u v" are
 * 1-based DIMACS edges and plain lines stay 0-based. Without a header the vertex count is one
 * past the largest id. Comments start with 'c' or '#'.
 */
Graph parse_graph(std::istream& in);
Graph parse_graph_text(const std::string& text);
Graph parse_graph_file(const std::string& path);
/// "p edge n m" followed by one "e u v" line per edge in id order.
std::string emit_graph(const Graph& g);

/// Per-vertex color lists: [[c, ...], ...] or {"v": [c, ...], ...} covering every vertex.
color::ColorLists parse_lists(const std::string& json_text, std::size_t vertices);

/// {"x": [p_0, ..., p_{d-1}], ...} keyed by 1-based variable number; unlisted variables are uniform.
sat::ProductMeasure parse_measure(const std::string& json_text, const sat::CspInstance& csp);

/// One "edge-id color" line per edge.
std::string emit_edge_coloring(const State& coloring);

/// JSON array vertex → color.
std::string emit_vertex_coloring(const State& coloring);

} // namespace flawkit::io
