#include "flawkit/io.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace flawkit::io {

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

/// Whole-token signed integer; false on junk or overflow.
bool to_integer(const std::string& t, long long& value) {
    if (t.empty()) return false;
    std::size_t used = 0;
    try {
        value = std::stoll(t, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == t.size();
}

long long integer(const std::string& t, std::size_t line, const char* what) {
    long long x = 0;
    if (!to_integer(t, x)) throw ParseError(line, std::string("expected ") + what + ", got '" + t + "'");
    return x;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    std::size_t line = 1;
    for (std::size_t k = 0; k < byte; ++k)
        if (text[k] == '\n') ++line;
    return line;
}

} // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": " + std::strerror(errno));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError(path + ": " + std::strerror(errno));
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": " + std::strerror(errno));
    out << content;
    out.flush();
    if (!out) throw IoError(path + ": " + std::strerror(errno));
}

nlohmann::ordered_json parse_json(const std::string& text) {
    try {
        return nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_of(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
}

sat::CspInstance parse_cnf(std::istream& in) {
    bool header = false;
    long long variables = 0, expected = 0;
    std::vector<std::vector<int>> clauses;
    std::vector<int> clause;
    std::size_t line_no = 0, clause_line = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto t = tokens(line);
        if (t.empty() || t[0][0] == 'c') continue;
        if (t[0][0] == '%') break;
        if (t[0] == "p") {
            if (header) throw ParseError(line_no, "second problem line");
            if (t.size() != 4 || t[1] != "cnf") throw ParseError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
            variables = integer(t[2], line_no, "variable count");
            expected = integer(t[3], line_no, "clause count");
            if (variables < 0 || expected < 0 || variables > std::numeric_limits<std::int32_t>::max())
                throw ParseError(line_no, "header counts out of range");
            header = true;
            continue;
        }
        if (!header) throw ParseError(line_no, "clause before the 'p cnf' header");
        for (const auto& tok : t) {
            const long long lit = integer(tok, line_no, "literal");
            if (lit == 0) {
                if (clause.empty()) throw ParseError(line_no, "clause with no literals");
                if (static_cast<long long>(clauses.size()) == expected)
                    throw ParseError(line_no, "more clauses than the header's " + std::to_string(expected));
                clauses.push_back(std::move(clause));
                clause.clear();
                continue;
            }
            if (lit > variables || -lit > variables)
                throw ParseError(line_no, "literal " + tok + " outside 1.." + std::to_string(variables));
            if (clause.empty()) clause_line = line_no;
            clause.push_back(static_cast<int>(lit));
        }
    }
    if (!header) throw ParseError(line_no, "missing 'p cnf' header");
    if (!clause.empty()) throw ParseError(clause_line, "clause not terminated by 0");
    if (static_cast<long long>(clauses.size()) != expected)
        throw ParseError(line_no, "header declares " + std::to_string(expected) + " clauses, found " +
                                      std::to_string(clauses.size()));
    return sat::CspInstance::cnf(static_cast<std::size_t>(variables), std::move(clauses));
}

sat::CspInstance parse_cnf_text(const std::string& text) {
    std::istringstream in(text);
    return parse_cnf(in);
}

sat::CspInstance parse_cnf_file(const std::string& path) { return parse_cnf_text(read_file(path)); }

std::string emit_cnf(const sat::CspInstance& csp) {
    if (!csp.is_cnf()) throw PreconditionError("emit_cnf needs a CNF instance");
    std::ostringstream out;
    out << "p cnf " << csp.variables() << ' ' << csp.clauses().size() << '\n';
    for (const auto& clause : csp.clauses()) {
        for (int lit : clause) out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

std::string emit_assignment(const State& assignment) {
    std::ostringstream out;
    std::size_t on_line = 0;
    for (std::size_t v = 0; v < assignment.size(); ++v) {
        if (assignment[v] == sat::unassigned) continue;
        if (on_line == 0) out << 'v';
        const long long lit = static_cast<long long>(v) + 1;
        out << ' ' << (assignment[v] ? lit : -lit);
        if (++on_line == 10) {
            out << '\n';
            on_line = 0;
        }
    }
    out << (on_line ? " 0\n" : "v 0\n");
    return out.str();
}

Graph parse_graph(std::istream& in) {
    bool header = false;
    long long n = 0, m = 0;
    std::vector<std::pair<Graph::Edge, std::size_t>> edges;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto t = tokens(line);
        if (t.empty() || t[0][0] == 'c' || t[0][0] == '#') continue;
        if (t[0] == "p") {
            if (header) throw ParseError(line_no, "second problem line");
            if (!edges.empty()) throw ParseError(line_no, "header after edges");
            if (t.size() != 4 || t[1] != "edge") throw ParseError(line_no, "malformed header, expected 'p edge <n> <m>'");
            n = integer(t[2], line_no, "vertex count");
            m = integer(t[3], line_no, "edge count");
            if (n < 0 || m < 0 || n > std::numeric_limits<std::uint32_t>::max())
                throw ParseError(line_no, "header counts out of range");
            header = true;
            continue;
        }
        long long u = 0, v = 0;
        if (t[0] == "e") {
            if (!header) throw ParseError(line_no, "'e' line without a 'p edge' header");
            if (t.size() != 3) throw ParseError(line_no, "expected 'e <u> <v>'");
            u = integer(t[1], line_no, "vertex") - 1;
            v = integer(t[2], line_no, "vertex") - 1;
        } else {
            if (t.size() != 2) throw ParseError(line_no, "expected '<u> <v>'");
            u = integer(t[0], line_no, "vertex");
            v = integer(t[1], line_no, "vertex");
        }
        const long long bound = header ? n : static_cast<long long>(std::numeric_limits<std::uint32_t>::max());
        if (u < 0 || v < 0 || u >= bound || v >= bound) throw ParseError(line_no, "vertex id out of range");
        if (u == v) throw ParseError(line_no, "self-loop at vertex " + std::to_string(u));
        edges.push_back({{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)}, line_no});
    }
    if (header && static_cast<long long>(edges.size()) != m)
        throw ParseError(line_no, "header declares " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
    std::size_t vertices = static_cast<std::size_t>(n);
    if (!header)
        for (const auto& [e, _] : edges) vertices = std::max<std::size_t>(vertices, std::max(e.first, e.second) + 1);
    Graph g(vertices);
    for (const auto& [e, line] : edges) {
        if (g.adjacent(e.first, e.second))
            throw ParseError(line, "duplicate edge {" + std::to_string(e.first) + "," + std::to_string(e.second) + "}");
        g.add_edge(e.first, e.second);
    }
    return g;
}

Graph parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

Graph parse_graph_file(const std::string& path) { return parse_graph_text(read_file(path)); }

std::string emit_graph(const Graph& g) {
    std::ostringstream out;
    out << "p edge " << g.vertices() << ' ' << g.edges() << '\n';
    for (const auto& [u, v] : g.edge_list()) out << "e " << u + 1 << ' ' << v + 1 << '\n';
    return out.str();
}

color::ColorLists parse_lists(const std::string& json_text, std::size_t vertices) {
    const auto j = parse_json(json_text);
    std::vector<std::vector<std::int32_t>> lists(vertices);
    std::vector<bool> seen(vertices, false);
    auto take = [&](std::size_t v, const nlohmann::ordered_json& list) {
        if (v >= vertices) throw ConfigError("list for vertex " + std::to_string(v) + " outside the graph");
        if (seen[v]) throw ConfigError("two lists for vertex " + std::to_string(v));
        if (!list.is_array()) throw ConfigError("list of vertex " + std::to_string(v) + " is not an array");
        for (const auto& c : list) {
            if (!c.is_number_integer() || c.get<long long>() < 0 ||
                c.get<long long>() > std::numeric_limits<std::int32_t>::max())
                throw ConfigError("list of vertex " + std::to_string(v) + " holds a non-color entry");
            lists[v].push_back(c.get<std::int32_t>());
        }
        seen[v] = true;
    };
    if (j.is_array()) {
        if (j.size() != vertices)
            throw ConfigError("lists cover " + std::to_string(j.size()) + " vertices, graph has " + std::to_string(vertices));
        for (std::size_t v = 0; v < vertices; ++v) take(v, j[v]);
    } else if (j.is_object()) {
        for (const auto& [key, list] : j.items()) {
            long long v = 0;
            if (!to_integer(key, v) || v < 0) throw ConfigError("list key '" + key + "' is not a vertex id");
            take(static_cast<std::size_t>(v), list);
        }
        for (std::size_t v = 0; v < vertices; ++v)
            if (!seen[v]) throw ConfigError("no list for vertex " + std::to_string(v));
    } else {
        throw ConfigError("lists must be a JSON array or object");
    }
    return color::ColorLists(std::move(lists));
}

sat::ProductMeasure parse_measure(const std::string& json_text, const sat::CspInstance& csp) {
    const auto j = parse_json(json_text);
    if (!j.is_object()) throw ConfigError("measure must be a JSON object keyed by variable number");
    std::vector<std::vector<double>> p(csp.variables());
    for (std::size_t v = 0; v < p.size(); ++v) p[v].assign(csp.domain(v), 1.0 / csp.domain(v));
    for (const auto& [key, dist] : j.items()) {
        long long x = 0;
        if (!to_integer(key, x) || x < 1 || x > static_cast<long long>(csp.variables()))
            throw ConfigError("measure key '" + key + "' is not a variable number");
        if (!dist.is_array()) throw ConfigError("distribution of variable " + key + " is not an array");
        std::vector<double> d;
        for (const auto& w : dist) {
            if (!w.is_number()) throw ConfigError("distribution of variable " + key + " holds a non-number");
            d.push_back(w.get<double>());
        }
        p[static_cast<std::size_t>(x - 1)] = std::move(d);
    }
    return sat::ProductMeasure::from(csp, std::move(p));
}

std::string emit_edge_coloring(const State& coloring) {
    std::ostringstream out;
    for (std::size_t e = 0; e < coloring.size(); ++e) out << e << ' ' << coloring[e] << '\n';
    return out.str();
}

std::string emit_vertex_coloring(const State& coloring) { return nlohmann::json(coloring).dump() + "\n"; }

} // namespace flawkit::io
