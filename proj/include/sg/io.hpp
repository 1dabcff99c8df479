#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sg/forms.hpp"
#include "sg/kusuoka.hpp"
#include "sg/magnetic.hpp"
#include "sg/spectral.hpp"

namespace sg {

/// Doubles are printed with 17 significant digits everywhere so that every
/// artifact round-trips losslessly.
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline nlohmann::json graph_to_json(const LevelGraph& g) {
  nlohmann::json j;
  j["level"] = g.level();
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : g.vertices())
    j["vertices"].push_back({{"id", v.id}, {"x", v.xy.x()}, {"y", v.xy.y()}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges())
    j["edges"].push_back({{"tail", e.tail},
                          {"head", e.head},
                          {"cell", g.cells()[e.cell].word.str()}});
  j["cells"] = nlohmann::json::array();
  for (const auto& c : g.cells())
    j["cells"].push_back(
        {{"word", c.word.str()}, {"vids", {c.v[0], c.v[1], c.v[2]}}});
  return j;
}

inline nlohmann::json spectrum_to_json(int level, const std::string& op,
                                       const SpectrumReport& rep) {
  nlohmann::json j;
  j["level"] = level;
  j["operator"] = op;
  j["eigenvalues"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
    j["eigenvalues"].push_back(rep.eigenvalues[i]);
  j["tolerances"] = {{"residual", rep.residual},
                     {"multiplicity_grouping", rep.grouping_tol}};
  return j;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool looks_like_header(const std::string& line) {
  for (char c : line)
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E')
      return true;
  return false;
}

struct CsvRow {
  int lineno;
  std::vector<std::string> fields;
};

inline std::vector<CsvRow> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<CsvRow> rows;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    if (n == 1 && looks_like_header(line)) continue;
    rows.push_back({n, split_csv_row(line)});
  }
  return rows;
}

inline double parse_double(const std::string& s, int lineno,
                           std::vector<std::string>* errors) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() &&
           std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    errors->push_back("row " + std::to_string(lineno) +
                      ": not a real number: '" + s + "'");
    return 0.0;
  }
}

inline long parse_int(const std::string& s, int lineno,
                      std::vector<std::string>* errors) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    errors->push_back("row " + std::to_string(lineno) + ": not an integer: '" +
                      s + "'");
    return -1;
  }
}

inline void raise_if_errors(const std::string& path,
                            const std::vector<std::string>& errors) {
  if (errors.empty()) return;
  std::string msg = path + ": " + std::to_string(errors.size()) +
                    " offending row(s):";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ParseError(msg);
}

}  // namespace detail

inline void write_vertex_function_csv(const std::string& path,
                                      const VertexFunction& u) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "id,re,im\n";
  for (Eigen::Index i = 0; i < u.values.size(); ++i)
    out << i << ',' << fmt17(u.values[i].real()) << ','
        << fmt17(u.values[i].imag()) << '\n';
}

inline VertexFunction read_vertex_function_csv(const std::string& path,
                                               const LevelGraph& g) {
  VertexFunction u{g.level(), Eigen::VectorXcd::Zero(g.num_vertices())};
  std::vector<std::string> errors;
  for (const auto& row : detail::read_csv_rows(path)) {
    if (row.fields.size() != 3) {
      errors.push_back("row " + std::to_string(row.lineno) +
                       ": expected 3 fields (id, re, im)");
      continue;
    }
    const long id = detail::parse_int(row.fields[0], row.lineno, &errors);
    const double re = detail::parse_double(row.fields[1], row.lineno, &errors);
    const double im = detail::parse_double(row.fields[2], row.lineno, &errors);
    if (id < 0 || id >= g.num_vertices()) {
      errors.push_back("row " + std::to_string(row.lineno) +
                       ": unknown vertex id " + row.fields[0]);
      continue;
    }
    u.values[id] = Complex(re, im);
  }
  detail::raise_if_errors(path, errors);
  return u;
}

inline void write_edge_form_csv(const std::string& path, const LevelGraph& g,
                                const EdgeForm& w) {
  require_same_level(g, w, "write_edge_form_csv");
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "tail,head,re,im\n";
  for (int e = 0; e < g.num_edges(); ++e)
    out << g.edges()[e].tail << ',' << g.edges()[e].head << ','
        << fmt17(w.values[e].real()) << ',' << fmt17(w.values[e].imag())
        << '\n';
}

inline void write_cell_table_csv(const std::string& path,
                                 const std::vector<CellData>& table) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "word,mass,z11,z12,z22,lambda_min,lambda_max\n";
  for (const auto& c : table) {
    const auto [lo, hi] = symmetric_eigenvalues(c.z);
    out << c.word.str() << ',' << fmt17(c.mass) << ',' << fmt17(c.z(0, 0))
        << ',' << fmt17(c.z(0, 1)) << ',' << fmt17(c.z(1, 1)) << ','
        << fmt17(lo) << ',' << fmt17(hi) << '\n';
  }
}

/// Coordinate (triplet) text export of a sparse operator: row col re im.
inline void write_operator_triplets(const std::string& path,
                                    const OperatorMatrix& op) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "# " << op.basis.describe() << " dim " << op.dim() << "\n";
  for (int k = 0; k < op.mat.outerSize(); ++k)
    for (SparseC::InnerIterator it(op.mat, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << fmt17(it.value().real())
          << ' ' << fmt17(it.value().imag()) << '\n';
}

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

inline void save_potential(const std::string& a_path,
                           const std::string& v_path, const LevelGraph& g,
                           const PotentialPair& p) {
  {
    std::ofstream out(a_path);
    if (!out) throw ParseError("cannot write " + a_path);
    out << "tail,head,value\n";
    for (int e = 0; e < g.num_edges(); ++e)
      out << g.edges()[e].tail << ',' << g.edges()[e].head << ','
          << fmt17(p.a[e]) << '\n';
  }
  {
    std::ofstream out(v_path);
    if (!out) throw ParseError("cannot write " + v_path);
    out << "id,value\n";
    for (int v = 0; v < g.num_vertices(); ++v)
      out << v << ',' << fmt17(p.V[v]) << '\n';
  }
}

/// Reads a magnetic potential from an edge CSV (tail, head, value) and an
/// electric potential from a vertex CSV (id, value). Either path may be
/// empty (the string), meaning a zero potential. Rows may list an edge in
/// either orientation; both orientations together must be negations of each
/// other. A fourth (imaginary) column, if present, must be zero.
inline PotentialPair load_potential(const LevelGraph& g,
                                    const std::string& a_path,
                                    const std::string& v_path) {
  PotentialPair p = zero_potential(g);

  if (!a_path.empty()) {
    std::vector<std::string> errors;
    // canonical edge lookup: key tail*nv+head
    std::unordered_map<std::int64_t, int> edge_of;
    const std::int64_t nv = g.num_vertices();
    for (int e = 0; e < g.num_edges(); ++e)
      edge_of[g.edges()[e].tail * nv + g.edges()[e].head] = e;
    std::vector<char> seen(g.num_edges(), 0);  // 1 = forward, 2 = reverse bit
    for (const auto& row : detail::read_csv_rows(a_path)) {
      if (row.fields.size() != 3 && row.fields.size() != 4) {
        errors.push_back("row " + std::to_string(row.lineno) +
                         ": expected (tail, head, value)");
        continue;
      }
      const long tail = detail::parse_int(row.fields[0], row.lineno, &errors);
      const long head = detail::parse_int(row.fields[1], row.lineno, &errors);
      const double val =
          detail::parse_double(row.fields[2], row.lineno, &errors);
      if (row.fields.size() == 4) {
        const double im =
            detail::parse_double(row.fields[3], row.lineno, &errors);
        if (im != 0.0) {
          errors.push_back("row " + std::to_string(row.lineno) +
                           ": complex entry (im = " + row.fields[3] + ")");
          continue;
        }
      }
      if (tail < 0 || tail >= nv || head < 0 || head >= nv) {
        errors.push_back("row " + std::to_string(row.lineno) +
                         ": unknown vertex id");
        continue;
      }
      int e = -1;
      double signed_val = val;
      int orient_bit = 1;
      if (auto it = edge_of.find(tail * nv + head); it != edge_of.end()) {
        e = it->second;
      } else if (auto it2 = edge_of.find(head * nv + tail);
                 it2 != edge_of.end()) {
        e = it2->second;
        signed_val = -val;
        orient_bit = 2;
      } else {
        errors.push_back("row " + std::to_string(row.lineno) + ": (" +
                         std::to_string(tail) + "," + std::to_string(head) +
                         ") is not an edge");
        continue;
      }
      if (seen[e] & orient_bit) {
        errors.push_back("row " + std::to_string(row.lineno) +
                         ": duplicate orientation of edge (" +
                         std::to_string(tail) + "," + std::to_string(head) +
                         ")");
        continue;
      }
      if (seen[e] && p.a[e] != signed_val) {
        errors.push_back(
            "row " + std::to_string(row.lineno) +
            ": antisymmetry violation: both orientations of an edge must "
            "carry negated values");
        continue;
      }
      seen[e] |= orient_bit;
      p.a[e] = signed_val;
    }
    detail::raise_if_errors(a_path, errors);
  }

  if (!v_path.empty()) {
    std::vector<std::string> errors;
    for (const auto& row : detail::read_csv_rows(v_path)) {
      if (row.fields.size() != 2 && row.fields.size() != 3) {
        errors.push_back("row " + std::to_string(row.lineno) +
                         ": expected (id, value)");
        continue;
      }
      const long id = detail::parse_int(row.fields[0], row.lineno, &errors);
      const double val =
          detail::parse_double(row.fields[1], row.lineno, &errors);
      if (row.fields.size() == 3) {
        const double im =
            detail::parse_double(row.fields[2], row.lineno, &errors);
        if (im != 0.0) {
          errors.push_back("row " + std::to_string(row.lineno) +
                           ": complex entry (im = " + row.fields[2] + ")");
          continue;
        }
      }
      if (id < 0 || id >= g.num_vertices()) {
        errors.push_back("row " + std::to_string(row.lineno) +
                         ": unknown vertex id " + row.fields[0]);
        continue;
      }
      p.V[id] = val;
    }
    detail::raise_if_errors(v_path, errors);
  }
  return p;
}

}  // namespace sg
