#pragma once

// ASCII OBJ and OFF readers/writers. Coordinates are written with 17
// significant digits so a write/read round-trip reproduces doubles exactly.
// Parse errors carry 1-based line numbers. Only triangles are accepted.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "willmin/common.hpp"
#include "willmin/mesh.hpp"

namespace willmin {

enum class MeshFormat { OBJ, OFF };

inline MeshFormat format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == "obj") return MeshFormat::OBJ;
  if (ext == "off") return MeshFormat::OFF;
  throw_input("cannot infer mesh format from path '" + path + "' (use .obj or .off)");
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line_no,
                                    const std::string& msg) {
  throw_input(path + ": line " + std::to_string(line_no) + ": " + msg);
}

inline bool parse_double(const std::string& tok, double& out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end != s && *end == '\0';
}

inline bool parse_long(const std::string& tok, long& out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  out = std::strtol(s, &end, 10);
  return end != s && *end == '\0';
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream iss(line);
  std::string t;
  while (iss >> t) toks.push_back(t);
  return toks;
}

inline TriMesh read_obj(std::istream& in, const std::string& path) {
  TriMesh mesh;
  struct PendingFace {
    std::array<long, 3> idx;
    std::size_t line_no;
  };
  std::vector<PendingFace> pending;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) parse_fail(path, line_no, "vertex record needs 3 coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(toks[static_cast<std::size_t>(k + 1)], p[k]))
          parse_fail(path, line_no, "bad coordinate '" + toks[static_cast<std::size_t>(k + 1)] + "'");
      }
      mesh.vertices.push_back(p);
    } else if (toks[0] == "f") {
      if (toks.size() != 4)
        parse_fail(path, line_no, "face has " + std::to_string(toks.size() - 1) +
                                      " vertices; only triangles are supported");
      std::array<long, 3> idx{};
      for (int k = 0; k < 3; ++k) {
        // accept `i`, `i/t`, `i//n`, `i/t/n`; only the vertex index is used
        std::string head = toks[static_cast<std::size_t>(k + 1)];
        const auto slash = head.find('/');
        if (slash != std::string::npos) head = head.substr(0, slash);
        if (!parse_long(head, idx[static_cast<std::size_t>(k)]) || idx[static_cast<std::size_t>(k)] <= 0)
          parse_fail(path, line_no, "bad vertex index '" + toks[static_cast<std::size_t>(k + 1)] + "'");
      }
      pending.push_back({idx, line_no});
    }
    // all other records (vn, vt, o, g, s, usemtl, ...) are ignored
  }
  for (const auto& pf : pending) {
    std::array<Index, 3> f{};
    for (int k = 0; k < 3; ++k) {
      const long i = pf.idx[static_cast<std::size_t>(k)];
      if (i > static_cast<long>(mesh.vertices.size()))
        parse_fail(path, pf.line_no, "vertex index " + std::to_string(i) + " out of range");
      f[static_cast<std::size_t>(k)] = static_cast<Index>(i - 1);
    }
    mesh.faces.push_back(f);
  }
  return mesh;
}

inline TriMesh read_off(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t line_no = 0;
  auto next_content = [&](std::vector<std::string>& toks) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      toks = split_ws(line);
      if (toks.empty() || toks[0][0] == '#') continue;
      return true;
    }
    return false;
  };

  std::vector<std::string> toks;
  if (!next_content(toks)) parse_fail(path, line_no, "empty OFF file");
  if (toks[0] == "OFF") {
    if (toks.size() == 1 && !next_content(toks)) parse_fail(path, line_no, "missing counts line");
    if (toks[0] == "OFF") toks.erase(toks.begin());  // counts on the same line as the keyword
  }
  long nv = 0, nf = 0, ne = 0;
  if (toks.size() < 2 || !parse_long(toks[0], nv) || !parse_long(toks[1], nf) ||
      (toks.size() >= 3 && !parse_long(toks[2], ne)) || nv < 0 || nf < 0)
    parse_fail(path, line_no, "bad counts line");
  (void)ne;  // edge count is traditionally ignored

  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_content(toks)) parse_fail(path, line_no, "unexpected end of file in vertex list");
    if (toks.size() < 3) parse_fail(path, line_no, "vertex record needs 3 coordinates");
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      if (!parse_double(toks[static_cast<std::size_t>(k)], p[k]))
        parse_fail(path, line_no, "bad coordinate '" + toks[static_cast<std::size_t>(k)] + "'");
    }
    mesh.vertices.push_back(p);
  }
  mesh.faces.reserve(static_cast<std::size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    if (!next_content(toks)) parse_fail(path, line_no, "unexpected end of file in face list");
    long cnt = 0;
    if (!parse_long(toks[0], cnt)) parse_fail(path, line_no, "bad face record");
    if (cnt != 3)
      parse_fail(path, line_no, "face has " + std::to_string(cnt) +
                                    " vertices; only triangles are supported");
    if (toks.size() < 4) parse_fail(path, line_no, "face record needs 3 indices");
    std::array<Index, 3> f{};
    for (int k = 0; k < 3; ++k) {
      long idx = 0;
      if (!parse_long(toks[static_cast<std::size_t>(k + 1)], idx) || idx < 0 || idx >= nv)
        parse_fail(path, line_no, "vertex index '" + toks[static_cast<std::size_t>(k + 1)] + "' out of range");
      f[static_cast<std::size_t>(k)] = static_cast<Index>(idx);
    }
    mesh.faces.push_back(f);
  }
  return mesh;
}

}  // namespace detail

inline TriMesh read_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw_input("cannot open '" + path + "' for reading");
  return format == MeshFormat::OBJ ? detail::read_obj(in, path) : detail::read_off(in, path);
}

inline TriMesh read_mesh(const std::string& path) {
  return read_mesh(path, format_from_path(path));
}

inline void write_mesh(const TriMesh& mesh, const std::string& path, MeshFormat format) {
  std::ofstream out(path);
  if (!out) throw_input("cannot open '" + path + "' for writing");
  if (format == MeshFormat::OBJ) {
    for (const Vec3& p : mesh.vertices)
      out << "v " << format_g17(p.x) << ' ' << format_g17(p.y) << ' ' << format_g17(p.z) << '\n';
    for (const auto& f : mesh.faces)
      out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  } else {
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    for (const Vec3& p : mesh.vertices)
      out << format_g17(p.x) << ' ' << format_g17(p.y) << ' ' << format_g17(p.z) << '\n';
    for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
  if (!out.good()) throw_input("write failed for '" + path + "'");
}

inline void write_mesh(const TriMesh& mesh, const std::string& path) {
  write_mesh(mesh, path, format_from_path(path));
}

}  // namespace willmin
