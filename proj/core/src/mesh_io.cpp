#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "fvproj/mesh.hpp"

namespace fvproj {

namespace {

/// Whitespace tokenizer that drops '#' comments, line-aware so records with
/// optional trailing columns can be read one line at a time.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) {
      throw MeshParseError("cannot open mesh file " + path.string());
    }
  }

  /// Next non-empty line split into tokens.
  std::vector<std::string> next_record(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string tok; ss >> tok;) {
        tokens.push_back(tok);
      }
      if (!tokens.empty()) {
        return tokens;
      }
    }
    fail(std::string("unexpected end of file while reading ") + what);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << path_.string() << ":" << line_no_ << ": " << msg;
    throw MeshParseError(os.str());
  }

  double to_double(const std::string& tok) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) {
      fail("expected a number, got '" + tok + "'");
    }
    return v;
  }

  long to_int(const std::string& tok) const {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + tok + "'");
    }
    if (used != tok.size()) {
      fail("expected an integer, got '" + tok + "'");
    }
    return v;
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  int line_no_ = 0;
};

int checked_index(const LineReader& r, long v) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    r.fail("index out of range");
  }
  return static_cast<int>(v);
}

Mesh load_single_file(const std::filesystem::path& path) {
  LineReader r(path);
  auto header = r.next_record("header");
  if (header.size() != 2) {
    r.fail("header must be 'NV NT'");
  }
  const long nv = r.to_int(header[0]);
  const long nt = r.to_int(header[1]);
  if (nv < 0 || nt < 0) {
    r.fail("negative counts in header");
  }
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    auto rec = r.next_record("vertex");
    if (rec.size() != 2) {
      r.fail("vertex line must be 'x y'");
    }
    vertices.push_back({r.to_double(rec[0]), r.to_double(rec[1])});
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(static_cast<std::size_t>(nt));
  for (long i = 0; i < nt; ++i) {
    auto rec = r.next_record("triangle");
    if (rec.size() != 3) {
      r.fail("triangle line must be 'i j k'");
    }
    triangles.push_back({checked_index(r, r.to_int(rec[0])), checked_index(r, r.to_int(rec[1])),
                         checked_index(r, r.to_int(rec[2]))});
  }
  return Mesh::from_arrays(std::move(vertices), std::move(triangles));
}

Mesh load_node_ele(const std::filesystem::path& path) {
  std::filesystem::path stem = path;
  if (stem.extension() == ".node" || stem.extension() == ".ele") {
    stem.replace_extension();
  }
  const auto node_path = std::filesystem::path(stem.string() + ".node");
  const auto ele_path = std::filesystem::path(stem.string() + ".ele");

  LineReader nodes(node_path);
  auto header = nodes.next_record("node header");
  if (header.empty()) {
    nodes.fail("empty node header");
  }
  const long nv = nodes.to_int(header[0]);
  if (header.size() > 1 && nodes.to_int(header[1]) != 2) {
    nodes.fail("only two-dimensional node files are supported");
  }
  if (nv < 0) {
    nodes.fail("negative vertex count");
  }
  // The first listed index fixes the numbering base (0 or 1).
  std::unordered_map<long, int> position;
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    auto rec = nodes.next_record("node");
    if (rec.size() < 3) {
      nodes.fail("node line must be 'id x y [attributes] [marker]'");
    }
    const long id = nodes.to_int(rec[0]);
    if (!position.emplace(id, static_cast<int>(i)).second) {
      nodes.fail("duplicate node id " + rec[0]);
    }
    vertices.push_back({nodes.to_double(rec[1]), nodes.to_double(rec[2])});
  }

  LineReader eles(ele_path);
  auto eheader = eles.next_record("element header");
  const long nt = eles.to_int(eheader[0]);
  if (eheader.size() > 1 && eles.to_int(eheader[1]) != 3) {
    eles.fail("only 3-node triangles are supported");
  }
  if (nt < 0) {
    eles.fail("negative triangle count");
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(static_cast<std::size_t>(nt));
  for (long i = 0; i < nt; ++i) {
    auto rec = eles.next_record("element");
    if (rec.size() < 4) {
      eles.fail("element line must be 'id n1 n2 n3 [attributes]'");
    }
    std::array<int, 3> tri{};
    for (int j = 0; j < 3; ++j) {
      const long id = eles.to_int(rec[1 + j]);
      auto it = position.find(id);
      if (it == position.end()) {
        throw MeshTopologyError("element " + rec[0] + " references unknown node " + rec[1 + j]);
      }
      tri[j] = it->second;
    }
    triangles.push_back(tri);
  }
  return Mesh::from_arrays(std::move(vertices), std::move(triangles));
}

}  // namespace

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  switch (format) {
    case MeshFormat::single_file:
      return load_single_file(path);
    case MeshFormat::node_ele:
      return load_node_ele(path);
  }
  throw MeshParseError("unknown mesh format");
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write mesh file " + path.string());
  }
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) {
    out << v.x << ' ' << v.y << '\n';
  }
  for (const auto& t : mesh.triangles()) {
    out << t.vertices[0] << ' ' << t.vertices[1] << ' ' << t.vertices[2] << '\n';
  }
}

}  // namespace fvproj
