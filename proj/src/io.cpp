#include "ibrep/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ibrep {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << data;
}

std::string serialize_ibrep(const IbrepFile& f) {
  ordered_json j;
  j["version"] = 1;
  j["order"] = "xyz";
  j["bits"] = f.grid.bits;
  j["bbox"] = {f.grid.bbox_min.x(), f.grid.bbox_min.y(), f.grid.bbox_min.z(),
               f.grid.bbox_max.x(), f.grid.bbox_max.y(), f.grid.bbox_max.z()};
  ordered_json verts = ordered_json::array();
  for (const BinTriple& v : f.brep.vertices)
    verts.push_back({v[2], v[1], v[0]});  // file order is (x, y, z)
  j["vertices"] = std::move(verts);
  j["edges"] = f.brep.edges;
  j["faces"] = f.brep.faces;
  return j.dump(1) + "\n";
}

IbrepFile parse_ibrep(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level must be an object");

  static const std::set<std::string> known = {"version", "order",    "bits",
                                              "bbox",    "vertices", "edges",
                                              "faces"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ParseError("unknown field \"" + key + "\"");
  for (const std::string& key : known)
    if (!j.contains(key)) throw ParseError("missing field \"" + key + "\"");

  if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw ParseError("unsupported version");
  if (!j["order"].is_string() || j["order"].get<std::string>() != "xyz")
    throw ParseError("order must be \"xyz\"");

  IbrepFile f;
  if (!j["bits"].is_number_integer()) throw ParseError("bits must be an integer");
  f.grid.bits = j["bits"].get<int>();
  if (f.grid.bits < 2 || f.grid.bits > 16) throw ParseError("bits out of [2,16]");

  if (!j["bbox"].is_array() || j["bbox"].size() != 6)
    throw ParseError("bbox must hold 6 numbers");
  double bb[6];
  for (int i = 0; i < 6; ++i) {
    if (!j["bbox"][i].is_number()) throw ParseError("bbox must hold 6 numbers");
    bb[i] = j["bbox"][i].get<double>();
  }
  f.grid.bbox_min = Vec3(bb[0], bb[1], bb[2]);
  f.grid.bbox_max = Vec3(bb[3], bb[4], bb[5]);
  if (!((f.grid.bbox_max - f.grid.bbox_min).array() > 0).all())
    throw ParseError("bbox must have positive extent");

  const int levels = f.grid.levels();
  if (!j["vertices"].is_array()) throw ParseError("vertices must be an array");
  for (size_t i = 0; i < j["vertices"].size(); ++i) {
    const auto& v = j["vertices"][i];
    if (!v.is_array() || v.size() != 3)
      throw ParseError("vertex " + std::to_string(i) + ": expected 3 components");
    BinTriple t;
    for (int c = 0; c < 3; ++c) {
      if (!v[c].is_number_integer())
        throw ParseError("vertex " + std::to_string(i) + ": integer components required");
      const int val = v[c].get<int>();
      if (val < 0 || val >= levels)
        throw ParseError("vertex " + std::to_string(i) + ": component out of range");
      t[2 - c] = val;  // file (x,y,z) to internal (z,y,x)
    }
    f.brep.vertices.push_back(t);
  }

  if (!j["edges"].is_array()) throw ParseError("edges must be an array");
  for (size_t i = 0; i < j["edges"].size(); ++i) {
    const auto& e = j["edges"][i];
    if (!e.is_array() || (e.size() != 2 && e.size() != 3))
      throw ParseError("edge " + std::to_string(i) + ": cardinality must be 2 or 3");
    std::vector<int> edge;
    for (const auto& idx : e) {
      if (!idx.is_number_integer())
        throw ParseError("edge " + std::to_string(i) + ": integer indices required");
      const int val = idx.get<int>();
      if (val < 0 || val >= int(f.brep.vertices.size()))
        throw ParseError("edge " + std::to_string(i) + ": vertex index out of range");
      edge.push_back(val);
    }
    f.brep.edges.push_back(std::move(edge));
  }

  if (!j["faces"].is_array()) throw ParseError("faces must be an array");
  for (size_t i = 0; i < j["faces"].size(); ++i) {
    const auto& fa = j["faces"][i];
    if (!fa.is_array() || fa.size() < 2)
      throw ParseError("face " + std::to_string(i) + ": needs at least 2 edges");
    std::vector<int> face;
    for (const auto& idx : fa) {
      if (!idx.is_number_integer())
        throw ParseError("face " + std::to_string(i) + ": integer indices required");
      const int val = idx.get<int>();
      if (val < 0 || val >= int(f.brep.edges.size()))
        throw ParseError("face " + std::to_string(i) + ": edge index out of range");
      face.push_back(val);
    }
    f.brep.faces.push_back(std::move(face));
  }
  return f;
}

IbrepFile load_ibrep(const std::filesystem::path& path) {
  return parse_ibrep(read_file(path));
}

void save_ibrep(const std::filesystem::path& path, const IbrepFile& f) {
  write_file(path, serialize_ibrep(f));
}

std::string serialize_tokens(const TokenSequence& seq) {
  std::string out;
  for (int t : seq.tokens) {
    out += std::to_string(t);
    out += '\n';
  }
  return out;
}

std::vector<int> parse_token_lines(const std::string& text) {
  std::vector<int> tokens;
  size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (!line.empty()) {
      int value = 0;
      const auto res = std::from_chars(line.data(), line.data() + line.size(), value);
      if (res.ec != std::errc() || res.ptr != line.data() + line.size())
        throw ParseError("token file line " + std::to_string(line_no) +
                         ": not an integer");
      tokens.push_back(value);
    }
    pos = end + 1;
  }
  return tokens;
}

std::string serialize_grid_meta(const QuantGrid& grid) {
  ordered_json j;
  j["bits"] = grid.bits;
  j["bbox"] = {grid.bbox_min.x(), grid.bbox_min.y(), grid.bbox_min.z(),
               grid.bbox_max.x(), grid.bbox_max.y(), grid.bbox_max.z()};
  return j.dump(1) + "\n";
}

QuantGrid parse_grid_meta(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid meta JSON: ") + e.what());
  }
  QuantGrid grid;
  grid.bits = j.at("bits").get<int>();
  const auto& bb = j.at("bbox");
  if (!bb.is_array() || bb.size() != 6) throw ParseError("meta bbox must hold 6 numbers");
  grid.bbox_min = Vec3(bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>());
  grid.bbox_max = Vec3(bb[3].get<double>(), bb[4].get<double>(), bb[5].get<double>());
  grid.check();
  return grid;
}

EncodedModel encode_model(const IbrepFile& f) {
  const IndexedBRep canon = canonicalize(f.brep);
  return {flatten_vertices(canon), flatten_edges(canon), flatten_faces(canon),
          f.grid};
}

IbrepFile decode_model(const std::vector<int>& vtok, const std::vector<int>& etok,
                       const std::vector<int>& ftok, const QuantGrid& grid) {
  IbrepFile f;
  f.grid = grid;
  f.brep.vertices = unflatten_vertices(vtok, grid.levels());
  f.brep.edges = unflatten_edges(etok, int(f.brep.vertices.size()));
  f.brep.faces = unflatten_faces(ftok, int(f.brep.edges.size()));
  f.brep = canonicalize(f.brep);
  return f;
}

std::string serialize_hash_lines(const std::vector<std::string>& hashes,
                                 bool sorted_set) {
  std::vector<std::string> rows = hashes;
  if (sorted_set) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  }
  std::string out;
  for (const std::string& h : rows) {
    out += h;
    out += '\n';
  }
  return out;
}

std::set<std::string> parse_hash_set(const std::string& text) {
  std::set<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty()) out.insert(line);
    pos = end + 1;
  }
  return out;
}

std::string serialize_obj(const SolidModel& model) {
  std::ostringstream out;
  out << "# triangulated faces: " << model.faces.size() << "\n";
  int base = 1;
  for (size_t fi = 0; fi < model.faces.size(); ++fi) {
    const FaceRecon& f = model.faces[fi];
    if (!f.ok) continue;
    out << "g face_" << fi;
    if (f.surface) out << " " << surface_type_name(*f.surface);
    out << "\n";
    for (const Vec3& p : f.mesh.positions)
      out << "v " << p.x() << " " << p.y() << " " << p.z() << "\n";
    for (const auto& t : f.mesh.triangles) {
      int a = t[0], b = t[1], c = t[2];
      if (f.flipped) std::swap(b, c);
      out << "f " << base + a << " " << base + b << " " << base + c << "\n";
    }
    base += int(f.mesh.positions.size());
  }
  return out.str();
}

std::string serialize_report_json(const SolidModel& model) {
  ordered_json j;
  j["checks"]["triangulatable"] = model.report.triangulatable;
  j["checks"]["wire_ordering"] = model.report.wire_order_ok;
  j["checks"]["no_self_intersection"] = model.report.no_self_intersection;
  j["checks"]["no_bad_edges"] = model.report.no_bad_edges;
  j["closed_solid"] = model.report.closed_solid;
  j["all_checks_pass"] = model.report.all_ok();
  ordered_json faces = ordered_json::array();
  for (size_t fi = 0; fi < model.faces.size(); ++fi) {
    const FaceRecon& f = model.faces[fi];
    ordered_json jf;
    jf["index"] = fi;
    jf["ok"] = f.ok;
    jf["surface"] = f.surface ? surface_type_name(*f.surface) : "unclassified";
    jf["triangles"] = f.mesh.triangles.size();
    if (!f.error.empty()) jf["error"] = f.error;
    faces.push_back(std::move(jf));
  }
  j["faces"] = std::move(faces);
  j["shells"] = model.shells.size();
  j["notes"] = model.report.notes;
  return j.dump(1) + "\n";
}

int worker_count() {
  if (const char* env = std::getenv("IBREP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

}  // namespace ibrep
