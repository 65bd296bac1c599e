#include "dgmm/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "dgmm/error.hpp"

namespace dgmm {

namespace fs = std::filesystem;

Potential PotentialSpec::build() const {
  const WellPair wells(a);
  if (kind == "w0") return make_w0(wells, softness);
  if (kind == "scaled") return make_scaled(wells, factor);
  if (kind == "perturbed") return make_perturbed(wells, sigma, seed);
  throw Error(ErrorKind::InvalidInput, "unknown potential kind '" + kind + "'");
}

json PotentialSpec::to_json() const {
  json j{{"kind", kind}, {"a", {a.x, a.y}}};
  if (kind == "scaled") j["factor"] = factor;
  if (kind == "perturbed") j["sigma"] = sigma, j["seed"] = seed;
  if (softness > 0.0) j["softness"] = softness;
  return j;
}

PotentialSpec PotentialSpec::from_json(const json& j) {
  PotentialSpec s;
  try {
    if (j.is_string()) return from_name(j.get<std::string>());
    s.kind = j.value("kind", std::string("w0"));
    s.factor = j.value("factor", 1.0);
    if (j.contains("a")) {
      const auto& a = j.at("a");
      if (!a.is_array() || a.size() != 2) throw Error(ErrorKind::InvalidInput, "\"a\" must be [ax, ay]");
      s.a = {a[0].get<double>(), a[1].get<double>()};
    }
    s.sigma = j.value("sigma", 0.0);
    s.seed = j.value("seed", std::uint64_t{0});
    s.softness = j.value("softness", 0.0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("potential descriptor: ") + e.what());
  }
  if (s.kind != "w0" && s.kind != "scaled" && s.kind != "perturbed")
    throw Error(ErrorKind::InvalidInput, "unknown potential kind '" + s.kind + "'");
  return s;
}

PotentialSpec PotentialSpec::from_name(const std::string& name) {
  PotentialSpec s;
  auto number = [&](const std::string& text) {
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size())
      throw Error(ErrorKind::InvalidInput, "bad number in potential name '" + name + "'");
    return v;
  };
  if (name == "w0") return s;
  if (name == "w0-soft") {
    s.softness = 0.05;
    return s;
  }
  if (name.rfind("scaled-", 0) == 0) {
    s.kind = "scaled";
    s.factor = number(name.substr(7));
    return s;
  }
  if (name.rfind("perturbed-", 0) == 0) {
    s.kind = "perturbed";
    const std::string rest = name.substr(10);
    const auto dash = rest.find('-');
    s.sigma = number(rest.substr(0, dash));
    if (dash != std::string::npos) s.seed = static_cast<std::uint64_t>(number(rest.substr(dash + 1)));
    return s;
  }
  throw Error(ErrorKind::InvalidInput, "unknown potential name '" + name + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorKind::InvalidInput, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string curve_to_csv(const Curve& c) {
  std::string out = "s,M11,M12,M21,M22\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    out += format_double(c.s[k]);
    for (double v : c.m[k].as_array()) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

namespace {

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> row;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t end = std::min(line.find(',', pos), line.size());
    const std::string cell = line.substr(pos, end - pos);
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc()) throw Error(ErrorKind::InvalidInput, "bad CSV value '" + cell + "'");
    row.push_back(v);
    pos = end + 1;
  }
  return row;
}

}  // namespace

Curve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  Curve c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_row(line);
    if (row.size() != 5) throw Error(ErrorKind::InvalidInput, "curve rows need five columns");
    c.s.push_back(row[0]);
    c.m.push_back({row[1], row[2], row[3], row[4]});
  }
  c.validate();
  return c;
}

std::string profile_to_csv(const Profile1D& p) {
  std::string out = "s,g1,g2\n";
  for (std::size_t k = 0; k < p.s.size(); ++k)
    out += format_double(p.s[k]) + "," + format_double(p.g[k].x) + "," + format_double(p.g[k].y) +
           "\n";
  return out;
}

json grid_to_json(const GridSpec& g) {
  return {{"n1", g.n1},       {"n2", g.n2}, {"x1_lo", g.x1_lo},
          {"x2_lo", g.x2_lo}, {"h1", g.h1}, {"h2", g.h2},
          {"periodic_x1", g.periodic_x1}};
}

GridSpec grid_from_json(const json& j) {
  try {
    GridSpec g;
    g.n1 = j.at("n1").get<int>();
    g.n2 = j.at("n2").get<int>();
    g.x1_lo = j.at("x1_lo").get<double>();
    g.x2_lo = j.at("x2_lo").get<double>();
    g.h1 = j.at("h1").get<double>();
    g.h2 = j.at("h2").get<double>();
    g.periodic_x1 = j.at("periodic_x1").get<bool>();
    if (g.n1 < 1 || g.n2 < 1 || !(g.h1 > 0.0) || !(g.h2 > 0.0))
      throw Error(ErrorKind::InvalidInput, "invalid grid in sidecar");
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("grid sidecar: ") + e.what());
  }
}

void write_field(const fs::path& stem, const Field2D& u, const json& meta, FieldFormat format) {
  const GridSpec& g = u.grid;
  fs::path data = stem;
  data += format == FieldFormat::Csv ? ".csv" : ".bin";
  std::string body;
  if (format == FieldFormat::Csv) {
    body = "x1,x2,u1,u2\n";
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        const Vec2 v = u.at(i, j);
        body += format_double(g.x1(i)) + "," + format_double(g.x2(j)) + "," + format_double(v.x) +
                "," + format_double(v.y) + "\n";
      }
  } else {
    body.resize(g.size() * 2 * sizeof(double));
    char* p = body.data();
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::memcpy(p, &u.u1[k], sizeof(double));
      std::memcpy(p + sizeof(double), &u.u2[k], sizeof(double));
      p += 2 * sizeof(double);
    }
  }
  write_file_atomic(data, body);
  json side = meta;
  side["grid"] = grid_to_json(g);
  side["format"] = format == FieldFormat::Csv ? "csv" : "binary";
  side["data"] = data.filename().string();
  fs::path sidecar = stem;
  sidecar += ".json";
  write_file_atomic(sidecar, side.dump(2) + "\n");
}

Field2D read_field(const fs::path& sidecar, json* meta) {
  json side;
  try {
    side = json::parse(read_file(sidecar));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("field sidecar: ") + e.what());
  }
  const GridSpec g = grid_from_json(side.at("grid"));
  Field2D u = Field2D::zeros(g);
  const fs::path data = sidecar.parent_path() / side.value("data", std::string());
  const std::string body = read_file(data);
  if (side.value("format", std::string("csv")) == "binary") {
    if (body.size() != g.size() * 2 * sizeof(double))
      throw Error(ErrorKind::InvalidInput, "binary field has the wrong size");
    const char* p = body.data();
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::memcpy(&u.u1[k], p, sizeof(double));
      std::memcpy(&u.u2[k], p + sizeof(double), sizeof(double));
      p += 2 * sizeof(double);
    }
  } else {
    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    std::size_t k = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto row = parse_row(line);
      if (row.size() != 4 || k >= g.size())
        throw Error(ErrorKind::InvalidInput, "field CSV does not match its grid");
      u.u1[k] = row[2];
      u.u2[k] = row[3];
      ++k;
    }
    if (k != g.size()) throw Error(ErrorKind::InvalidInput, "field CSV is truncated");
  }
  if (meta) *meta = side;
  return u;
}

}  // namespace dgmm
