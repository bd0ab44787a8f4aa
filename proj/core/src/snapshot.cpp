#include "gkflow/snapshot.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace gkflow {

namespace {

constexpr int kPrecision = 17;

std::string expect_key(std::istream& is, const std::string& key) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw SnapshotError("snapshot: expected '" + key + "', found '" + line + "'");
    std::string rest;
    std::getline(ls >> std::ws, rest);
    return rest;
  }
  throw SnapshotError("snapshot: unexpected end of input, expected '" + key + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& s, std::size_t expected, const std::string& what) {
  std::istringstream is(s);
  std::vector<T> out;
  T v;
  while (is >> v) out.push_back(v);
  if (!is.eof() || out.size() != expected)
    throw SnapshotError("snapshot: malformed '" + what + "' (expected " + std::to_string(expected) + " values)");
  return out;
}

template <class T>
T parse_one(const std::string& s, const std::string& what) {
  return parse_list<T>(s, 1, what).front();
}

template <class Seq>
void write_list(std::ostream& os, const Seq& v) {
  bool first = true;
  for (const auto& x : v) {
    os << (first ? "" : " ") << x;
    first = false;
  }
}

BackendPtr build_backend(const std::string& header) {
  std::istringstream is(header);
  const std::string kind = expect_key(is, "backend");
  const int dim = parse_one<int>(expect_key(is, "dim"), "dim");
  if (dim < 1) throw SnapshotError("snapshot: dim must be positive");
  const std::size_t n = static_cast<std::size_t>(dim);
  if (kind == "torus") {
    auto res = parse_list<int>(expect_key(is, "resolution"), n, "resolution");
    auto per = parse_list<double>(expect_key(is, "periods"), n, "periods");
    int order = parse_one<int>(expect_key(is, "stencil_order"), "stencil_order");
    return make_torus(res, per, order);
  }
  if (kind == "patch") {
    const int points = parse_one<int>(expect_key(is, "points_per_axis"), "points_per_axis");
    const double h = parse_one<double>(expect_key(is, "spacing"), "spacing");
    auto origin = parse_list<double>(expect_key(is, "origin"), n, "origin");
    int order = parse_one<int>(expect_key(is, "stencil_order"), "stencil_order");
    if (points < 1 || points % 2 == 0) throw SnapshotError("snapshot: patch needs an odd point count");
    const int half = points / 2;
    for (double& c : origin) c += half * h;
    return make_patch(origin, half, h, order);
  }
  if (kind == "frame") {
    std::string label = expect_key(is, "label");
    auto c = parse_list<double>(expect_key(is, "structure_constants"), n * n * n, "structure_constants");
    auto m = parse_list<double>(expect_key(is, "frame_metric"), n * n, "frame_metric");
    Eigen::MatrixXd fm(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) fm(i, j) = m[i * n + j];
    return make_frame(FrameAlgebra(dim, c, fm, label));
  }
  throw SnapshotError("snapshot: unknown backend kind '" + kind + "'");
}

std::string read_header_block(std::istream& is) {
  // The block ends with stencil_order (torus, patch) or frame_metric (frame).
  std::ostringstream block;
  std::string line;
  bool started = false;
  while (std::getline(is, line)) {
    if (line.empty() && !started) continue;
    started = true;
    block << line << '\n';
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k == "stencil_order" || k == "frame_metric") return block.str();
  }
  throw SnapshotError("snapshot: truncated backend header");
}

std::string slot_string(const TensorField& t) {
  std::string s;
  for (Index i : t.slots()) {
    if (!s.empty()) s += ' ';
    s += i == Index::Lower ? 'L' : 'U';
  }
  return s.empty() ? "-" : s;
}

std::vector<Index> parse_slots(const std::string& s) {
  std::vector<Index> out;
  if (s == "-") return out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    if (tok == "L") out.push_back(Index::Lower);
    else if (tok == "U") out.push_back(Index::Upper);
    else throw SnapshotError("snapshot: bad slot '" + tok + "'");
  }
  return out;
}

void read_values(std::istream& is, std::span<double> out, const std::string& what) {
  for (double& v : out) {
    std::string tok;
    if (!(is >> tok)) throw SnapshotError("snapshot: truncated " + what);
    try {
      std::size_t used = 0;
      v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw SnapshotError("snapshot: bad number '" + tok + "' in " + what);
    }
  }
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw SnapshotError("snapshot: cannot write " + file.string());
  os << std::setprecision(kPrecision);
  return os;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw SnapshotError("snapshot: cannot read " + file.string());
  return is;
}

}  // namespace

BackendPtr BackendCache::get(const std::string& header_text) {
  auto it = cache_.find(header_text);
  if (it != cache_.end()) return it->second;
  BackendPtr b = build_backend(header_text);
  cache_.emplace(header_text, b);
  return b;
}

void write_backend_header(std::ostream& os, const Backend& b) {
  const auto old = os.precision(kPrecision);
  if (b.is_torus()) {
    const TorusChart& c = b.torus();
    if (c.local_patch()) {
      os << "backend patch\ndim " << c.dim() << "\npoints_per_axis " << c.resolution()[0] << "\nspacing "
         << c.spacing(0) << "\norigin ";
      write_list(os, c.origin());
    } else {
      os << "backend torus\ndim " << c.dim() << "\nresolution ";
      write_list(os, c.resolution());
      os << "\nperiods ";
      write_list(os, c.periods());
    }
    os << "\nstencil_order " << c.stencil_order() << '\n';
  } else {
    const FrameAlgebra& f = b.frame();
    os << "backend frame\ndim " << f.dim() << "\nlabel " << f.label() << "\nstructure_constants ";
    write_list(os, f.structure_constants());
    os << "\nframe_metric ";
    std::vector<double> m;
    for (int i = 0; i < f.dim(); ++i)
      for (int j = 0; j < f.dim(); ++j) m.push_back(f.frame_metric()(i, j));
    write_list(os, m);
    os << '\n';
  }
  os.precision(old);
}

BackendPtr read_backend_header(std::istream& is, BackendCache* cache) {
  const std::string header = read_header_block(is);
  return cache ? cache->get(header) : build_backend(header);
}

void write_field(std::ostream& os, const TensorField& t, const std::string& name) {
  if (t.empty()) throw SnapshotError("snapshot: cannot write an empty field");
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
    throw SnapshotError("snapshot: field name must be a non-empty word");
  const auto old = os.precision(kPrecision);
  os << "gkflow-field 1\nname " << name << '\n';
  write_backend_header(os, *t.backend());
  os << "slots " << slot_string(t) << "\nsymmetry " << to_string(t.symmetry()) << "\npoints " << t.num_points()
     << "\ncomponents " << t.components() << "\ndata\n";
  for (std::size_t p = 0; p < t.num_points(); ++p) {
    write_list(os, t.at(p));
    os << '\n';
  }
  os << "end\n";
  os.precision(old);
}

TensorField read_field(std::istream& is, std::string* name, BackendCache* cache) {
  const std::string magic = expect_key(is, "gkflow-field");
  if (magic != "1") throw SnapshotError("snapshot: unsupported field format version '" + magic + "'");
  std::string nm = expect_key(is, "name");
  BackendPtr b = read_backend_header(is, cache);
  auto slots = parse_slots(expect_key(is, "slots"));
  Symmetry sym;
  try {
    sym = symmetry_from_string(expect_key(is, "symmetry"));
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("snapshot: ") + e.what());
  }
  const auto points = parse_one<std::size_t>(expect_key(is, "points"), "points");
  const auto comps = parse_one<std::size_t>(expect_key(is, "components"), "components");
  TensorField t(b, slots, sym);
  if (points != t.num_points() || comps != t.components())
    throw SnapshotError("snapshot: field shape does not match its backend and slots");
  expect_key(is, "data");
  read_values(is, t.values(), "field data");
  std::string end;
  if (!(is >> end) || end != "end") throw SnapshotError("snapshot: missing 'end' after field data");
  if (name) *name = nm;
  return t;
}

void save_field(const std::filesystem::path& file, const TensorField& t, const std::string& name) {
  std::ofstream os = open_out(file);
  write_field(os, t, name);
  if (!os) throw SnapshotError("snapshot: write failed for " + file.string());
}

TensorField load_field(const std::filesystem::path& file, std::string* name, BackendCache* cache) {
  std::ifstream is = open_in(file);
  return read_field(is, name, cache);
}

void save_state(const std::filesystem::path& dir, const GKState& s, double t,
                const std::map<std::string, std::string>& extra) {
  std::filesystem::create_directories(dir);
  save_field(dir / "g.gkf", s.g.tensor(), "g");
  save_field(dir / "h.gkf", s.h, "H");
  save_field(dir / "j_plus.gkf", s.j_plus, "J_plus");
  save_field(dir / "j_minus.gkf", s.j_minus, "J_minus");
  GKResiduals r = gk_residuals(s);
  std::ofstream os = open_out(dir / "manifest.txt");
  os << "format = gkflow-state 1\n";
  os << "t = " << t << '\n';
  os << "fields = g.gkf h.gkf j_plus.gkf j_minus.gkf\n";
  os << "compat_plus = " << r.compat_plus << "\ncompat_minus = " << r.compat_minus << '\n';
  os << "nij_plus = " << r.nij_plus << "\nnij_minus = " << r.nij_minus << '\n';
  os << "r1 = " << r.r1 << "\nr2 = " << r.r2 << "\nr3 = " << r.r3 << '\n';
  os << "jsq_plus = " << r.jsq_plus << "\njsq_minus = " << r.jsq_minus << '\n';
  os << "min_eig_g = " << s.g.min_eigenvalue() << '\n';
  for (const auto& [k, v] : extra) os << k << " = " << v << '\n';
  if (!os) throw SnapshotError("snapshot: write failed for manifest in " + dir.string());
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& dir) {
  std::ifstream is = open_in(dir / "manifest.txt");
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw SnapshotError("snapshot: bad manifest line '" + line + "'");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

GKState load_state(const std::filesystem::path& dir, double* t) {
  auto manifest = read_manifest(dir);
  if (manifest["format"] != "gkflow-state 1") throw SnapshotError("snapshot: not a gkflow state directory");
  BackendCache cache;
  GKState s;
  s.g = Metric(load_field(dir / "g.gkf", nullptr, &cache));
  s.h = load_field(dir / "h.gkf", nullptr, &cache);
  s.j_plus = load_field(dir / "j_plus.gkf", nullptr, &cache);
  s.j_minus = load_field(dir / "j_minus.gkf", nullptr, &cache);
  if (s.h.backend() != s.g.backend() || s.j_plus.backend() != s.g.backend())
    throw SnapshotError("snapshot: g, H and J_plus must share one backend");
  if (t) *t = parse_one<double>(manifest["t"], "t");
  return s;
}

void write_diffeo(std::ostream& os, const DiffeoFlow& phi) {
  const auto old = os.precision(kPrecision);
  const std::size_t np = phi.backend()->num_points();
  os << "gkflow-diffeo 1\n";
  write_backend_header(os, *phi.backend());
  os << "times " << phi.num_times() << '\n';
  write_list(os, phi.times());
  os << "\nactive_axes " << phi.active_axes().size();
  for (int a : phi.active_axes()) os << ' ' << a;
  os << "\nmax_step_error " << phi.max_step_error() << '\n';
  for (std::size_t k = 0; k < phi.num_times(); ++k) {
    os << "sample " << k << ' ' << phi.times()[k] << '\n';
    for (std::size_t p = 0; p < np; ++p) {
      write_list(os, phi.position(k, p));
      os << " | ";
      write_list(os, phi.jacobian(k, p));
      os << '\n';
    }
  }
  os << "end\n";
  os.precision(old);
}

DiffeoFlow read_diffeo(std::istream& is, BackendCache* cache) {
  const std::string magic = expect_key(is, "gkflow-diffeo");
  if (magic != "1") throw SnapshotError("snapshot: unsupported diffeo format version '" + magic + "'");
  BackendPtr b = read_backend_header(is, cache);
  const auto nt = parse_one<std::size_t>(expect_key(is, "times"), "times");
  std::vector<double> times(nt);
  read_values(is, times, "times");
  std::string line = expect_key(is, "active_axes");
  std::istringstream al(line);
  std::size_t na = 0;
  if (!(al >> na)) throw SnapshotError("snapshot: malformed active_axes");
  std::vector<int> axes(na);
  for (int& a : axes)
    if (!(al >> a) || a < 0 || a >= b->dim()) throw SnapshotError("snapshot: malformed active_axes");
  const double err = parse_one<double>(expect_key(is, "max_step_error"), "max_step_error");
  DiffeoFlow phi(b, times);
  phi.set_active_axes(axes);
  phi.set_max_step_error(err);
  const std::size_t np = b->num_points();
  for (std::size_t k = 0; k < nt; ++k) {
    std::string tag;
    std::size_t idx = 0;
    double tk = 0.0;
    if (!(is >> tag >> idx >> tk) || tag != "sample" || idx != k)
      throw SnapshotError("snapshot: malformed diffeo sample header " + std::to_string(k));
    for (std::size_t p = 0; p < np; ++p) {
      read_values(is, phi.position(k, p), "diffeo positions");
      std::string bar;
      if (!(is >> bar) || bar != "|") throw SnapshotError("snapshot: malformed diffeo row");
      read_values(is, phi.jacobian(k, p), "diffeo jacobians");
    }
  }
  std::string end;
  if (!(is >> end) || end != "end") throw SnapshotError("snapshot: missing 'end' after diffeo data");
  return phi;
}

}  // namespace gkflow
