#include "spinwall/chain.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "io_detail.hpp"

namespace spinwall {

int site_count_for_spacing(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
  return static_cast<int>(std::floor(1.0 / lambda + 1e-9)) + 1;
}

SpinChain1D::SpinChain1D(double lambda, SystemGeometry geom, std::vector<Site> sites)
    : lambda_(lambda), geom_(std::move(geom)), sites_(std::move(sites)) {
  const int expected = site_count_for_spacing(lambda_);
  if (static_cast<int>(sites_.size()) != expected)
    throw std::invalid_argument("chain has " + std::to_string(sites_.size()) +
                                " sites, expected floor(1/lambda)+1 = " + std::to_string(expected));
  for (const Site& s : sites_) {
    if (s.d != 1 && s.d != 2) throw std::invalid_argument("site circle index must be 1 or 2");
    if (!std::isfinite(s.phi)) throw std::invalid_argument("site angle must be finite");
  }
}

std::vector<Vec3> SpinChain1D::points() const {
  std::vector<Vec3> p;
  p.reserve(sites_.size());
  for (const Site& s : sites_) p.push_back(geom_.embed(s.d, s.phi));
  return p;
}

AnisotropyMap anisotropy_map(const SpinChain1D& chain) {
  AnisotropyMap m;
  m.labels.reserve(chain.n_sites());
  for (const Site& s : chain.sites()) m.labels.push_back(s.d);
  for (std::size_t i = 1; i < m.labels.size(); ++i)
    if (m.labels[i] != m.labels[i - 1]) ++m.jump_count;
  const double axis_gap = norm(chain.geom().axis(1) - chain.geom().axis(2));
  m.total_variation = m.jump_count * axis_gap;
  return m;
}

Partition1D partition(const SpinChain1D& chain) {
  Partition1D part;
  const auto& sites = chain.sites();
  int start = 0;
  for (int i = 1; i <= chain.last_index(); ++i) {
    if (sites[i].d != sites[start].d) {
      part.pieces.push_back({start, i, sites[start].d});
      start = i;
    }
  }
  part.pieces.push_back({start, chain.n_sites(), sites[start].d});
  return part;
}

BoundaryCheck check_boundary_condition(const SpinChain1D& chain) {
  const int N = chain.last_index();
  if (N < 2) throw std::domain_error("boundary condition needs at least 3 sites");
  const double first = dot(chain.point(0), chain.point(1));
  const double last = dot(chain.point(N - 1), chain.point(N));
  BoundaryCheck c;
  c.residual = std::abs(first - last);
  c.satisfied = c.residual < 1e-10;
  return c;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static std::string fmt_vec(const Vec3& v) {
  return fmt17(v.x) + "," + fmt17(v.y) + "," + fmt17(v.z);
}

static Vec3 parse_vec(const std::string& s) {
  Vec3 v;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
    throw std::runtime_error("bad vector field: " + s);
  return v;
}

// Shared by the chain and field headers.
void write_geometry_header(std::ostream& os, const char* magic, double lambda,
                           const SystemGeometry& geom) {
  os << magic << " v1 lambda=" << fmt17(lambda) << " R=" << fmt17(geom.radius())
     << " v1=" << fmt_vec(geom.axis(1)) << " v2=" << fmt_vec(geom.axis(2));
}

ParsedHeader parse_geometry_header(const std::string& line, const char* magic) {
  std::istringstream ss(line);
  std::string word;
  ss >> word;
  if (word != magic) throw std::runtime_error("bad header magic: " + word);
  ss >> word;
  if (word != "v1") throw std::runtime_error("unsupported format version: " + word);
  ParsedHeader h;
  bool have_lambda = false, have_r = false, have_v1 = false, have_v2 = false;
  while (ss >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad header field: " + word);
    const std::string key = word.substr(0, eq);
    const std::string val = word.substr(eq + 1);
    if (key == "lambda") {
      h.lambda = std::stod(val);
      have_lambda = true;
    } else if (key == "R") {
      h.R = std::stod(val);
      have_r = true;
    } else if (key == "v1") {
      h.v1 = parse_vec(val);
      have_v1 = true;
    } else if (key == "v2") {
      h.v2 = parse_vec(val);
      have_v2 = true;
    } else {
      h.rest += word;
      h.rest += ' ';
    }
  }
  if (!have_lambda || !have_r || !have_v1 || !have_v2)
    throw std::runtime_error("header is missing lambda/R/v1/v2");
  return h;
}

void write_chain(const SpinChain1D& chain, std::ostream& os) {
  write_geometry_header(os, "spinwall-chain", chain.lambda(), chain.geom());
  os << '\n';
  const auto& sites = chain.sites();
  for (std::size_t i = 0; i < sites.size(); ++i)
    os << i << ' ' << sites[i].d << ' ' << fmt17(sites[i].phi) << '\n';
}

SpinChain1D read_chain(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty chain file");
  const ParsedHeader h = parse_geometry_header(line, "spinwall-chain");
  SystemGeometry geom = SystemGeometry::make(h.v1, h.v2, h.R);
  std::vector<Site> sites(site_count_for_spacing(h.lambda));
  std::vector<bool> seen(sites.size(), false);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long i;
    int d;
    double phi;
    if (std::sscanf(line.c_str(), "%ld %d %lf", &i, &d, &phi) != 3)
      throw std::runtime_error("bad site line: " + line);
    if (i < 0 || i >= static_cast<long>(sites.size()))
      throw std::runtime_error("site index out of range: " + std::to_string(i));
    sites[i] = {d, phi};
    seen[i] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw std::runtime_error("missing site " + std::to_string(i));
  return SpinChain1D(h.lambda, std::move(geom), std::move(sites));
}

void write_chain_file(const SpinChain1D& chain, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_chain(chain, f);
}

SpinChain1D read_chain_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_chain(f);
}

}  // namespace spinwall
