#include "spinwall/field2d.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "io_detail.hpp"

namespace spinwall {

GridDomain::GridDomain(double lambda, std::vector<CellRect> rects)
    : lambda_(lambda), rects_(std::move(rects)) {
  if (!(lambda_ > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
  if (rects_.empty()) throw std::invalid_argument("domain needs at least one rectangle");
  int lo_i = INT32_MAX, lo_j = INT32_MAX, hi_i = INT32_MIN, hi_j = INT32_MIN;
  for (const CellRect& r : rects_) {
    if (r.i1 <= r.i0 || r.j1 <= r.j0) throw std::invalid_argument("empty domain rectangle");
    lo_i = std::min(lo_i, r.i0);
    lo_j = std::min(lo_j, r.j0);
    hi_i = std::max(hi_i, r.i1);
    hi_j = std::max(hi_j, r.j1);
  }
  i0_ = lo_i;
  j0_ = lo_j;
  nx_ = hi_i - lo_i;
  ny_ = hi_j - lo_j;
  mask_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
  for (const CellRect& r : rects_)
    for (int j = r.j0; j < r.j1; ++j)
      for (int i = r.i0; i < r.i1; ++i) mask_[linear(i, j)] = 1;
  n_cells_ = 0;
  for (char m : mask_) n_cells_ += m;
}

bool GridDomain::contains(int i, int j) const {
  if (i < i0_ || i >= i0_ + nx_ || j < j0_ || j >= j0_ + ny_) return false;
  return mask_[linear(i, j)] != 0;
}

std::vector<std::pair<int, int>> GridDomain::cells() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(n_cells_);
  for (int j = j0_; j < j0_ + ny_; ++j)
    for (int i = i0_; i < i0_ + nx_; ++i)
      if (mask_[linear(i, j)]) out.emplace_back(i, j);
  return out;
}

SpinField2D::SpinField2D(GridDomain domain, SystemGeometry geom, std::vector<Site> values)
    : domain_(std::move(domain)), geom_(std::move(geom)) {
  if (static_cast<int>(values.size()) != domain_.cell_count())
    throw std::invalid_argument("field needs one value per domain cell (" +
                                std::to_string(domain_.cell_count()) + ")");
  values_.assign(static_cast<std::size_t>(domain_.nx()) * domain_.ny(), Site{});
  present_.assign(values_.size(), 0);
  std::size_t k = 0;
  for (const auto& [i, j] : domain_.cells()) {
    const Site& s = values[k++];
    if (s.d != 1 && s.d != 2) throw std::invalid_argument("cell circle index must be 1 or 2");
    values_[domain_.linear(i, j)] = s;
    present_[domain_.linear(i, j)] = 1;
  }
}

const Site& SpinField2D::at(int i, int j) const {
  if (!domain_.contains(i, j))
    throw std::domain_error("cell (" + std::to_string(i) + "," + std::to_string(j) +
                            ") is outside the domain");
  return values_[domain_.linear(i, j)];
}

Site& SpinField2D::at(int i, int j) {
  if (!domain_.contains(i, j))
    throw std::domain_error("cell (" + std::to_string(i) + "," + std::to_string(j) +
                            ") is outside the domain");
  return values_[domain_.linear(i, j)];
}

Vec3 SpinField2D::point(int i, int j) const {
  const Site& s = at(i, j);
  return geom_.embed(s.d, s.phi);
}

AnisotropyMap2D anisotropy_map(const SpinField2D& field) {
  AnisotropyMap2D m;
  const GridDomain& dom = field.domain();
  for (const auto& [i, j] : dom.cells()) {
    const int d = field.at(i, j).d;
    if (dom.contains(i + 1, j) && field.at(i + 1, j).d != d) ++m.interface_edge_count;
    if (dom.contains(i, j + 1) && field.at(i, j + 1).d != d) ++m.interface_edge_count;
  }
  const double axis_gap = norm(field.geom().axis(1) - field.geom().axis(2));
  m.total_variation = m.interface_edge_count * dom.lambda() * axis_gap;
  return m;
}

Partition2D partition(const SpinField2D& field) {
  Partition2D part;
  const GridDomain& dom = field.domain();
  std::vector<int> comp(static_cast<std::size_t>(dom.nx()) * dom.ny(), -1);
  const auto cells = dom.cells();
  for (const auto& [si, sj] : cells) {
    if (comp[dom.linear(si, sj)] >= 0) continue;
    const int id = part.M();
    const int d = field.at(si, sj).d;
    Component c;
    c.d = d;
    std::vector<std::pair<int, int>> stack{{si, sj}};
    comp[dom.linear(si, sj)] = id;
    while (!stack.empty()) {
      auto [i, j] = stack.back();
      stack.pop_back();
      c.cells.emplace_back(i, j);
      const std::pair<int, int> nbrs[4] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
      for (const auto& [ni, nj] : nbrs) {
        if (!dom.contains(ni, nj)) continue;
        if (comp[dom.linear(ni, nj)] >= 0) continue;
        if (field.at(ni, nj).d != d) continue;
        comp[dom.linear(ni, nj)] = id;
        stack.emplace_back(ni, nj);
      }
    }
    std::sort(c.cells.begin(), c.cells.end(),
              [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second < b.second : a.first < b.first;
              });
    part.components.push_back(std::move(c));
  }
  return part;
}

void write_field(const SpinField2D& field, std::ostream& os) {
  write_geometry_header(os, "spinwall-field", field.lambda(), field.geom());
  os << " domain=";
  const auto& rects = field.domain().rects();
  for (std::size_t k = 0; k < rects.size(); ++k) {
    if (k) os << ';';
    os << rects[k].i0 << ',' << rects[k].j0 << ',' << rects[k].i1 << ',' << rects[k].j1;
  }
  os << '\n';
  for (const auto& [i, j] : field.domain().cells()) {
    const Site& s = field.at(i, j);
    os << i << ' ' << j << ' ' << s.d << ' ' << fmt17(s.phi) << '\n';
  }
}

SpinField2D read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty field file");
  const ParsedHeader h = parse_geometry_header(line, "spinwall-field");
  // domain= is the only extra header field.
  std::vector<CellRect> rects;
  {
    std::istringstream ss(h.rest);
    std::string word;
    while (ss >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos || word.substr(0, eq) != "domain")
        throw std::runtime_error("unexpected header field: " + word);
      std::string spec = word.substr(eq + 1);
      std::replace(spec.begin(), spec.end(), ';', ' ');
      std::istringstream rs(spec);
      std::string rect;
      while (rs >> rect) {
        CellRect r;
        if (std::sscanf(rect.c_str(), "%d,%d,%d,%d", &r.i0, &r.j0, &r.i1, &r.j1) != 4)
          throw std::runtime_error("bad domain rectangle: " + rect);
        rects.push_back(r);
      }
    }
  }
  if (rects.empty()) throw std::runtime_error("field header is missing domain=");
  GridDomain dom(h.lambda, std::move(rects));
  SystemGeometry geom = SystemGeometry::make(h.v1, h.v2, h.R);

  struct Read {
    Site s;
    bool seen = false;
  };
  std::vector<Read> grid(static_cast<std::size_t>(dom.nx()) * dom.ny());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    int i, j, d;
    double phi;
    if (std::sscanf(line.c_str(), "%d %d %d %lf", &i, &j, &d, &phi) != 4)
      throw std::runtime_error("bad cell line: " + line);
    if (!dom.contains(i, j))
      throw std::runtime_error("cell outside domain: " + std::to_string(i) + "," +
                               std::to_string(j));
    grid[dom.linear(i, j)] = {{d, phi}, true};
  }
  std::vector<Site> values;
  values.reserve(dom.cell_count());
  for (const auto& [i, j] : dom.cells()) {
    const Read& r = grid[dom.linear(i, j)];
    if (!r.seen)
      throw std::runtime_error("missing cell " + std::to_string(i) + "," + std::to_string(j));
    values.push_back(r.s);
  }
  return SpinField2D(std::move(dom), std::move(geom), std::move(values));
}

void write_field_file(const SpinField2D& field, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_field(field, f);
}

SpinField2D read_field_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_field(f);
}

ScalarField2D ScalarField2D::zeros(int i0, int j0, int nx, int ny) {
  ScalarField2D f;
  f.i0 = i0;
  f.j0 = j0;
  f.nx = nx;
  f.ny = ny;
  f.value.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  f.defined.assign(f.value.size(), 0);
  return f;
}

std::pair<ScalarField2D, ScalarField2D> discrete_partials(const ScalarField2D& v, double lambda) {
  ScalarField2D d1 = ScalarField2D::zeros(v.i0, v.j0, v.nx, v.ny);
  ScalarField2D d2 = ScalarField2D::zeros(v.i0, v.j0, v.nx, v.ny);
  for (int j = v.j0; j < v.j0 + v.ny; ++j)
    for (int i = v.i0; i < v.i0 + v.nx; ++i) {
      if (!v.has(i, j)) continue;
      if (v.has(i + 1, j)) d1.set(i, j, (v.at(i + 1, j) - v.at(i, j)) / lambda);
      if (v.has(i, j + 1)) d2.set(i, j, (v.at(i, j + 1) - v.at(i, j)) / lambda);
    }
  return {std::move(d1), std::move(d2)};
}

}  // namespace spinwall
