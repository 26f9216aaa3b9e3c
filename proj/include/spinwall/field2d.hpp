#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spinwall/chain.hpp"
#include "spinwall/geometry.hpp"

namespace spinwall {

// Axis-aligned rectangle in cell-index units: cells (i,j) with
// i0 <= i < i1 and j0 <= j < j1.
struct CellRect {
  int i0 = 0, j0 = 0, i1 = 0, j1 = 0;
};

// A finite union of grid-aligned rectangles, represented as the set of lattice
// cells it covers. Cell (i,j) is the square lambda*[i,i+1] x [j,j+1].
class GridDomain {
 public:
  GridDomain(double lambda, std::vector<CellRect> rects);

  double lambda() const { return lambda_; }
  const std::vector<CellRect>& rects() const { return rects_; }
  bool contains(int i, int j) const;
  int cell_count() const { return n_cells_; }
  // Bounding box of the covered cells.
  int i0() const { return i0_; }
  int j0() const { return j0_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int linear(int i, int j) const { return (j - j0_) * nx_ + (i - i0_); }

  std::vector<std::pair<int, int>> cells() const;

 private:
  double lambda_;
  std::vector<CellRect> rects_;
  int i0_ = 0, j0_ = 0, nx_ = 0, ny_ = 0;
  int n_cells_ = 0;
  std::vector<char> mask_;
};

class SpinField2D {
 public:
  SpinField2D(GridDomain domain, SystemGeometry geom, std::vector<Site> values);

  const GridDomain& domain() const { return domain_; }
  const SystemGeometry& geom() const { return geom_; }
  double lambda() const { return domain_.lambda(); }

  const Site& at(int i, int j) const;
  Site& at(int i, int j);
  Vec3 point(int i, int j) const;

  // Values in domain-cell order (the order of domain().cells()).
  const std::vector<Site>& values() const { return values_; }
  std::vector<Site>& values() { return values_; }

 private:
  GridDomain domain_;
  SystemGeometry geom_;
  std::vector<Site> values_;        // dense over the bounding box
  std::vector<char> present_;
};

struct AnisotropyMap2D {
  int interface_edge_count = 0;     // in-domain edges with differing labels
  double total_variation = 0.0;     // edge_count * lambda * |v1 - v2|
};

AnisotropyMap2D anisotropy_map(const SpinField2D& field);

struct Component {
  int d = 1;
  std::vector<std::pair<int, int>> cells;  // sorted (j, i) scan order
};

struct Partition2D {
  std::vector<Component> components;
  int M() const { return static_cast<int>(components.size()); }
};

// Connected components of constant circle index under edge adjacency.
Partition2D partition(const SpinField2D& field);

// Text format:
//   spinwall-field v1 lambda=<l> R=<R> v1=<..> v2=<..> domain=<i0,j0,i1,j1[;...]>
//   <i> <j> <d> <phi>
void write_field(const SpinField2D& field, std::ostream& os);
SpinField2D read_field(std::istream& is);
void write_field_file(const SpinField2D& field, const std::string& path);
SpinField2D read_field_file(const std::string& path);

// Scalar lattice field over a bounding box with a validity mask; used for
// discrete partial derivatives and chirality parameters.
struct ScalarField2D {
  int i0 = 0, j0 = 0, nx = 0, ny = 0;
  std::vector<double> value;
  std::vector<char> defined;

  static ScalarField2D zeros(int i0, int j0, int nx, int ny);
  bool has(int i, int j) const {
    return i >= i0 && i < i0 + nx && j >= j0 && j < j0 + ny && defined[(j - j0) * nx + (i - i0)];
  }
  double at(int i, int j) const { return value[(j - j0) * nx + (i - i0)]; }
  void set(int i, int j, double v) {
    value[(j - j0) * nx + (i - i0)] = v;
    defined[(j - j0) * nx + (i - i0)] = 1;
  }
};

// Forward differences (v(i+1,j)-v(i,j))/lambda and (v(i,j+1)-v(i,j))/lambda,
// defined where both samples are.
std::pair<ScalarField2D, ScalarField2D> discrete_partials(const ScalarField2D& v, double lambda);

}  // namespace spinwall
