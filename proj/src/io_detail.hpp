#pragma once

#include <iosfwd>
#include <string>

#include "spinwall/geometry.hpp"

namespace spinwall {

std::string fmt17(double v);

void write_geometry_header(std::ostream& os, const char* magic, double lambda,
                           const SystemGeometry& geom);

struct ParsedHeader {
  double lambda = 0.0;
  double R = 0.0;
  Vec3 v1, v2;
  std::string rest;  // unrecognized key=value fields, space separated
};

ParsedHeader parse_geometry_header(const std::string& line, const char* magic);

}  // namespace spinwall
