#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dhflow/geometry/fields.hpp"

namespace dhtest {

using dhflow::geometry::MapField;
using dhflow::geometry::TorusDomain;

/// u = (r cos kx, r sin kx, h, 0) into the unit S^3.
inline MapField latitude_map(const TorusDomain& d, int k, double h) {
  MapField u(d, 4);
  const double r = std::sqrt(1.0 - h * h);
  for (int i = 0; i < d.n1(); ++i)
    for (int j = 0; j < d.n2(); ++j) {
      double* v = u.at(d.node(i, j));
      v[0] = r * std::cos(k * d.x(i));
      v[1] = r * std::sin(k * d.x(i));
      v[2] = h;
      v[3] = 0.0;
    }
  return u;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("dhflow_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dhtest
