#pragma once

#include <array>
#include <cstddef>
#include <numbers>

namespace dhflow::geometry {

/// Boundary condition of spinors along one torus generator.
enum class SpinBoundary { Periodic, Antiperiodic };

/// A spin structure on the flat 2-torus, one flag per generator.
struct SpinStructure {
  std::array<SpinBoundary, 2> boundary{SpinBoundary::Periodic, SpinBoundary::Periodic};

  /// Half-integer frequency shift (0 or 1/2) along direction `dir`.
  double shift(int dir) const {
    return boundary[dir] == SpinBoundary::Antiperiodic ? 0.5 : 0.0;
  }
  static SpinStructure trivial() { return {}; }
  static SpinStructure antiperiodic() {
    return {{SpinBoundary::Antiperiodic, SpinBoundary::Antiperiodic}};
  }
  bool operator==(const SpinStructure&) const = default;
};

/// Uniform grid on the flat torus [0,L1) x [0,L2).
///
/// Nodes are numbered row-major: node(i, j) = i * n2 + j, where i runs along
/// the first generator. Both resolutions must be even and at least 4.
class TorusDomain {
 public:
  TorusDomain(int n1, int n2, double L1 = 2.0 * std::numbers::pi,
              double L2 = 2.0 * std::numbers::pi,
              SpinStructure spin = SpinStructure::trivial());

  static TorusDomain square(int n, SpinStructure spin = SpinStructure::trivial()) {
    return TorusDomain(n, n, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi, spin);
  }

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int resolution(int dir) const { return dir == 0 ? n1_ : n2_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  double length(int dir) const { return dir == 0 ? L1_ : L2_; }
  double spacing(int dir) const { return length(dir) / resolution(dir); }
  const SpinStructure& spin() const { return spin_; }

  std::size_t nodes() const { return static_cast<std::size_t>(n1_) * n2_; }
  std::size_t node(int i, int j) const {
    return static_cast<std::size_t>(i) * n2_ + j;
  }
  double x(int i) const { return i * spacing(0); }
  double y(int j) const { return j * spacing(1); }

  /// Quadrature weight of every node: L1 L2 / (n1 n2).
  double cell_area() const { return L1_ * L2_ / static_cast<double>(nodes()); }
  double area() const { return L1_ * L2_; }

  /// Flat distance between two nodes, taking the shortest image on the torus.
  double torus_distance(std::size_t a, std::size_t b) const;

  /// Same grid, different spin structure.
  TorusDomain with_spin(SpinStructure spin) const {
    return TorusDomain(n1_, n2_, L1_, L2_, spin);
  }

  bool operator==(const TorusDomain&) const = default;

 private:
  int n1_;
  int n2_;
  double L1_;
  double L2_;
  SpinStructure spin_;
};

}  // namespace dhflow::geometry
