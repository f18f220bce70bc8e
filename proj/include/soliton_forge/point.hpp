#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sforge {

/// Coordinates (x^1..x^n; x^{n+1}..x^{2n}; t) of a point in a chart.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept { return coords_; }

  /// p + s * direction, componentwise.
  Point displaced(std::span<const double> direction, double s) const {
    std::vector<double> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += s * direction[i];
    return Point(std::move(c));
  }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

}  // namespace sforge
