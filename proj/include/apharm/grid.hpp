#pragma once

#include <span>
#include <vector>

#include "apharm/error.hpp"

namespace apharm {

struct Axis {
  double lo = 0;
  double h = 1;
  long count = 1;

  double at(long i) const { return lo + static_cast<double>(i) * h; }
  double hi() const { return at(count - 1); }
};

/// Uniform tensor grid, row-major with axis 0 slowest.
struct Grid {
  std::vector<Axis> axes;

  Grid() = default;
  explicit Grid(std::vector<Axis> a) : axes(std::move(a)) {
    require(!axes.empty(), "Grid: at least one axis");
    for (const auto& ax : axes) require(ax.count > 0 && ax.h > 0, "Grid: positive counts and spacing");
  }
  /// count nodes from lo to hi inclusive (hi - lo must be a multiple of h up to rounding)
  static Axis axis(double lo, double hi, double h) {
    require(hi >= lo && h > 0, "Grid::axis: bad range");
    const long n = static_cast<long>((hi - lo) / h + 0.5) + 1;
    return {lo, h, n};
  }

  int dim() const { return static_cast<int>(axes.size()); }
  long size() const {
    long s = 1;
    for (const auto& a : axes) s *= a.count;
    return s;
  }
  std::vector<long> index(long flat) const {
    std::vector<long> idx(axes.size());
    for (int j = dim() - 1; j >= 0; --j) {
      idx[j] = flat % axes[j].count;
      flat /= axes[j].count;
    }
    return idx;
  }
  long flat(std::span<const long> idx) const {
    long f = 0;
    for (int j = 0; j < dim(); ++j) f = f * axes[j].count + idx[j];
    return f;
  }
  std::vector<double> point(long flat_index) const {
    const auto idx = index(flat_index);
    std::vector<double> p(axes.size());
    for (int j = 0; j < dim(); ++j) p[j] = axes[j].at(idx[j]);
    return p;
  }
  long stride(int axis) const {
    long s = 1;
    for (int j = dim() - 1; j > axis; --j) s *= axes[j].count;
    return s;
  }
};

/// Axis-aligned box [lo, hi); lo == hi on every axis marks an atom.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  bool contains(std::span<const double> p) const {
    for (std::size_t j = 0; j < lo.size(); ++j)
      if (!(p[j] >= lo[j] && p[j] < hi[j])) return false;
    return true;
  }
  bool is_atom() const { return lo == hi; }
  double volume() const {
    double v = 1;
    for (std::size_t j = 0; j < lo.size(); ++j) v *= hi[j] - lo[j];
    return v;
  }
};

}  // namespace apharm
