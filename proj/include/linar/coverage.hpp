#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "linar/geometry.hpp"
#include "linar/graph.hpp"

namespace linar {

/// Support degree of u: for every neighbour v add the number of u's
/// neighbours not adjacent to v (d_u minus common neighbours), then divide by k.
/// Higher values mean the node's sensing disk is more redundantly covered.
inline double support_degree(const Graph& g, NodeId u, int k) {
  if (k < 1) throw std::domain_error("support_degree: k must be >= 1");
  auto nu = g.neighbors(u);
  const long du = static_cast<long>(nu.size());
  long sum = 0;
  for (NodeId v : nu) {
    auto nv = g.neighbors(v);
    long common = 0;
    auto a = nu.begin();
    auto b = nv.begin();
    while (a != nu.end() && b != nv.end()) {
      if (*a < *b)
        ++a;
      else if (*b < *a)
        ++b;
      else {
        ++common;
        ++a;
        ++b;
      }
    }
    sum += du - common;
  }
  return static_cast<double>(sum) / k;
}

/// Union of sensing disks rasterised on the field's global sample grid.
/// Cell (i,j) is covered when its centre ((i+.5)res, (j+.5)res) lies in a disk.
class CoverageRaster {
 public:
  CoverageRaster(const std::vector<Position>& centers, double radius, FieldSize field, double resolution)
      : res_(resolution) {
    if (!(resolution > 0)) throw std::domain_error("coverage: resolution must be positive");
    const long max_i = static_cast<long>(std::ceil(field.width / res_));
    const long max_j = static_cast<long>(std::ceil(field.height / res_));
    auto col_of = [&](double x) { return static_cast<long>(std::floor(x / res_ - 0.5)); };
    if (centers.empty()) return;
    double lo_x = centers[0].x, hi_x = lo_x, lo_y = centers[0].y, hi_y = lo_y;
    for (const auto& c : centers) {
      lo_x = std::min(lo_x, c.x);
      hi_x = std::max(hi_x, c.x);
      lo_y = std::min(lo_y, c.y);
      hi_y = std::max(hi_y, c.y);
    }
    i0_ = std::clamp(col_of(lo_x - radius), 0L, max_i);
    j0_ = std::clamp(col_of(lo_y - radius), 0L, max_j);
    const long i1 = std::clamp(col_of(hi_x + radius) + 2, 0L, max_i);
    const long j1 = std::clamp(col_of(hi_y + radius) + 2, 0L, max_j);
    cols_ = std::max(0L, i1 - i0_);
    rows_ = std::max(0L, j1 - j0_);
    bits_.assign(static_cast<std::size_t>(cols_ * rows_), 0);
    const double r2 = radius * radius;
    for (const auto& c : centers) {
      const long ja = std::max(j0_, col_of(c.y - radius));
      const long jb = std::min(j0_ + rows_ - 1, col_of(c.y + radius) + 1);
      for (long j = ja; j <= jb; ++j) {
        const double cy = (j + 0.5) * res_;
        if (cy > field.height) continue;
        const double dy = cy - c.y;
        const double rem = r2 - dy * dy;
        if (rem < 0) continue;
        const double half = std::sqrt(rem);
        long ia = std::max(i0_, static_cast<long>(std::ceil((c.x - half) / res_ - 0.5)));
        long ib = std::min(i0_ + cols_ - 1, static_cast<long>(std::floor((c.x + half) / res_ - 0.5)));
        for (long i = ia; i <= ib; ++i) {
          const double cx = (i + 0.5) * res_;
          if (cx > field.width) break;
          const double dx = cx - c.x;
          if (dx * dx + dy * dy <= r2) bits_[static_cast<std::size_t>((j - j0_) * cols_ + (i - i0_))] = 1;
        }
      }
    }
  }

  bool covered(long i, long j) const {
    if (i < i0_ || j < j0_ || i >= i0_ + cols_ || j >= j0_ + rows_) return false;
    return bits_[static_cast<std::size_t>((j - j0_) * cols_ + (i - i0_))] != 0;
  }

  std::uint64_t count() const { return static_cast<std::uint64_t>(std::count(bits_.begin(), bits_.end(), 1)); }

  std::uint64_t count_common(const CoverageRaster& other) const {
    std::uint64_t c = 0;
    for (long j = j0_; j < j0_ + rows_; ++j)
      for (long i = i0_; i < i0_ + cols_; ++i)
        if (bits_[static_cast<std::size_t>((j - j0_) * cols_ + (i - i0_))] && other.covered(i, j)) ++c;
    return c;
  }

  double cell_area() const { return res_ * res_; }

 private:
  double res_;
  long i0_ = 0, j0_ = 0, cols_ = 0, rows_ = 0;
  std::vector<std::uint8_t> bits_;
};

inline double default_resolution(FieldSize field) { return field.width / 2000.0; }

/// Area of (union of disks) ∩ field by grid-centre sampling.
inline double covered_area(const std::vector<Position>& positions, double sensing_range, FieldSize field,
                           double resolution) {
  if (positions.empty()) return 0.0;
  CoverageRaster r(positions, sensing_range, field, resolution);
  return static_cast<double>(r.count()) * r.cell_area();
}

struct CoverageReport {
  double initial_area = 0;
  double current_area = 0;
  double retained_area = 0;  // part of the initial union still covered
  double primary_loss_pct = 0;
  double general_loss_pct = 0;
  double resolution = 0;
};

class UndefinedLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Primary loss: share of the initially covered region no longer covered.
/// General loss: net change of total covered area (new ground counts).
inline CoverageReport coverage_losses(const std::vector<Position>& before, const std::vector<Position>& after,
                                      FieldSize field, double sensing_range, double resolution) {
  CoverageRaster rb(before, sensing_range, field, resolution);
  CoverageRaster ra(after, sensing_range, field, resolution);
  const auto nb = rb.count();
  if (nb == 0) throw UndefinedLossError("coverage_losses: initial covered area is zero");
  const auto na = ra.count();
  const auto common = rb.count_common(ra);
  CoverageReport rep;
  rep.resolution = resolution;
  rep.initial_area = static_cast<double>(nb) * rb.cell_area();
  rep.current_area = static_cast<double>(na) * rb.cell_area();
  rep.retained_area = static_cast<double>(common) * rb.cell_area();
  rep.primary_loss_pct = (1.0 - static_cast<double>(common) / static_cast<double>(nb)) * 100.0;
  rep.general_loss_pct = (1.0 - static_cast<double>(na) / static_cast<double>(nb)) * 100.0;
  return rep;
}

}  // namespace linar
