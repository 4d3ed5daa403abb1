#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace fbreg {

/// Samples of a scalar field on a uniform grid.
///
/// Spatial grids have axes x_1..x_n. Space-time grids carry the time axis
/// first (axis 0) followed by the spatial axes, so every time level is one
/// contiguous row-major block. All spatial axes share the spacing h; the
/// time axis uses dt. `s` is the operator order that fixes the parabolic
/// scaling t ~ r^{2s} used by cylinder queries.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<std::size_t> extents, double h, double dt,
               std::vector<double> origin, double s, std::vector<double> values);

  static GridFunction spatial(std::vector<std::size_t> extents, double h,
                              std::vector<double> origin, double s);
  static GridFunction space_time(std::size_t time_levels,
                                 std::vector<std::size_t> spatial_extents, double h,
                                 double dt, std::vector<double> spatial_origin, double t0,
                                 double s);

  bool has_time() const noexcept { return dt_ > 0.0; }
  std::size_t axis_count() const noexcept { return extents_.size(); }
  int spatial_dim() const noexcept {
    return static_cast<int>(extents_.size()) - (has_time() ? 1 : 0);
  }
  const std::vector<std::size_t>& extents() const noexcept { return extents_; }
  std::vector<std::size_t> spatial_extents() const;
  std::size_t time_levels() const noexcept { return has_time() ? extents_[0] : 1; }
  std::size_t slice_size() const noexcept { return values_.size() / time_levels(); }
  double h() const noexcept { return h_; }
  double dt() const noexcept { return dt_; }
  double s() const noexcept { return s_; }
  const std::vector<double>& origin() const noexcept { return origin_; }
  std::vector<double> spatial_origin() const;
  double time_at(std::size_t level) const;
  double spacing(std::size_t axis) const;

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::size_t flat(std::span<const std::size_t> index) const;
  void unflatten(std::size_t flat, std::span<std::size_t> index) const;
  /// Physical coordinates of a node, time first for space-time grids.
  std::vector<double> coordinates(std::size_t flat) const;
  /// Spatial coordinates of the node with spatial flat index `i`.
  std::vector<double> spatial_coordinates(std::size_t i) const;

  std::span<const double> slice(std::size_t level) const;
  std::span<double> slice(std::size_t level);
  /// Spatial grid holding one time level.
  GridFunction time_slice(std::size_t level) const;

  /// Nodes strictly inside the parabolic cylinder
  /// B_r(x0) x (t0 - r^{2s}, t0 + r^{2s}] (time part ignored for spatial grids).
  std::vector<std::size_t> cylinder_nodes(std::span<const double> center, double r) const;
  /// Inclusive index range [lo, hi] per axis bounding the cylinder; empty range
  /// has lo > hi.
  std::vector<std::pair<long, long>> cylinder_bounds(std::span<const double> center,
                                                     double r) const;
  /// True when the closed cylinder lies inside the physical box.
  bool contains_cylinder(std::span<const double> center, double r) const;

  /// Multilinear interpolation; `point` uses the axis order of the grid.
  double interpolate(std::span<const double> point) const;

  /// Throws if any value is not finite or the shape is inconsistent.
  void validate() const;

 private:
  std::vector<std::size_t> extents_;
  std::vector<std::size_t> strides_;
  double h_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> origin_;
  double s_ = 0.5;
  std::vector<double> values_;

  void compute_strides();
};

/// Binary grid format: "FBRG1", u8 axis count, u64 extents, f64 h, f64 dt
/// (0 for spatial grids), f64 origin per axis, f64 s, f64 values row-major.
/// All numbers little-endian.
void write_grid(const std::filesystem::path& path, const GridFunction& grid);
GridFunction read_grid(const std::filesystem::path& path);
std::vector<unsigned char> encode_grid(const GridFunction& grid);
GridFunction decode_grid(std::span<const unsigned char> bytes);

}  // namespace fbreg
