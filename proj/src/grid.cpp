#include "fbreg/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fbreg/error.hpp"

namespace fbreg {

namespace {

constexpr char kMagic[5] = {'F', 'B', 'R', 'G', '1'};

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::vector<unsigned char>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  unsigned char u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void expect_magic() {
    need(sizeof(kMagic));
    if (std::memcmp(bytes_.data(), kMagic, sizeof(kMagic)) != 0)
      fail(Module::OperatorCore, ErrorCode::Io, "grid file: bad magic");
    pos_ += sizeof(kMagic);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size())
      fail(Module::OperatorCore, ErrorCode::Io, "grid file: truncated");
  }
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GridFunction::GridFunction(std::vector<std::size_t> extents, double h, double dt,
                           std::vector<double> origin, double s, std::vector<double> values)
    : extents_(std::move(extents)),
      h_(h),
      dt_(dt),
      origin_(std::move(origin)),
      s_(s),
      values_(std::move(values)) {
  require(!extents_.empty(), Module::OperatorCore, ErrorCode::InvalidArgument,
          "grid needs at least one axis");
  require(origin_.size() == extents_.size(), Module::OperatorCore,
          ErrorCode::InvalidArgument, "origin must have one coordinate per axis");
  require(h_ > 0.0 && std::isfinite(h_), Module::OperatorCore, ErrorCode::InvalidArgument,
          "spacing h must be positive");
  require(dt_ >= 0.0 && std::isfinite(dt_), Module::OperatorCore,
          ErrorCode::InvalidArgument, "time spacing must be >= 0");
  require(!(has_time() && extents_.size() < 2), Module::OperatorCore,
          ErrorCode::InvalidArgument, "space-time grid needs a spatial axis");
  std::size_t total = 1;
  for (auto e : extents_) {
    require(e > 0, Module::OperatorCore, ErrorCode::InvalidArgument, "zero extent");
    total *= e;
  }
  require(values_.size() == total, Module::OperatorCore, ErrorCode::InvalidArgument,
          "value count does not match extents");
  compute_strides();
}

GridFunction GridFunction::spatial(std::vector<std::size_t> extents, double h,
                                   std::vector<double> origin, double s) {
  std::size_t total = 1;
  for (auto e : extents) total *= e;
  return GridFunction(std::move(extents), h, 0.0, std::move(origin), s,
                      std::vector<double>(total, 0.0));
}

GridFunction GridFunction::space_time(std::size_t time_levels,
                                      std::vector<std::size_t> spatial_extents, double h,
                                      double dt, std::vector<double> spatial_origin, double t0,
                                      double s) {
  require(dt > 0.0, Module::OperatorCore, ErrorCode::InvalidArgument,
          "space-time grid needs dt > 0");
  std::vector<std::size_t> extents{time_levels};
  extents.insert(extents.end(), spatial_extents.begin(), spatial_extents.end());
  std::vector<double> origin{t0};
  origin.insert(origin.end(), spatial_origin.begin(), spatial_origin.end());
  std::size_t total = 1;
  for (auto e : extents) total *= e;
  return GridFunction(std::move(extents), h, dt, std::move(origin), s,
                      std::vector<double>(total, 0.0));
}

void GridFunction::compute_strides() {
  strides_.assign(extents_.size(), 1);
  for (std::size_t a = extents_.size(); a-- > 1;) strides_[a - 1] = strides_[a] * extents_[a];
}

std::vector<std::size_t> GridFunction::spatial_extents() const {
  return {extents_.begin() + (has_time() ? 1 : 0), extents_.end()};
}

std::vector<double> GridFunction::spatial_origin() const {
  return {origin_.begin() + (has_time() ? 1 : 0), origin_.end()};
}

double GridFunction::time_at(std::size_t level) const {
  return has_time() ? origin_[0] + static_cast<double>(level) * dt_ : 0.0;
}

double GridFunction::spacing(std::size_t axis) const {
  return (has_time() && axis == 0) ? dt_ : h_;
}

std::size_t GridFunction::flat(std::span<const std::size_t> index) const {
  std::size_t f = 0;
  for (std::size_t a = 0; a < extents_.size(); ++a) f += index[a] * strides_[a];
  return f;
}

void GridFunction::unflatten(std::size_t flat, std::span<std::size_t> index) const {
  for (std::size_t a = 0; a < extents_.size(); ++a) {
    index[a] = flat / strides_[a];
    flat %= strides_[a];
  }
}

std::vector<double> GridFunction::coordinates(std::size_t flat) const {
  std::vector<double> x(extents_.size());
  for (std::size_t a = 0; a < extents_.size(); ++a) {
    const std::size_t i = flat / strides_[a];
    flat %= strides_[a];
    x[a] = origin_[a] + static_cast<double>(i) * spacing(a);
  }
  return x;
}

std::vector<double> GridFunction::spatial_coordinates(std::size_t i) const {
  const std::size_t first = has_time() ? 1 : 0;
  std::vector<double> x(extents_.size() - first);
  for (std::size_t a = first; a < extents_.size(); ++a) {
    const std::size_t k = i / strides_[a];
    i %= strides_[a];
    x[a - first] = origin_[a] + static_cast<double>(k) * h_;
  }
  return x;
}

std::span<const double> GridFunction::slice(std::size_t level) const {
  const std::size_t n = slice_size();
  return std::span<const double>(values_).subspan(level * n, n);
}

std::span<double> GridFunction::slice(std::size_t level) {
  const std::size_t n = slice_size();
  return std::span<double>(values_).subspan(level * n, n);
}

GridFunction GridFunction::time_slice(std::size_t level) const {
  require(level < time_levels(), Module::OperatorCore, ErrorCode::InvalidArgument,
          "time level out of range");
  auto values = slice(level);
  return GridFunction(spatial_extents(), h_, 0.0, spatial_origin(), s_,
                      std::vector<double>(values.begin(), values.end()));
}

std::vector<std::pair<long, long>> GridFunction::cylinder_bounds(
    std::span<const double> center, double r) const {
  require(center.size() == extents_.size(), Module::OperatorCore,
          ErrorCode::InvalidArgument, "cylinder center has wrong dimension");
  std::vector<std::pair<long, long>> bounds(extents_.size());
  for (std::size_t a = 0; a < extents_.size(); ++a) {
    const double d = spacing(a);
    const long last = static_cast<long>(extents_[a]) - 1;
    long lo = 0;
    long hi = 0;
    if (has_time() && a == 0) {
      // (t0 - r^{2s}, t0 + r^{2s}]
      const double half = std::pow(r, 2.0 * s_);
      const double a0 = (center[0] - half - origin_[0]) / d;
      const double b0 = (center[0] + half - origin_[0]) / d;
      lo = static_cast<long>(std::floor(a0)) + 1;
      hi = static_cast<long>(std::floor(b0 + 1e-12));
    } else {
      const double a0 = (center[a] - r - origin_[a]) / d;
      const double b0 = (center[a] + r - origin_[a]) / d;
      lo = static_cast<long>(std::floor(a0)) + 1;
      hi = static_cast<long>(std::ceil(b0)) - 1;
    }
    bounds[a] = {std::max(lo, 0L), std::min(hi, last)};
  }
  return bounds;
}

std::vector<std::size_t> GridFunction::cylinder_nodes(std::span<const double> center,
                                                      double r) const {
  const auto bounds = cylinder_bounds(center, r);
  std::vector<std::size_t> nodes;
  for (const auto& [lo, hi] : bounds)
    if (lo > hi) return nodes;
  const std::size_t first = has_time() ? 1 : 0;
  std::vector<long> idx(extents_.size());
  for (std::size_t a = 0; a < idx.size(); ++a) idx[a] = bounds[a].first;
  while (true) {
    double dist2 = 0.0;
    for (std::size_t a = first; a < idx.size(); ++a) {
      const double x = origin_[a] + static_cast<double>(idx[a]) * h_ - center[a];
      dist2 += x * x;
    }
    if (dist2 < r * r) {
      std::size_t f = 0;
      for (std::size_t a = 0; a < idx.size(); ++a)
        f += static_cast<std::size_t>(idx[a]) * strides_[a];
      nodes.push_back(f);
    }
    std::size_t a = idx.size();
    while (a-- > 0) {
      if (++idx[a] <= bounds[a].second) break;
      idx[a] = bounds[a].first;
      if (a == 0) return nodes;
    }
  }
}

bool GridFunction::contains_cylinder(std::span<const double> center, double r) const {
  for (std::size_t a = 0; a < extents_.size(); ++a) {
    const double lo = origin_[a];
    const double hi = origin_[a] + static_cast<double>(extents_[a] - 1) * spacing(a);
    const double half = (has_time() && a == 0) ? std::pow(r, 2.0 * s_) : r;
    const double eps = 1e-12 * std::max(1.0, std::abs(hi - lo));
    if (center[a] - half < lo - eps || center[a] + half > hi + eps) return false;
  }
  return true;
}

double GridFunction::interpolate(std::span<const double> point) const {
  require(point.size() == extents_.size(), Module::OperatorCore,
          ErrorCode::InvalidArgument, "interpolation point has wrong dimension");
  const std::size_t d = extents_.size();
  std::vector<std::size_t> base(d);
  std::vector<double> frac(d);
  for (std::size_t a = 0; a < d; ++a) {
    const double u = (point[a] - origin_[a]) / spacing(a);
    const double last = static_cast<double>(extents_[a] - 1);
    require(u >= -1e-9 && u <= last + 1e-9, Module::OperatorCore,
            ErrorCode::InvalidArgument, "interpolation point outside the grid");
    const double clamped = std::clamp(u, 0.0, last);
    std::size_t i = static_cast<std::size_t>(std::floor(clamped));
    if (extents_[a] == 1) {
      base[a] = 0;
      frac[a] = 0.0;
      continue;
    }
    if (i >= extents_[a] - 1) i = extents_[a] - 2;
    base[a] = i;
    frac[a] = clamped - static_cast<double>(i);
  }
  double acc = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double w = 1.0;
    std::size_t f = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool up = (corner >> a) & 1u;
      if (up && extents_[a] == 1) {
        w = 0.0;
        break;
      }
      w *= up ? frac[a] : 1.0 - frac[a];
      f += (base[a] + (up ? 1 : 0)) * strides_[a];
    }
    if (w != 0.0) acc += w * values_[f];
  }
  return acc;
}

void GridFunction::validate() const {
  for (double v : values_)
    require(std::isfinite(v), Module::OperatorCore, ErrorCode::InvalidArgument,
            "grid function has a non-finite value");
}

std::vector<unsigned char> encode_grid(const GridFunction& grid) {
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(static_cast<unsigned char>(grid.axis_count()));
  for (auto e : grid.extents()) put_u64(out, e);
  put_f64(out, grid.h());
  put_f64(out, grid.dt());
  for (double o : grid.origin()) put_f64(out, o);
  put_f64(out, grid.s());
  out.reserve(out.size() + 8 * grid.size());
  for (double v : grid.values()) put_f64(out, v);
  return out;
}

GridFunction decode_grid(std::span<const unsigned char> bytes) {
  Reader in(bytes);
  in.expect_magic();
  const std::size_t axes = in.u8();
  require(axes >= 1 && axes <= 8, Module::OperatorCore, ErrorCode::Io,
          "grid file: bad axis count");
  std::vector<std::size_t> extents(axes);
  std::size_t total = 1;
  for (auto& e : extents) {
    e = static_cast<std::size_t>(in.u64());
    require(e > 0 && e < (std::size_t{1} << 32), Module::OperatorCore, ErrorCode::Io,
            "grid file: bad extent");
    total *= e;
  }
  const double h = in.f64();
  const double dt = in.f64();
  std::vector<double> origin(axes);
  for (auto& o : origin) o = in.f64();
  const double s = in.f64();
  require(total <= (bytes.size() / 8), Module::OperatorCore, ErrorCode::Io,
          "grid file: truncated values");
  std::vector<double> values(total);
  for (auto& v : values) v = in.f64();
  require(in.done(), Module::OperatorCore, ErrorCode::Io, "grid file: trailing bytes");
  return GridFunction(std::move(extents), h, dt, std::move(origin), s, std::move(values));
}

void write_grid(const std::filesystem::path& path, const GridFunction& grid) {
  const auto bytes = encode_grid(grid);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), Module::OperatorCore, ErrorCode::Io,
          "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), Module::OperatorCore, ErrorCode::Io,
          "write failed: " + path.string());
}

GridFunction read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Module::OperatorCore, ErrorCode::Io,
          "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

}  // namespace fbreg
