#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "fbreg/error.hpp"
#include "fbreg/grid.hpp"

using namespace fbreg;

namespace {

GridFunction ramp2d() {
  GridFunction g = GridFunction::spatial({5, 4}, 0.25, {-0.5, 1.0}, 0.75);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coordinates(i);
    g[i] = 2.0 * x[0] - 3.0 * x[1] + 0.5;
  }
  return g;
}

}  // namespace

TEST(Grid, CoordinatesFollowRowMajorOrder) {
  const GridFunction g = ramp2d();
  const std::size_t idx[2] = {3, 2};
  const auto x = g.coordinates(g.flat(idx));
  EXPECT_DOUBLE_EQ(x[0], -0.5 + 3 * 0.25);
  EXPECT_DOUBLE_EQ(x[1], 1.0 + 2 * 0.25);
  EXPECT_EQ(g.flat(idx), 3u * 4u + 2u);
}

TEST(Grid, InterpolationIsExactOnAffineData) {
  const GridFunction g = ramp2d();
  const double p[2] = {0.13, 1.61};
  EXPECT_NEAR(g.interpolate(p), 2.0 * 0.13 - 3.0 * 1.61 + 0.5, 1e-13);
}

TEST(Grid, SpaceTimeLevelsAreContiguous) {
  GridFunction g = GridFunction::space_time(3, {4}, 0.5, 0.1, {-1.0}, 0.2, 0.5);
  EXPECT_TRUE(g.has_time());
  EXPECT_EQ(g.slice_size(), 4u);
  EXPECT_DOUBLE_EQ(g.time_at(2), 0.4);
  g.slice(1)[2] = 7.0;
  const std::size_t idx[2] = {1, 2};
  EXPECT_EQ(g[g.flat(idx)], 7.0);
  EXPECT_EQ(g.time_slice(1)[2], 7.0);
}

TEST(Grid, CylinderNodesRespectParabolicScaling) {
  const GridFunction g = GridFunction::space_time(41, {41}, 0.05, 0.025, {-1.0}, 0.0, 0.5);
  const double c[2] = {0.5, 0.0};
  const double r = 0.2;
  for (std::size_t i : g.cylinder_nodes(c, r)) {
    const auto p = g.coordinates(i);
    EXPECT_LT(std::abs(p[1]), r);
    EXPECT_GT(p[0], 0.5 - r);
    EXPECT_LE(p[0], 0.5 + r + 1e-12);
  }
}

TEST(Grid, BinaryRoundTripAndLayout) {
  const GridFunction g = ramp2d();
  const auto bytes = encode_grid(g);
  ASSERT_GE(bytes.size(), 6u);
  EXPECT_EQ(std::memcmp(bytes.data(), "FBRG1", 5), 0);
  EXPECT_EQ(bytes[5], 2);
  // magic, axis count, 2 extents, h, dt, 2 origin coords, s, values
  EXPECT_EQ(bytes.size(), 5u + 1u + 2 * 8u + 8u + 8u + 2 * 8u + 8u + g.size() * 8u);
  std::uint64_t e0 = 0;
  for (int b = 7; b >= 0; --b) e0 = (e0 << 8) | bytes[6 + static_cast<std::size_t>(b)];
  EXPECT_EQ(e0, 5u);

  const GridFunction back = decode_grid(bytes);
  EXPECT_EQ(back.extents(), g.extents());
  EXPECT_EQ(back.h(), g.h());
  EXPECT_EQ(back.s(), g.s());
  EXPECT_EQ(back.origin(), g.origin());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back[i], g[i]);

  const auto path = std::filesystem::temp_directory_path() / "fbreg_grid_roundtrip.fbrg";
  write_grid(path, g);
  const GridFunction file = read_grid(path);
  EXPECT_EQ(encode_grid(file), bytes);
  std::filesystem::remove(path);
}

TEST(Grid, CorruptBytesAreRejected) {
  auto bytes = encode_grid(ramp2d());
  bytes[0] = 'X';
  EXPECT_THROW(decode_grid(bytes), Error);
  auto truncated = encode_grid(ramp2d());
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(decode_grid(truncated), Error);
}
