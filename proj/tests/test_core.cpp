#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "geoscout/core.hpp"
#include "geoscout/geometry.hpp"
#include "geoscout/image.hpp"
#include "geoscout/rng.hpp"
#include "support.hpp"

using namespace geoscout;

TEST_CASE("box and grid invariants") {
  CHECK_THROWS_AS(BBox(0.5, 0.1, 0.5, 0.2), InvalidArgument);
  CHECK_THROWS_AS(BBox(-0.1, 0.1, 0.5, 0.2), InvalidArgument);
  CHECK_THROWS_AS(BBox(0.1, 0.1, 1.2, 0.2), InvalidArgument);
  CHECK_NOTHROW(BBox(0, 0, 1, 1));
  CHECK_THROWS_AS(GridSpec(1, 1), InvalidArgument);
  CHECK_THROWS_AS(GridSpec(0, 4), InvalidArgument);
  CHECK(GridSpec(4, 2).str() == "4x2");
  CHECK_THROWS_AS(Permutation({0, 0, 1}), InvalidArgument);
  CHECK_THROWS_AS(Permutation({0, 3}), InvalidArgument);
}

TEST_CASE("iou examples") {
  CHECK(bbox_iou(BBox(0.1, 0.1, 0.5, 0.5), BBox(0.1, 0.1, 0.5, 0.5)) == 1.0);
  CHECK(bbox_iou(BBox(0, 0, 0.4, 0.4), BBox(0.5, 0.5, 0.9, 0.9)) == 0.0);
  // inter 0.125, union 0.375
  CHECK(bbox_iou(BBox(0, 0, 0.5, 0.5), BBox(0.25, 0, 0.75, 0.5)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(bbox_iou(RawBox{0.5, 0.1, 0.2, 0.4}, RawBox{0, 0, 1, 1}) == 0.0);
  CHECK(bbox_iou(RawBox{0.1, 0.1, 0.1, 0.4}, RawBox{0.1, 0.1, 0.1, 0.4}) == 0.0);
}

TEST_CASE("iou is symmetric and bounded") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 2000; ++i) {
    RawBox a{u(gen), u(gen), u(gen), u(gen)}, b{u(gen), u(gen), u(gen), u(gen)};
    const double ab = bbox_iou(a, b);
    CHECK(ab == bbox_iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("iou agrees with a stratified Monte Carlo estimate") {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0, 1);
  const int K = 1000;
  for (int i = 0; i < 12; ++i) {
    const double w = 0.1 + 0.4 * u(gen), h = 0.1 + 0.4 * u(gen);
    const RawBox a{0.1, 0.1, 0.1 + w, 0.1 + h};
    const RawBox b{a.x1 + w * (u(gen) - 0.3), a.y1 + h * (u(gen) - 0.3), a.x2 + 0.2 * u(gen), a.y2 + 0.2 * u(gen)};
    // every jittered point of a is tested against b
    std::int64_t hits = 0;
    for (int gy = 0; gy < K; ++gy)
      for (int gx = 0; gx < K; ++gx) {
        const double x = a.x1 + (gx + u(gen)) * w / K, y = a.y1 + (gy + u(gen)) * h / K;
        hits += x >= b.x1 && x < b.x2 && y >= b.y1 && y < b.y2;
      }
    const double aa = w * h, ab = (b.x2 - b.x1) * (b.y2 - b.y1);
    const double inter = static_cast<double>(hits) / (double(K) * K) * aa;
    CHECK(std::abs(inter / (aa + ab - inter) - bbox_iou(a, b)) <= 1e-4);
  }
}

TEST_CASE("flat/grid index examples") {
  CHECK(flat_to_grid(0, GridSpec(4, 4)) == GridCoord{0, 0});
  CHECK(flat_to_grid(5, GridSpec(4, 4)) == GridCoord{1, 1});
  CHECK(flat_to_grid(7, GridSpec(4, 2)) == GridCoord{3, 1});
  CHECK(grid_to_flat({0, 0}, GridSpec(2, 2)) == 0);
  CHECK(grid_to_flat({1, 1}, GridSpec(4, 4)) == 5);
  CHECK(grid_to_flat({3, 1}, GridSpec(4, 2)) == 7);
  CHECK_THROWS_AS(flat_to_grid(16, GridSpec(4, 4)), IndexError);
  CHECK_THROWS_AS(flat_to_grid(-1, GridSpec(4, 4)), IndexError);
  CHECK_THROWS_AS(grid_to_flat({4, 0}, GridSpec(4, 4)), IndexError);
  CHECK_THROWS_AS(grid_to_flat({0, 2}, GridSpec(4, 2)), IndexError);
}

TEST_CASE("flat/grid round trip on every grid up to 8x8") {
  for (int r = 1; r <= 8; ++r)
    for (int c = 1; c <= 8; ++c) {
      if (r * c < 2) continue;
      const GridSpec g(r, c);
      for (int k = 0; k < g.cells(); ++k) REQUIRE(grid_to_flat(flat_to_grid(k, g), g) == k);
    }
}

TEST_CASE("permutation inverse examples") {
  CHECK(permutation_inverse(Permutation({0, 1, 2, 3})) == Permutation({0, 1, 2, 3}));
  CHECK(permutation_inverse(Permutation({1, 0})) == Permutation({1, 0}));
  CHECK(permutation_inverse(Permutation({2, 0, 3, 1})) == Permutation({1, 3, 0, 2}));
}

TEST_CASE("permutation inverse is an involution, exhaustive n <= 6") {
  for (int n = 1; n <= 6; ++n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do {
      const Permutation P(p);
      const Permutation inv = permutation_inverse(P);
      REQUIRE(permutation_inverse(inv) == P);
      REQUIRE(P.compose(inv).is_identity());
      REQUIRE(inv.compose(P).is_identity());
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST_CASE("enum string forms") {
  for (auto m : kModalities) CHECK(parse_modality(to_string(m)) == m);
  for (auto k : kTaskKinds) CHECK(parse_task_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_task_kind("rotate"), UnknownTaskKind);
  CHECK(is_volumetric(Modality::CT));
  CHECK(is_volumetric(Modality::MRI));
  CHECK_FALSE(is_volumetric(Modality::XRAY));
  const auto hard = difficulty_params(Difficulty::Hard);
  CHECK(hard.scale_patches == 3);
  CHECK(hard.jigsaw_grid == GridSpec(2, 2));
  CHECK(hard.anomaly_centers == std::vector<int>{5, 6, 9, 10});
  CHECK(difficulty_params(Difficulty::Medium).anomaly_centers == std::vector<int>{2, 3, 4, 5});
  CHECK(difficulty_params(Difficulty::Easy).anomaly_centers == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("rng determinism and ranges") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);
  Rng r(7);
  std::vector<int> hist(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const auto v = r.below(6);
    REQUIRE(v < 6);
    ++hist[v];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.between(-3, 3);
    REQUIRE(v >= -3);
    REQUIRE(v <= 3);
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  double s = 0, s2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.02);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
}

TEST_CASE("seed derivation is pure") {
  std::mt19937_64 gen(9);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const auto ds = gen();
    const std::string id = "src-" + std::to_string(gen() % 100000);
    const auto kind = kTaskKinds[gen() % 3];
    const auto idx = gen() % 1000;
    const auto s = derive_seed(ds, id, kind, idx);
    REQUIRE(s == derive_seed(ds, id, kind, idx));
    seen.insert(s);
  }
  CHECK(seen.size() > 9990);
  CHECK(derive_seed(1, "a", TaskKind::Topo, 0) != derive_seed(1, "a", TaskKind::Anom, 0));
  CHECK(derive_seed(1, "a", TaskKind::Topo, 0) != derive_seed(1, "a", TaskKind::Topo, 1));
  // FNV-1a reference values
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("image buffer invariants") {
  CHECK_THROWS_AS(ImageBuffer(3, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(ImageBuffer(10, 10, 2), InvalidArgument);
  CHECK_THROWS_AS(ImageBuffer(4, 4, 1, std::vector<std::uint8_t>(15)), InvalidArgument);
  ImageBuffer img(5, 4, 3);
  CHECK(img.size() == 60);
  img.at(4, 3, 2) = 255;
  CHECK(img.normalized(4, 3, 2) == 1.0);
  CHECK(img.normalized(0, 0, 0) == 0.0);
}

TEST_CASE("crop and paste round trip") {
  const auto img = testsupport::random_image(40, 30, 3, 1);
  const auto c = crop(img, {5, 7, 12, 9});
  CHECK(c.width() == 12);
  CHECK(c.height() == 9);
  CHECK(c.at(0, 0, 1) == img.at(5, 7, 1));
  CHECK(c.at(11, 8, 2) == img.at(16, 15, 2));
  ImageBuffer blank(40, 30, 3);
  paste(blank, c, 5, 7);
  CHECK(crop(blank, {5, 7, 12, 9}) == c);
  CHECK_THROWS(crop(img, {35, 0, 10, 10}));
}

TEST_CASE("grid crop rect is centered and divisible") {
  const auto r = grid_crop_rect(103, 98, GridSpec(4, 4));
  CHECK(r.w == 100);
  CHECK(r.h == 96);
  CHECK(r.x == 1);
  CHECK(r.y == 1);
  const auto img = testsupport::random_image(103, 98, 1, 3);
  const auto cc = center_crop_to_grid(img, GridSpec(4, 4));
  const auto cell = grid_cell_rect(cc, GridSpec(4, 4), 5);
  CHECK(cell.x == 25);
  CHECK(cell.y == 24);
  CHECK(cell.w == 25);
  CHECK(cell.h == 24);
}

TEST_CASE("resize: parallel equals serial reference") {
  for (int seed = 0; seed < 8; ++seed) {
    const auto img = testsupport::random_image(37 + seed * 11, 53 - seed * 3, seed % 2 ? 3 : 1, seed);
    for (auto [w, h] : {std::pair{16, 16}, std::pair{64, 48}, std::pair{101, 7}}) {
      REQUIRE(resize_bilinear(img, w, h) == serial::resize_bilinear(img, w, h));
    }
  }
}

TEST_CASE("resize: identity and constant images") {
  const auto img = testsupport::random_image(20, 15, 3, 2);
  CHECK(resize_bilinear(img, 20, 15) == img);
  ImageBuffer flat(33, 21, 1, std::vector<std::uint8_t>(33 * 21, 137));
  const auto r = resize_bilinear(flat, 8, 64);
  for (auto v : r.samples()) REQUIRE(v == 137);
  CHECK_THROWS_AS(resize_bilinear(img, 3, 8), InvalidArgument);
}

TEST_CASE("png round trip") {
  testsupport::TempDir dir("png");
  for (int ch : {1, 3}) {
    const auto img = testsupport::random_image(31, 17, ch, static_cast<std::uint64_t>(ch));
    const auto p = dir / ("x" + std::to_string(ch) + ".png");
    write_png(p, img);
    CHECK(read_png(p) == img);
  }
  CHECK_THROWS_AS(read_png(dir / "missing.png"), IoError);
}

TEST_CASE("to_channels") {
  ImageBuffer rgb(4, 4, 3);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      rgb.at(x, y, 0) = 255;
      rgb.at(x, y, 1) = 255;
      rgb.at(x, y, 2) = 255;
    }
  const auto g = to_channels(rgb, 1);
  CHECK(g.channels() == 1);
  CHECK(g.at(2, 2) == 255);
  const auto back = to_channels(g, 3);
  CHECK(back == rgb);
}
