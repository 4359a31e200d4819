#include <algorithm>

#include "doctest.h"
#include "psm/generators.hpp"
#include "psm/layers.hpp"

using namespace psm;

namespace {

ErrorCode spec_error(const GeneratorSpec& spec) {
  try {
    generate_disks(spec);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected InvalidSpec");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("chain of five is one layer") {
  const Geometry2D g = chain(5);
  CHECK(g.size() == 5);
  CHECK(peel_layers_2d(g).n_max == 1);
}

TEST_CASE("hexagonal and square clusters have as many layers as requested") {
  for (int L = 2; L <= 4; ++L) {
    CAPTURE(L);
    CHECK(peel_layers_2d(hex_layers(L)).n_max == L);
    CHECK(peel_layers_2d(quad_layers(L)).n_max == L);
  }
  CHECK(hex_layers(2).size() == 7);
  CHECK(quad_layers(2).size() == 9);
}

TEST_CASE("square clusters contain quadruple points") {
  const Geometry2D g = quad_layers(2);
  std::size_t best = 0;
  for (const ArcPiece& p : partition_boundary(g, 5)) best = std::max(best, p.multiplicity());
  CHECK(best >= 3);
}

TEST_CASE("ids run row by row from the bottom") {
  const auto disks = generate_disks({Family::HexLayers, 3, 1.0, 0.0});
  for (std::size_t i = 1; i < disks.size(); ++i) {
    const Vec2 a = disks[i - 1].center, b = disks[i].center;
    CHECK((a.y < b.y - 1e-12 || (std::abs(a.y - b.y) <= 1e-12 && a.x < b.x)));
    CHECK(disks[i].id == static_cast<int>(i) + 1);
  }
}

TEST_CASE("generation is deterministic and validates parameters") {
  const GeneratorSpec tri{Family::TriLattice, 4, 1.0, 0.0};
  const auto a = generate_disks(tri), b = generate_disks(tri);
  REQUIRE(a.size() == 16);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].center == b[i].center);
  CHECK_NOTHROW(generate(tri));

  CHECK(spec_error({Family::HexLayers, 3, 1.0, 2.0}) == ErrorCode::InvalidSpec);
  CHECK(spec_error({Family::HexLayers, 3, 1.0, -1.0}) == ErrorCode::InvalidSpec);
  CHECK(spec_error({Family::QuadLayers, 2, 1.0, 1.5}) == ErrorCode::InvalidSpec);
  CHECK(spec_error({Family::Chain, 1, 1.0, 0.0}) == ErrorCode::InvalidSpec);
  CHECK(spec_error({Family::Chain, 3, 0.0, 0.0}) == ErrorCode::InvalidSpec);
}

TEST_CASE("family names parse") {
  CHECK(parse_family("hex") == Family::HexLayers);
  CHECK(parse_family("quad_layers") == Family::QuadLayers);
  CHECK(parse_family("chain") == Family::Chain);
  CHECK(parse_family("tri") == Family::TriLattice);
  CHECK_THROWS_AS(parse_family("spiral"), Error);
}
