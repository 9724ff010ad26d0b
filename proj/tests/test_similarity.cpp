#include <doctest.h>

#include <random>
#include <vector>

#include "oak/error.hpp"
#include "oak/similarity.hpp"

using namespace oak;

namespace {

SimilarityFn fn_for(LabelKind kind) {
  SimilarityFn fn;
  fn.kind = kind;
  return fn;
}

Label cat(const char* v) { return Categorical{v}; }

// Cell-by-cell Jaccard over the covering boxes.
double brute_box_jaccard(int w, int h, const std::vector<Box>& a, const std::vector<Box>& b) {
  auto covered = [](const std::vector<Box>& boxes, int x, int y) {
    for (const auto& bx : boxes)
      if (x >= bx.x0 && x < bx.x1 && y >= bx.y0 && y < bx.y1) return true;
    return false;
  };
  int inter = 0, uni = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool in_a = covered(a, x, y), in_b = covered(b, x, y);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  return uni == 0 ? 1.0 : double(inter) / uni;
}

std::vector<Box> random_boxes(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> n(0, 3), xs(0, w - 1), ys(0, h - 1);
  std::vector<Box> out;
  for (int i = n(rng); i > 0; --i) {
    const int x0 = xs(rng), y0 = ys(rng);
    const int x1 = std::uniform_int_distribution<int>(x0 + 1, w)(rng);
    const int y1 = std::uniform_int_distribution<int>(y0 + 1, h)(rng);
    out.push_back({x0, y0, x1, y1});
  }
  return out;
}

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("categorical hamming") {
  const auto fn = fn_for(LabelKind::Categorical);
  CHECK(similarity(cat("A"), cat("A"), fn) == 1.0);
  CHECK(similarity(cat("A"), cat("B"), fn) == 0.0);
}

TEST_CASE("label set jaccard") {
  const auto fn = fn_for(LabelKind::LabelSet);
  CHECK(similarity(LabelSet{{"a", "b"}}, LabelSet{{"b", "c"}}, fn) == doctest::Approx(1.0 / 3));
  CHECK(similarity(LabelSet{}, LabelSet{}, fn) == 1.0);
}

TEST_CASE("tree path levels") {
  const auto fn = fn_for(LabelKind::TreePath);
  const Label a = TreePath{{"r1", "s1", "t1"}};
  CHECK(similarity(a, TreePath{{"r1", "s1", "t2"}}, fn) == 0.75);
  CHECK(similarity(a, TreePath{{"r1", "s2", "t1"}}, fn) == 0.5);
  CHECK(similarity(a, TreePath{{"r2", "s1", "t1"}}, fn) == 0.0);
  CHECK(similarity(a, a, fn) == 1.0);
}

TEST_CASE("point kernel") {
  for (double sigma : {0.1, 1.0, 7.0}) {
    SimilarityFn fn = fn_for(LabelKind::Point2D);
    fn.sigma = sigma;
    CHECK(similarity(Point2D{0, 0}, Point2D{0, 0}, fn) == 1.0);
    CHECK(similarity(Point2D{0, 0}, Point2D{3, 4}, fn) ==
          doctest::Approx(std::exp(-25.0 / (2 * sigma * sigma))));
  }
}

TEST_CASE("box set jaccard matches cell enumeration") {
  const auto fn = fn_for(LabelKind::BoxSet);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_boxes(rng, 9, 7), b = random_boxes(rng, 9, 7);
    CHECK(similarity(BoxSet(9, 7, a), BoxSet(9, 7, b), fn) ==
          doctest::Approx(brute_box_jaccard(9, 7, a, b)));
  }
}

TEST_CASE("box set jaccard is scale invariant") {
  const auto fn = fn_for(LabelKind::BoxSet);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    auto a = random_boxes(rng, 6, 6), b = random_boxes(rng, 6, 6);
    const double base = similarity(BoxSet(6, 6, a), BoxSet(6, 6, b), fn);
    for (auto* v : {&a, &b})
      for (auto& bx : *v) bx = {3 * bx.x0, 3 * bx.y0, 3 * bx.x1, 3 * bx.y1};
    CHECK(similarity(BoxSet(18, 18, a), BoxSet(18, 18, b), fn) == doctest::Approx(base));
  }
}

TEST_CASE("bitmap cover round trip") {
  BoxSet a(8, 8, {{0, 0, 3, 3}, {2, 2, 6, 5}});
  CHECK(BoxSet::from_bitmap(a.bitmap()) == a);
  CHECK_THROWS_AS(BoxSet(4, 4, {{0, 0, 5, 1}}), ValidationError);
}

TEST_CASE("axioms on every kind") {
  std::vector<std::pair<LabelKind, std::vector<Label>>> samples = {
      {LabelKind::Categorical, {cat("A"), cat("B"), cat("C")}},
      {LabelKind::LabelSet, {LabelSet{{"a"}}, LabelSet{{"a", "b"}}, LabelSet{{"c"}}}},
      {LabelKind::Point2D, {Point2D{0, 0}, Point2D{1, 2}, Point2D{-1, 0.5}}},
      {LabelKind::TreePath, {TreePath{{"r", "s", "t"}}, TreePath{{"r", "s", "u"}}, TreePath{{"q", "s", "t"}}}},
      {LabelKind::BoxSet, {BoxSet(5, 5, {{0, 0, 2, 2}}), BoxSet(5, 5, {{1, 1, 4, 4}}), BoxSet(5, 5, {})}},
  };
  for (const auto& [kind, labels] : samples) {
    const auto fn = fn_for(kind);
    for (const auto& x : labels) {
      CHECK(similarity(x, x, fn) == 1.0);
      for (const auto& y : labels) {
        const double s = similarity(x, y, fn);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(s == similarity(y, x, fn));
      }
    }
  }
}

TEST_CASE("kind mismatch is rejected") {
  CHECK_THROWS_AS(similarity(cat("A"), Point2D{0, 0}, fn_for(LabelKind::Categorical)),
                  std::invalid_argument);
}

TEST_CASE("aggregate") {
  const std::vector<Label> abb = {cat("A"), cat("A"), cat("B")};
  const std::vector<double> ones = {1, 1, 1};
  CHECK(aggregate(abb, ones, AggMode::Uniform) == cat("A"));
  CHECK(aggregate(abb, std::vector<double>{0.1, 0.1, 0.9}, AggMode::Weight) == cat("B"));

  const std::vector<Label> pts = {Point2D{0, 0}, Point2D{2, 2}};
  CHECK(aggregate(pts, std::vector<double>{1, 3}, AggMode::Weight) == Label(Point2D{1.5, 1.5}));

  const std::vector<Label> one = {cat("Q")};
  for (auto mode : {AggMode::Weight, AggMode::Uniform, AggMode::Sad, AggMode::Bau})
    CHECK(apply_aggregator(one, std::vector<double>{0.3}, {mode, fn_for(LabelKind::Categorical)}) ==
          cat("Q"));
  CHECK_THROWS_AS(aggregate({}, {}, AggMode::Uniform), std::invalid_argument);
}

TEST_CASE("weighted vote ties go to the earliest label") {
  const std::vector<Label> ab = {cat("B"), cat("A")};
  CHECK(aggregate(ab, std::vector<double>{0.5, 0.5}, AggMode::Weight) == cat("B"));
}

TEST_CASE("select sad and bau") {
  const auto fn = fn_for(LabelKind::Categorical);
  CHECK(select_sad(std::vector<Label>{cat("A"), cat("A"), cat("B")}, fn) == 0);
  CHECK(select_sad(std::vector<Label>{cat("B")}, fn) == 0);
  CHECK(select_sad(std::vector<Label>{cat("A"), cat("B")}, fn) == 0);
  CHECK(select_sad(std::vector<Label>{cat("B"), cat("A"), cat("A")}, fn) == 1);
  CHECK(select_bau(std::vector<double>{0.6, 0.9}) == 1);
  CHECK(select_bau(std::vector<double>{0.7, 0.7}) == 0);
  CHECK(select_bau(std::vector<double>{0.2}) == 0);
}

TEST_CASE("closest label prefers the lowest index") {
  const auto fn = fn_for(LabelKind::Categorical);
  CHECK(closest_label(std::vector<Label>{cat("B"), cat("A"), cat("A")}, cat("A"), fn) == 1);
}

}  // TEST_SUITE
