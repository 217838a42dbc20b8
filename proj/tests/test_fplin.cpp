#include <gtest/gtest.h>

#include <random>

#include "knorm/fplin.hpp"
#include "oracles.hpp"

using namespace knorm;
using namespace knorm::fplin;

namespace {

FpMatrix random_matrix(Residue p, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_int_distribution<Residue> dist(0, p - 1);
  FpMatrix m(p, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, dist(rng));
  return m;
}

Subspace random_subspace(Residue p, std::size_t n, std::size_t gens, std::mt19937_64& rng) {
  std::uniform_int_distribution<Residue> dist(0, p - 1);
  std::vector<Vec> vs;
  for (std::size_t g = 0; g < gens; ++g) {
    Vec v(n);
    for (auto& x : v) x = dist(rng);
    vs.push_back(v);
  }
  return Subspace::span(p, n, vs);
}

}  // namespace

TEST(KernelImage, ZeroMatrix) {
  auto [k, im] = kernel_image(FpMatrix(3, 2, 2));
  EXPECT_EQ(k, Subspace::full(3, 2));
  EXPECT_EQ(im, Subspace::zero(3, 2));
}

TEST(KernelImage, Identity) {
  auto [k, im] = kernel_image(FpMatrix::identity(2, 3));
  EXPECT_EQ(k.dim(), 0u);
  EXPECT_EQ(im, Subspace::full(2, 3));
}

TEST(KernelImage, AllOnesOverF2) {
  auto m = FpMatrix::from_rows(2, 2, {{1, 1}, {1, 1}});
  auto [k, im] = kernel_image(m);
  EXPECT_EQ(k, Subspace::span(2, 2, {{1, 1}}));
  EXPECT_EQ(im, Subspace::span(2, 2, {{1, 1}}));
  // Enumeration of F_2^2.
  std::size_t zeros = 0;
  for (const auto& v : oracle::all_vectors(2, 2))
    if (is_zero(m.apply(v))) ++zeros;
  EXPECT_EQ(zeros, 2u);
}

TEST(KernelImage, RankNullityAndEnumeration) {
  std::mt19937_64 rng(11);
  for (Residue p : {2u, 3u, 5u}) {
    for (int trial = 0; trial < 30; ++trial) {
      std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
      auto m = random_matrix(p, r, c, rng);
      auto [k, im] = kernel_image(m);
      EXPECT_EQ(k.dim() + im.dim(), c);
      std::vector<Vec> rows;
      for (std::size_t i = 0; i < r; ++i) rows.push_back(m.row(i));
      std::size_t ker_count = 0;
      std::set<Vec> images;
      for (const auto& v : oracle::all_vectors(p, c)) {
        auto w = oracle::mat_vec(p, rows, v);
        images.insert(w);
        if (is_zero(w)) {
          ++ker_count;
          EXPECT_TRUE(k.contains(v));
        }
        EXPECT_TRUE(im.contains(w));
      }
      EXPECT_EQ(oracle::dim_of_set(p, ker_count), k.dim());
      EXPECT_EQ(oracle::dim_of_set(p, images.size()), im.dim());
    }
  }
}

TEST(IntersectAndSum, Idempotent) {
  auto a = Subspace::span(5, 3, {{1, 2, 3}, {0, 1, 4}});
  auto [cap, plus] = intersect_and_sum(a, a);
  EXPECT_EQ(cap, a);
  EXPECT_EQ(plus, a);
}

TEST(IntersectAndSum, ComplementaryLines) {
  auto a = Subspace::span(5, 2, {{1, 2}});
  auto b = Subspace::span(5, 2, {{1, 3}});
  auto [cap, plus] = intersect_and_sum(a, b);
  EXPECT_EQ(cap.dim(), 0u);
  EXPECT_EQ(plus, Subspace::full(5, 2));
}

TEST(IntersectAndSum, CoordinatePlanesInF2Cubed) {
  auto a = Subspace::span(2, 3, {{1, 0, 0}, {0, 1, 0}});
  auto b = Subspace::span(2, 3, {{0, 1, 0}, {0, 0, 1}});
  auto [cap, plus] = intersect_and_sum(a, b);
  EXPECT_EQ(cap, Subspace::span(2, 3, {{0, 1, 0}}));
  EXPECT_EQ(plus, Subspace::full(2, 3));
  std::size_t both = 0;
  for (const auto& v : oracle::all_vectors(2, 3))
    if (a.contains(v) && b.contains(v)) ++both;
  EXPECT_EQ(both, 2u);
}

TEST(IntersectAndSum, AgainstEnumeration) {
  std::mt19937_64 rng(5);
  for (Residue p : {2u, 3u}) {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 4;
      auto a = random_subspace(p, n, rng() % 4, rng);
      auto b = random_subspace(p, n, rng() % 4, rng);
      auto [cap, plus] = intersect_and_sum(a, b);
      EXPECT_EQ(cap.dim() + plus.dim(), a.dim() + b.dim());
      auto sa = oracle::span_set(p, n, a.basis());
      auto sb = oracle::span_set(p, n, b.basis());
      std::size_t common = 0;
      for (const auto& v : sa)
        if (sb.count(v)) ++common;
      EXPECT_EQ(oracle::dim_of_set(p, common), cap.dim());
      std::vector<Vec> gens = a.basis();
      gens.insert(gens.end(), b.basis().begin(), b.basis().end());
      EXPECT_EQ(oracle::dim_of_set(p, oracle::span_set(p, n, gens).size()), plus.dim());
    }
  }
}

TEST(IntersectAndSum, MismatchThrows) {
  EXPECT_THROW(intersect_and_sum(Subspace::full(2, 2), Subspace::full(2, 3)), InputError);
}

TEST(Complement, Trivial) {
  auto o = Subspace::span(3, 4, {{1, 0, 2, 0}, {0, 1, 1, 1}});
  EXPECT_EQ(complement(o, o).dim(), 0u);
  EXPECT_EQ(complement(Subspace::zero(3, 4), o), o);
}

TEST(Complement, LineInF2Cubed) {
  auto inner = Subspace::span(2, 3, {{1, 1, 0}});
  auto c = complement(inner, Subspace::full(2, 3));
  EXPECT_EQ(c.dim(), 2u);
  std::vector<Vec> stacked = c.basis();
  stacked.push_back({1, 1, 0});
  EXPECT_EQ(FpMatrix::from_rows(2, 3, stacked).rank(), 3u);
}

TEST(Complement, DeterministicAndDirect) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    Residue p = trial % 2 ? 3 : 5;
    auto outer = random_subspace(p, 5, 1 + rng() % 4, rng);
    std::vector<Vec> some;
    for (const auto& b : outer.basis())
      if (rng() % 2) some.push_back(b);
    auto inner = Subspace::span(p, 5, some);
    auto c = complement(inner, outer);
    auto [cap, plus] = intersect_and_sum(c, inner);
    EXPECT_EQ(cap.dim(), 0u);
    EXPECT_EQ(plus, outer);
    EXPECT_EQ(complement(inner, outer), c);
  }
}

TEST(Complement, NotContainedThrows) {
  EXPECT_THROW(complement(Subspace::span(2, 2, {{1, 0}}), Subspace::span(2, 2, {{0, 1}})), InputError);
}

TEST(QuotientDim, Examples) {
  auto s = Subspace::span(3, 4, {{1, 1, 0, 0}});
  EXPECT_EQ(quotient_dim(s, s), 0u);
  EXPECT_EQ(quotient_dim(Subspace::zero(3, 4), Subspace::full(3, 4)), 4u);
  auto two = Subspace::span(5, 5, {{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}});
  EXPECT_EQ(quotient_dim(two, Subspace::full(5, 5)), 3u);
  EXPECT_THROW(quotient_dim(Subspace::full(5, 5), two), InputError);
}

TEST(Subspace, EchelonCanonical) {
  auto a = Subspace::span(5, 3, {{1, 2, 3}, {2, 0, 1}});
  auto b = Subspace::span(5, 3, {{3, 2, 4}, {4, 4, 2}, {1, 2, 3}});  // sums of the same two
  EXPECT_EQ(a, b);
}

TEST(Solve, PreimageAndInverse) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = oracle::random_invertible(7, 4, rng);
    auto inv = inverse(m);
    EXPECT_EQ(m * inv, FpMatrix::identity(7, 4));
    auto a = random_matrix(3, 3, 4, rng);
    auto s = random_subspace(3, 3, rng() % 3, rng);
    auto pre = preimage(a, s);
    for (const auto& v : oracle::all_vectors(3, 4)) EXPECT_EQ(pre.contains(v), s.contains(a.apply(v)));
  }
}

TEST(Modulus, RejectsComposite) { EXPECT_THROW(FpMatrix(4, 1, 1), InputError); }
