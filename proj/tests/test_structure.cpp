#include <gtest/gtest.h>

#include "knorm/structure.hpp"

using namespace knorm;
using namespace knorm::structure;
using milnor::LocalK;
using padic::Elem;
using padic::LocalField;
using padic::StepKind;

namespace {

padic::FieldPtr q3zeta3() {
  auto q3 = LocalField::qp(3);
  return LocalField::with_polynomial(q3, StepKind::Eisenstein, {q3->from_int(3), q3->from_int(3)});
}

Vec cls(const LocalK& K, long long n) { return K.class_of(Elem::integer(K.field(), n)); }

Invariants inv(Residue p, int n, std::size_t d, std::size_t e, std::size_t u1, std::size_t u2, std::size_t y,
               std::size_t z) {
  return {p, n, d, e, u1, u2, y, z};
}

void expect_all_pass(const StructureReport& r, const std::string& tag) {
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << tag << ": " << c.name << " " << c.detail;
}

std::vector<Vec> all_lines(const LocalK& K) {
  const auto p = K.p();
  const auto dim = K.group(1)->dim();
  std::vector<Vec> out;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= p;
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    Vec v(dim);
    auto t = idx;
    for (auto& x : v) {
      x = static_cast<Residue>(t % p);
      t /= p;
    }
    if (milnor::normalize_line(v, p) == v) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(Invariants, GoldenQ2Sqrt2) {
  LocalK K(LocalField::qp(2));
  const auto& k = K.kummer(cls(K, 2));
  EXPECT_EQ(compute_invariants(k, 1), inv(2, 1, 1, 2, 1, 0, 1, 1));
  EXPECT_EQ(compute_invariants(k, 2), inv(2, 2, 0, 1, 1, 0, 0, 0));
  EXPECT_EQ(compute_invariants(k, 3), inv(2, 3, 0, 0, 0, 0, 0, 0));
}

TEST(Invariants, Q2MinusOneHasUpsilon2) {
  // E = Q2(i): {-1,-1} != 0, so ann{a,-1} = 0 in k_0 and Upsilon2 = 1.
  LocalK K(LocalField::qp(2));
  const auto& k = K.kummer(cls(K, -1));
  EXPECT_EQ(compute_invariants(k, 1), inv(2, 1, 1, 2, 0, 1, 2, 0));
}

TEST(Decompose, GoldenQ2Sqrt2) {
  LocalK K(LocalField::qp(2));
  const auto& k = K.kummer(cls(K, 2));
  auto r1 = analyze(k, 1);
  expect_all_pass(r1, "n=1");
  EXPECT_EQ(r1.X1.dim(), 1u);
  EXPECT_EQ(r1.Y.dim(), 2u);
  EXPECT_EQ(r1.Z.dim(), 1u);
  EXPECT_EQ(r1.profile.m, (std::vector<std::size_t>{2, 1}));
  auto r2 = analyze(k, 2);
  expect_all_pass(r2, "n=2");
  EXPECT_EQ(r2.X1.dim(), 1u);
  EXPECT_EQ(r2.X1, Subspace::full(2, 1));
  auto r3 = analyze(k, 3);
  expect_all_pass(r3, "n=3");
  EXPECT_EQ(r3.profile.total_dim(), 0u);
}

TEST(Canonical, SixTermDimsQ2Sqrt2) {
  LocalK K(LocalField::qp(2));
  const auto s = spaces(K.kummer(cls(K, 2)), 1);
  EXPECT_EQ(s.ann_a.dim(), 0u);
  EXPECT_EQ(s.kF_prev.dim(), 1u);
  EXPECT_EQ(s.kF.dim(), 3u);
  EXPECT_EQ(s.fixed.dim(), 3u);
  EXPECT_EQ(fplin::image_of(s.cup_a, s.ann_a_xi).dim(), 1u);
  auto t_fixed = fplin::intersect(gmod::omega_image(s.module, 1), s.fixed);
  EXPECT_EQ(t_fixed.dim(), 1u);
}

TEST(LemmaVW, Q2AndQ3Zeta3) {
  LocalK K(LocalField::qp(2));
  auto s = spaces(K.kummer(cls(K, 2)), 2);
  auto items = check_lemma_VW(s);
  ASSERT_EQ(items.size(), 1u);
  EXPECT_TRUE(items[0].pass);
  EXPECT_EQ(items[0].detail, "dim 1");
  LocalK L(q3zeta3());
  auto s3 = spaces(L.kummer(L.class_of(Elem::uniformizer(L.field()))), 1);
  for (const auto& c : check_lemma_VW(s3)) EXPECT_TRUE(c.pass) << c.name;
  auto i3 = compute_invariants(s3);
  EXPECT_EQ(i3.upsilon1 + i3.upsilon2, 1u);
}

TEST(Matrix, Q2AllQuadratic) {
  LocalK K(LocalField::qp(2));
  auto lines = all_lines(K);
  ASSERT_EQ(lines.size(), 7u);
  for (const auto& a : lines)
    for (int n = 0; n <= 3; ++n) expect_all_pass(analyze(K.kummer(a), n), "n=" + std::to_string(n));
}

TEST(Matrix, Q3Zeta3Cubic) {
  LocalK K(q3zeta3());
  auto lines = all_lines(K);
  ASSERT_EQ(lines.size(), 40u);
  int done = 0;
  for (std::size_t i = 0; i < lines.size(); i += 8, ++done)
    for (int n = 0; n <= 3; ++n) expect_all_pass(analyze(K.kummer(lines[i]), n), "n=" + std::to_string(n));
  EXPECT_GE(done, 3);
}
