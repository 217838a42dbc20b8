#include <gtest/gtest.h>

#include "knorm/euler.hpp"

using namespace knorm;
using namespace knorm::euler;
using milnor::LocalK;
using padic::Elem;
using padic::LocalField;
using padic::StepKind;

namespace {

fplin::Vec cls(const LocalK& K, long long n) { return K.class_of(Elem::integer(K.field(), n)); }

padic::FieldPtr q3zeta3() {
  auto q3 = LocalField::qp(3);
  return LocalField::with_polynomial(q3, StepKind::Eisenstein, {q3->from_int(3), q3->from_int(3)});
}

}  // namespace

TEST(Profile, Q2Examples) {
  LocalK K(LocalField::qp(2));
  for (long long a : {2, 5}) {
    auto pr = profile_from_field(K.kummer(cls(K, a)), 2);
    EXPECT_EQ(pr.h, (std::vector<long>{1, 3, 1}));
    EXPECT_EQ(pr.a, (std::vector<long>{0, 2, 1}));
    EXPECT_EQ(pr.d, (std::vector<long>{1, 1, 0}));
  }
  auto p0 = profile_from_field(K.kummer(cls(K, 2)), 0);
  EXPECT_EQ(p0.h, (std::vector<long>{1}));
  EXPECT_EQ(chi_T(p0), 1);
}

TEST(Chi, Q2Sqrt2) {
  LocalK K(LocalField::qp(2));
  auto pr = profile_from_field(K.kummer(cls(K, 2)), 2);
  EXPECT_EQ(chi_T(pr), -1);
  EXPECT_EQ(chi_N(pr), -2);
  EXPECT_EQ(*dim_HN_formula(pr, 1, Variant::C), 4);
  EXPECT_EQ(*dim_HN_formula(pr, 2, Variant::C), 1);
  EXPECT_TRUE(pr.minus_one_norm.value());
  auto r = theorem3_check(pr);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.theorem3a_lhs, 0);
  EXPECT_EQ(r.theorem3a_rhs, 0);
  ASSERT_TRUE(r.chi_free_N.has_value());
  EXPECT_EQ(*r.chi_free_N, -2);
  EXPECT_TRUE(r.doubles);
}

TEST(Chi, Q2Sqrt2DegreeOne) {
  LocalK K(LocalField::qp(2));
  auto pr = profile_from_field(K.kummer(cls(K, 2)), 1);
  EXPECT_EQ(chi_N(pr), -3);
  EXPECT_EQ(2 * chi_T(pr), -4);
  auto r = theorem3_check(pr);
  EXPECT_TRUE(r.pass());
  EXPECT_FALSE(r.doubles);
}

TEST(Chi, ZeroData) {
  auto pr = manual_profile(3, 2, {1, 0, 0}, {0, 0}, std::nullopt);
  EXPECT_EQ(*dim_HN_formula(pr, 2, Variant::C), 0);
}

TEST(EulerIdentities, AllLocalInstances) {
  for (auto F : {LocalField::qp(2), q3zeta3()}) {
    LocalK K(F);
    auto lines = all_lines(K);
    for (std::size_t i = 0; i < lines.size(); i += (F->p() == 2 ? 1 : 7))
      for (int n = 0; n <= 4; ++n) {
        auto r = theorem3_check(profile_from_field(K.kummer(lines[i]), n));
        for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.detail << " n=" << n;
      }
  }
}

TEST(EulerIdentities, VariantBNeedsMinusOneNorm) {
  // Q2(sqrt -1): -1 is not a norm, so (b) is not licensed and (a) has no
  // meaningful quotient.
  LocalK K(LocalField::qp(2));
  auto pr = profile_from_field(K.kummer(cls(K, -1)), 1);
  EXPECT_FALSE(pr.minus_one_norm.value());
  EXPECT_FALSE(dim_HN_formula(pr, 1, Variant::B).has_value());
  EXPECT_FALSE(dim_HN_formula(pr, 1, Variant::A).has_value());
  EXPECT_EQ(*dim_HN_formula(pr, 1, Variant::C), 4);
}

TEST(CdProbe, Q2CohomologicalDimension) {
  LocalK K(LocalField::qp(2));
  auto lines = all_lines(K);
  ASSERT_EQ(lines.size(), line_count(2, 3));
  for (int n = 0; n <= 3; ++n) {
    std::vector<CohomologyProfile> prs;
    for (const auto& a : lines) prs.push_back(profile_from_field(K.kummer(a), n));
    auto r = corollary_checks(prs, line_count(2, 3), 2);
    EXPECT_TRUE(r.pass()) << n << " " << r.summary;
    EXPECT_EQ(r.all_double, n >= 2) << n;
    if (n == 2) {
      EXPECT_EQ(r.summary, "chi_2 doubles for all 7 subgroups: consistent with cd = 2");
    }
  }
  std::vector<CohomologyProfile> partial{profile_from_field(K.kummer(lines[0]), 2)};
  EXPECT_FALSE(corollary_checks(partial, 7, 2).pass());
}

TEST(Manual, Profiles) {
  auto pr = manual_profile(2, 2, {1, 3, 1}, {2, 1}, true);
  auto r = theorem3_check(pr);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.chi_N, -2);
  EXPECT_THROW(theorem3_check(manual_profile(2, 2, {1, 3, 1}, {2, 1}, std::nullopt)), InputError);
  EXPECT_THROW(manual_profile(2, 2, {2, 3, 1}, {2, 1}, true), InputError);
  EXPECT_THROW(manual_profile(2, 2, {1, 3, 1}, {4, 1}, true), InputError);
  EXPECT_THROW(manual_profile(2, 2, {1, 3, 1}, {2}, true), InputError);
  // d_n = 0: doubling holds
  auto free = theorem3_check(manual_profile(3, 1, {1, 4}, {4}, std::nullopt));
  EXPECT_TRUE(free.pass());
  EXPECT_TRUE(free.doubles);
  EXPECT_EQ(free.chi_N, -9);
}

TEST(Manual, StableBeyondCohomologicalDimension) {
  const auto base = manual_profile(2, 2, {1, 3, 1}, {2, 1}, true);
  for (int extra = 1; extra <= 3; ++extra) {
    std::vector<long> h{1, 3, 1}, a{2, 1};
    for (int i = 0; i < extra; ++i) {
      h.push_back(0);
      a.push_back(0);
    }
    auto pr = manual_profile(2, 2 + extra, h, a, true);
    EXPECT_EQ(chi_N(pr), chi_N(base));
    EXPECT_EQ(chi_T(pr), chi_T(base));
  }
}
