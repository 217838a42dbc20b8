#include <gtest/gtest.h>

#include "knorm/padic.hpp"

using namespace knorm;
using namespace knorm::padic;

TEST(Arith, InverseAndValuation) {
  auto q2 = LocalField::qp(2);
  auto x = Elem::integer(q2, 12);
  EXPECT_EQ(x.valuation(), 2);
  EXPECT_TRUE(agree(x * x.inv(), Elem::one(q2), q2->precision()));
  EXPECT_EQ((Elem::integer(q2, 2) + Elem::integer(q2, 2)).valuation(), 2);
  auto z = Elem::integer(q2, 3) - Elem::integer(q2, 3);
  EXPECT_TRUE(z.is_zero_marker());
  EXPECT_THROW(z.inv(), PrecisionError);
}

TEST(Arith, Q3Zeta3) {
  auto q3 = LocalField::qp(3);
  auto f = LocalField::with_polynomial(q3, StepKind::Eisenstein, {q3->from_int(3), q3->from_int(3)});
  EXPECT_EQ(f->ramification(), 2);
  auto lam = Elem::uniformizer(f);
  EXPECT_EQ((lam * lam).valuation(), 2);
  auto three = embed(f, Elem::integer(q3, 3));
  EXPECT_EQ(three.valuation(), 2);
  EXPECT_EQ((three / (lam * lam)).valuation(), 0);
  EXPECT_TRUE(f->has_mu_p());
  auto xi = Elem::root_of_unity(f);
  EXPECT_TRUE(agree(xi.pow(3), Elem::one(f), f->precision()));
  // lambda = zeta - 1 for some primitive cube root zeta.
  auto zeta = lam + Elem::one(f);
  EXPECT_TRUE(agree(zeta * zeta + zeta + Elem::one(f), Elem::zero(f, 100), f->precision()));
}

TEST(Arith, RejectsNonEisenstein) {
  auto q3 = LocalField::qp(3);
  EXPECT_THROW(LocalField::with_polynomial(q3, StepKind::Eisenstein, {q3->from_int(9), q3->from_int(3)}), InputError);
  EXPECT_THROW(LocalField::with_polynomial(q3, StepKind::Eisenstein, {q3->from_int(3), q3->from_int(1)}), InputError);
}

TEST(Teichmueller, Examples) {
  auto q5 = LocalField::qp(5);
  auto w = teichmueller(Elem::integer(q5, 2));
  EXPECT_TRUE(agree(w.pow(4), Elem::one(q5), q5->precision()));
  EXPECT_EQ(w.residue(), 2u);
  auto q2 = LocalField::qp(2);
  EXPECT_TRUE(agree(teichmueller(Elem::one(q2)), Elem::one(q2), q2->precision()));
  EXPECT_THROW(teichmueller(Elem::integer(q5, 5)), InputError);
}

TEST(Unramified, Tower) {
  auto q2 = LocalField::qp(2);
  auto u = LocalField::unramified(q2, 2);
  EXPECT_EQ(u->residue_size(), 4u);
  EXPECT_EQ(u->ramification(), 1);
  auto g = Elem::unit(u, u->generator());
  auto w = teichmueller(g);
  EXPECT_TRUE(agree(w.pow(3), Elem::one(u), u->precision()));
  EXPECT_FALSE(agree(w, Elem::one(u), 1));
}

TEST(Mu, Detection) {
  EXPECT_FALSE(LocalField::qp(3)->has_mu_p());
  EXPECT_TRUE(LocalField::qp(2)->has_mu_p());
  auto q5 = LocalField::qp(5);
  auto f = LocalField::with_polynomial(q5, StepKind::Eisenstein,
                                       {q5->from_int(5), q5->from_int(10), q5->from_int(10), q5->from_int(5)});
  EXPECT_TRUE(f->has_mu_p());
  auto xi = Elem::root_of_unity(f);
  EXPECT_TRUE(agree(xi.pow(5), Elem::one(f), f->precision()));
  EXPECT_FALSE(agree(xi, Elem::one(f), 2));
  // Ramified quadratic over Q3 without cube roots of unity.
  auto q3 = LocalField::qp(3);
  auto r = LocalField::with_polynomial(q3, StepKind::Eisenstein, {q3->from_int(-3), q3->from_int(0)});
  EXPECT_FALSE(r->has_mu_p());
}

#include <random>

#include "knorm/kummer.hpp"
#include "knorm/units.hpp"
#include "oracles.hpp"

namespace {

FieldPtr q3zeta3() {
  auto q3 = LocalField::qp(3);
  return LocalField::with_polynomial(q3, StepKind::Eisenstein, {q3->from_int(3), q3->from_int(3)});
}

Elem random_unit(const FieldPtr& F, std::mt19937_64& rng) {
  for (;;) {
    Coeffs c = F->zero();
    for (auto& x : c) x = rng() % 1000;
    if (F->val(c) == 0) return Elem::unit(F, c);
  }
}

Elem random_elem(const FieldPtr& F, std::mt19937_64& rng) {
  return random_unit(F, rng) * Elem::uniformizer(F).pow(static_cast<i64>(rng() % 7) - 3);
}

// Equal to every digit both sides know, with a meaningful number known.
::testing::AssertionResult same(const Elem& x, const Elem& y, int min_rel = 8) {
  const int abs = std::min(x.abs_precision(), y.abs_precision());
  if (!agree(x, y, abs)) return ::testing::AssertionFailure() << "values differ below precision " << abs;
  const int rel = std::min(x.rel_precision(), y.rel_precision());
  if (rel < min_rel) return ::testing::AssertionFailure() << "only " << rel << " digits known";
  return ::testing::AssertionSuccess();
}

}  // namespace

TEST(PthPower, Q2Examples) {
  auto q2 = LocalField::qp(2);
  EXPECT_TRUE(is_pth_power(Elem::integer(q2, 17)));
  EXPECT_FALSE(is_pth_power(Elem::integer(q2, 5)));
  EXPECT_TRUE(is_pth_power(Elem::integer(q2, 4)));
  EXPECT_FALSE(is_pth_power(Elem::integer(q2, -1)));
  EXPECT_FALSE(is_pth_power(Elem::integer(q2, 2)));
  for (i64 n = 1; n < 200; n += 2) {
    EXPECT_EQ(is_pth_power(Elem::integer(q2, n)), oracle::brute_pth_power(Elem::integer(q2, n))) << n;
    EXPECT_EQ(is_pth_power(Elem::integer(q2, n)), n % 8 == 1) << n;
  }
}

TEST(PthPower, AgainstBruteForce) {
  std::mt19937_64 rng(99);
  std::vector<FieldPtr> fields{LocalField::qp(2), q3zeta3()};
  auto q2 = LocalField::qp(2);
  fields.push_back(LocalField::with_polynomial(q2, StepKind::Eisenstein, {q2->from_int(-2), q2->from_int(0)}));
  fields.push_back(LocalField::unramified(q2, 2));
  for (const auto& F : fields) {
    UnitFiltration filt(F);
    EXPECT_EQ(filt.dim(), F->degree() + 2);
    for (int trial = 0; trial < 60; ++trial) {
      Elem x = random_elem(F, rng);
      EXPECT_EQ(filt.is_pth_power(x), oracle::brute_pth_power(x)) << F->name();
      EXPECT_TRUE(filt.is_pth_power(x.pow(static_cast<i64>(F->p()))));
      Elem u = random_unit(F, rng);
      EXPECT_EQ(filt.is_pth_power(u * x.pow(static_cast<i64>(F->p()))), filt.is_pth_power(u));
    }
  }
}

TEST(PthPower, LogIsHomomorphism) {
  std::mt19937_64 rng(5);
  for (const auto& F : {LocalField::qp(2), q3zeta3()}) {
    UnitFiltration filt(F);
    const auto p = static_cast<fplin::Residue>(F->p());
    // Standard generators map to unit vectors.
    for (int i = 0; i < filt.dim(); ++i) {
      auto v = filt.log(filt.generators()[static_cast<std::size_t>(i)]);
      for (int j = 0; j < filt.dim(); ++j) EXPECT_EQ(v[static_cast<std::size_t>(j)], i == j ? 1u : 0u);
    }
    for (int trial = 0; trial < 40; ++trial) {
      Elem x = random_elem(F, rng), y = random_elem(F, rng);
      auto lx = filt.log(x), ly = filt.log(y), lxy = filt.log(x * y);
      for (std::size_t k = 0; k < lx.size(); ++k) EXPECT_EQ(lxy[k], (lx[k] + ly[k]) % p);
    }
  }
}

TEST(PthPower, PrecisionGuard) {
  auto q2 = LocalField::qp(2);
  Elem x = Elem::integer(q2, 5).with_precision(2);
  EXPECT_THROW(is_pth_power(x), PrecisionError);
}

TEST(Kummer, Q2Sqrt2Norms) {
  auto q2 = LocalField::qp(2);
  auto k = KummerExtension::build(q2, Elem::integer(q2, 2));
  EXPECT_EQ(k.top()->degree(), 2);
  EXPECT_TRUE(k.ramified());
  const auto& E = k.top();
  const Elem A = k.root();
  const Elem one = Elem::one(E);
  EXPECT_TRUE(same(k.norm_down(A), Elem::integer(q2, -2)));
  EXPECT_TRUE(same(k.norm_down(one + A), Elem::integer(q2, -1)));
  EXPECT_TRUE(same(k.norm_down(Elem::integer(E, 2) + A), Elem::integer(q2, 2)));
  EXPECT_THROW(KummerExtension::build(q2, Elem::integer(q2, 17)), InputError);
}

TEST(Kummer, AllQuadraticExtensionsOfQ2) {
  auto q2 = LocalField::qp(2);
  std::mt19937_64 rng(1);
  for (i64 a : {-1, 5, -5, 2, -2, 10, -10}) {
    auto k = KummerExtension::build(q2, Elem::integer(q2, a));
    const auto& E = k.top();
    EXPECT_EQ(k.ramified(), a != 5) << a;
    EXPECT_TRUE(same(k.root().pow(2), embed(E, Elem::integer(q2, a)))) << a;
    EXPECT_TRUE(same(k.norm_down(k.root()), Elem::integer(q2, -a))) << a;
    for (int t = 0; t < 15; ++t) {
      Elem x = random_elem(E, rng), y = random_elem(E, rng);
      Elem nx = k.norm_down(x), ny = k.norm_down(y);
      EXPECT_TRUE(same(k.norm_down(x * y), nx * ny));
      EXPECT_TRUE(same(nx, oracle::det_norm(x))) << a;
      Elem c = random_elem(q2, rng);
      EXPECT_TRUE(same(k.norm_down(k.up(c)), c.pow(2)));
    }
  }
}

TEST(Kummer, CubicOverQ3Zeta3) {
  auto F = q3zeta3();
  std::mt19937_64 rng(2);
  const Elem lam = Elem::uniformizer(F);
  const Elem xi = Elem::root_of_unity(F);
  const Elem one = Elem::one(F);
  std::vector<Elem> radicands{lam, lam * xi, lam * xi * xi, xi, one + lam * lam, one + lam.pow(3)};
  std::vector<KummerShape> shapes{KummerShape::Uniformizer, KummerShape::Uniformizer, KummerShape::Uniformizer,
                                  KummerShape::RamifiedUnit, KummerShape::RamifiedUnit, KummerShape::Unramified};
  for (std::size_t i = 0; i < radicands.size(); ++i) {
    auto k = KummerExtension::build(F, radicands[i]);
    const auto& E = k.top();
    EXPECT_EQ(k.shape(), shapes[i]) << i;
    EXPECT_EQ(E->degree(), 6);
    EXPECT_TRUE(E->has_mu_p());
    EXPECT_TRUE(same(k.sigma(k.root()), embed(E, xi) * k.root()));
    for (int t = 0; t < 6; ++t) {
      Elem x = random_elem(E, rng);
      Elem nx = k.norm_down(x);
      EXPECT_TRUE(same(nx, oracle::det_norm(x))) << i;
    }
  }
}
