#pragma once

// Degree-p Kummer steps E = F(A), A^p = a, with sigma(A) = xi A.
//
// The step is built so that E is an honest tower level: Eisenstein when the
// extension is ramified, unramified otherwise. Three shapes occur.
//   v(a) prime to p      Pi = A^t pi^-w is a root of x^p - a^t pi^-pw.
//   unit at level j < c  (p does not divide j) Pi = (U - 1)^s / pi^k with
//                        U^p = u the normalized unit; its characteristic
//                        polynomial over F is Eisenstein.
//   unit at level c      gamma = (U - 1)/pi^m has an unramified minimal
//                        polynomial (the reduction is Artin-Schreier).
// Every construction is certified afterwards (A^p = a, sigma(A) = xi A,
// sigma^p = id on the generator); if the certified precision is below the
// field's policy the field is rebuilt at that precision.

#include <string>
#include <vector>

#include "knorm/padic.hpp"
#include "knorm/units.hpp"

namespace knorm::padic {

namespace detail {

// Characteristic polynomial (monic, low to high) by the division-free
// Samuelson-Berkowitz recursion.
inline std::vector<Elem> charpoly(const std::vector<std::vector<Elem>>& a, const Elem& zero) {
  const std::size_t n = a.size();
  const Elem one = Elem::one(zero.field());
  std::vector<Elem> poly{one};  // high -> low, for the empty trailing block
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t sz = n - k;
    // First column of the Toeplitz factor: 1, -a_kk, -R C, -R A1 C, ...
    std::vector<Elem> col(sz + 1, zero);
    col[0] = one;
    col[1] = -a[k][k];
    std::vector<Elem> w;
    for (std::size_t r = k + 1; r < n; ++r) w.push_back(a[r][k]);
    for (std::size_t i = 2; i <= sz; ++i) {
      Elem s = zero;
      for (std::size_t t = 0; t < w.size(); ++t) s = s + a[k][k + 1 + t] * w[t];
      col[i] = -s;
      std::vector<Elem> nw(w.size(), zero);
      for (std::size_t r = 0; r < w.size(); ++r)
        for (std::size_t t = 0; t < w.size(); ++t) nw[r] = nw[r] + a[k + 1 + r][k + 1 + t] * w[t];
      w = std::move(nw);
    }
    std::vector<Elem> next(sz + 1, zero);
    for (std::size_t i = 0; i <= sz; ++i)
      for (std::size_t j = 0; j < poly.size() && j <= i; ++j) next[i] = next[i] + col[i - j] * poly[j];
    poly = std::move(next);
  }
  return std::vector<Elem>(poly.rbegin(), poly.rend());
}

// Solves M x = b over a field by Gaussian elimination with minimal-valuation
// pivots.
inline std::vector<Elem> solve(std::vector<std::vector<Elem>> m, std::vector<Elem> b, const Elem& zero) {
  const std::size_t n = m.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = n;
    int best_v = kInfVal;
    for (std::size_t r = col; r < n; ++r) {
      if (m[r][col].is_zero_marker()) continue;
      int v = m[r][col].valuation();
      if (v < best_v) {
        best_v = v;
        best = r;
      }
    }
    if (best == n) throw PrecisionError("singular or under-resolved linear system in extension construction");
    std::swap(m[col], m[best]);
    std::swap(b[col], b[best]);
    const Elem inv = m[col][col].inv();
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero_marker()) continue;
      const Elem f = m[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) m[r][c] = m[r][c] - f * m[col][c];
      b[r] = b[r] - f * b[col];
    }
  }
  std::vector<Elem> x(n, zero);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
  return x;
}

inline u64 binom(u64 n, u64 k) {
  u64 r = 1;
  for (u64 i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Sum of c_i g^i in the field of g (coefficients from an ancestor).
inline Elem evaluate(const FieldPtr& E, const std::vector<Elem>& coeffs, const Elem& g) {
  Elem acc = Elem::zero(E, 4 * E->precision());
  Elem pw = Elem::one(E);
  for (const auto& c : coeffs) {
    acc = acc + embed(E, c) * pw;
    pw = pw * g;
  }
  return acc;
}

}  // namespace detail

enum class KummerShape { Uniformizer, RamifiedUnit, Unramified };

inline const char* to_string(KummerShape s) {
  switch (s) {
    case KummerShape::Uniformizer: return "ramified (non-unit radicand)";
    case KummerShape::RamifiedUnit: return "ramified (unit radicand)";
    case KummerShape::Unramified: return "unramified";
  }
  return "?";
}

class KummerExtension {
 public:
  /// E = F(a^{1/p}); rejects a in F^xp.
  static KummerExtension build(const FieldPtr& F, const Elem& a, std::optional<int> precision = std::nullopt) {
    if (!F->has_mu_p()) throw InputError("Kummer step requires a primitive p-th root of unity in the base");
    if (a.field().get() != F.get()) throw InternalError("radicand lives in a different field");
    if (a.is_zero_marker()) throw InputError("radicand is zero within precision");
    if (is_pth_power(a)) throw InputError("a is a p-th power; extension degenerate");
    KummerExtension k = construct(F, a, precision);
    const int need = minimum_precision(F->p(), k.top_->ramification());
    const int got = k.certify();
    if (got >= k.top_->precision()) return k;
    if (got < need)
      throw PrecisionError("Kummer step certified only to " + std::to_string(got) + " digits, need " +
                           std::to_string(need) + "; raise the base precision");
    k = construct(F, a, got);
    if (k.certify() < k.top_->precision()) throw PrecisionError("Kummer step failed to certify after rebuild");
    return k;
  }

  const FieldPtr& base() const { return base_; }
  const FieldPtr& top() const { return top_; }
  const Elem& a() const { return a_; }
  /// The chosen p-th root A of a, in the top field.
  const Elem& root() const { return A_; }
  KummerShape shape() const { return shape_; }
  bool ramified() const { return shape_ != KummerShape::Unramified; }

  /// sigma(x) for x in the top field.
  Elem sigma(const Elem& x) const {
    if (x.field().get() != top_.get()) throw InternalError("sigma applied outside the top field");
    if (x.is_zero_marker()) return x;
    const auto& E = *top_;
    const auto& P = *base_;
    const Coeffs& u = x.unit_part();
    const auto np = static_cast<std::size_t>(P.degree());
    Coeffs acc = E.zero();
    Coeffs pw = E.one();
    for (int i = 0; i < E.step_degree(); ++i) {
      Coeffs b(u.begin() + static_cast<std::ptrdiff_t>(np * static_cast<std::size_t>(i)),
               u.begin() + static_cast<std::ptrdiff_t>(np * static_cast<std::size_t>(i + 1)));
      acc = E.add(acc, E.mul(E.embed_parent(b), pw));
      pw = E.mul(pw, sigma_gen_);
    }
    Elem su = Elem::unit(top_, acc).with_precision(x.rel_precision());
    return su * sigma_pi_.pow(x.valuation());
  }

  Elem sigma_pow(Elem x, int k) const {
    k = ((k % static_cast<int>(base_->p())) + static_cast<int>(base_->p())) % static_cast<int>(base_->p());
    for (int i = 0; i < k; ++i) x = sigma(x);
    return x;
  }

  /// Image of a base element in the top field.
  Elem up(const Elem& c) const { return embed(top_, c); }

  /// Product of the p conjugates, returned as a base element.
  Elem norm_down(const Elem& x) const {
    if (x.is_zero_marker()) throw PrecisionError("norm of an element indistinguishable from zero");
    Elem y = x;
    Elem cur = x;
    for (u64 k = 1; k < base_->p(); ++k) {
      cur = sigma(cur);
      y = y * cur;
    }
    return descend(y);
  }

  /// Converts a top-field element lying in the base back into the base.
  Elem descend(const Elem& y) const {
    const int es = top_->step_ramification();
    const int v = y.valuation();
    if (v % es != 0) throw CheckFailure("element has valuation outside the base value group");
    const int w = v / es;
    Elem z = y * embed(top_, Elem::uniformizer(base_)).pow(-w);  // unit of O_E
    const int abs = z.abs_precision();
    const auto& E = *top_;
    const auto& P = *base_;
    const Coeffs zi = z.integral();
    const auto np = static_cast<std::size_t>(P.degree());
    for (int i = 1; i < E.step_degree(); ++i) {
      Coeffs b(zi.begin() + static_cast<std::ptrdiff_t>(np * static_cast<std::size_t>(i)),
               zi.begin() + static_cast<std::ptrdiff_t>(np * static_cast<std::size_t>(i + 1)));
      int pv = P.val(b);
      int ev = pv >= kInfVal ? kInfVal : (E.kind() == StepKind::Eisenstein ? es * pv + i : pv);
      if (ev < abs)
        throw CheckFailure("conjugate product is not in the base field within precision (component " +
                           std::to_string(i) + ")");
    }
    Coeffs b0(zi.begin(), zi.begin() + static_cast<std::ptrdiff_t>(np));
    Elem base_unit = Elem::from_integral(base_, b0, abs / es);
    return base_unit * Elem::uniformizer(base_).pow(w);
  }

 private:
  KummerExtension() = default;

  static KummerExtension construct(const FieldPtr& F, const Elem& a, std::optional<int> precision) {
    KummerExtension k;
    k.base_ = F;
    k.a_ = a;
    const u64 pu = F->p();
    const int p = static_cast<int>(pu);
    const Elem xi = Elem::root_of_unity(F);
    const Elem pi = Elem::uniformizer(F);
    const Elem one = Elem::one(F);
    const int v = a.valuation();
    const int vm = ((v % p) + p) % p;
    const std::string name = F->name() + "(" + std::string("a^(1/") + std::to_string(p) + "))";

    if (vm != 0) {
      k.shape_ = KummerShape::Uniformizer;
      int t = 1;
      while ((vm * t) % p != 1) ++t;
      const int w = (v * t - 1) / p;  // exact: v t = 1 + p w
      const Elem ap = a.pow(t) * pi.pow(-static_cast<i64>(p) * w);
      std::vector<Coeffs> poly(static_cast<std::size_t>(p), F->zero());
      poly[0] = (-ap).integral();
      auto E = LocalField::with_polynomial(F, StepKind::Eisenstein, std::move(poly), precision, name);
      k.top_ = E;
      const Elem Pi = Elem::uniformizer(E);
      int tp = 1;
      while ((t * tp) % p != 1) ++tp;
      const int l = (t * tp - 1) / p;
      k.A_ = (Pi * embed(E, pi).pow(w)).pow(tp) * embed(E, a).pow(-l);
      const Elem xit = embed(E, xi.pow(t));
      k.sigma_gen_ = (xit * Pi).integral();
      k.sigma_pi_ = xit * Pi;
      return k;
    }

    // a = pi^v u; strip the Teichmueller part and p-th-power levels.
    const UnitFiltration filt(F);
    const int c = filt.wild_level();
    const int m = F->ramification() / (p - 1);
    Elem u = a.unit_elem();
    const Elem om = teichmueller(u);
    u64 inv_p = 1;
    const u64 q1 = F->residue_size() - 1;
    while (q1 > 1 && (inv_p * pu) % q1 != 1 % q1) ++inv_p;
    Elem scalar = pi.pow(v / p) * om.pow(static_cast<i64>(inv_p));
    Elem u1 = u / om;
    for (int guard = 0;; ++guard) {
      if (guard > 4 * c + 4) throw InternalError("Kummer normalization did not terminate");
      Elem w = u1 - one;
      if (w.vanishes_to(c + 1) || w.valuation() > c) throw InternalError("radicand became a p-th power");
      const int j = w.valuation();
      const auto t = w.shift(-j).residue();
      if (j < c && j % p == 0) {
        Elem g = one + Elem::unit(F, F->lift(F->rproot(t))).shift(j / p);
        u1 = u1 / g.pow(p);
        scalar = scalar * g;
        continue;
      }
      if (j == c) {
        if (auto s = filt.wp_preimage(t)) {
          Elem g = one + Elem::unit(F, F->lift(*s)).shift(m);
          u1 = u1 / g.pow(p);
          scalar = scalar * g;
          continue;
        }
        k.shape_ = KummerShape::Unramified;
        // gamma = (U - 1)/pi^m, root of pi^{-pm}((pi^m x + 1)^p - u1).
        std::vector<Coeffs> poly;
        poly.push_back(((one - u1) * pi.pow(-static_cast<i64>(p) * m)).integral());
        for (int i = 1; i < p; ++i) {
          Elem coef = Elem::integer(F, static_cast<i64>(detail::binom(pu, static_cast<u64>(i)))) *
                      pi.pow(static_cast<i64>(m) * i - static_cast<i64>(p) * m);
          poly.push_back(coef.integral());
        }
        auto E = LocalField::with_polynomial(F, StepKind::Unramified, std::move(poly), precision, name);
        k.top_ = E;
        const Elem gamma = Elem::unit(E, E->generator());
        const Elem piE = embed(E, pi);
        const Elem U = Elem::one(E) + piE.pow(m) * gamma;
        k.A_ = embed(E, scalar) * U;
        const Elem xiE = embed(E, xi);
        // sigma(gamma) = (xi - 1)/pi^m + xi gamma
        const Elem sg = embed(E, (xi - one) * pi.pow(-m)) + xiE * gamma;
        k.sigma_gen_ = sg.integral();
        k.sigma_pi_ = Elem::uniformizer(E);
        return k;
      }
      // Ramified unit case.
      k.shape_ = KummerShape::RamifiedUnit;
      int s = 1;
      while ((s * j) % p != 1) ++s;
      const int kk = (s * j - 1) / p;
      // Work in R = F[X]/(X^p - u1), X standing for U.
      const Elem zero = Elem::zero(F, 4 * F->precision());
      auto rmul = [&](const std::vector<Elem>& x, const std::vector<Elem>& y) {
        std::vector<Elem> prod(static_cast<std::size_t>(2 * p - 1), zero);
        for (int i = 0; i < p; ++i)
          for (int jj = 0; jj < p; ++jj)
            prod[static_cast<std::size_t>(i + jj)] =
                prod[static_cast<std::size_t>(i + jj)] + x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(jj)];
        for (int d = 2 * p - 2; d >= p; --d)
          prod[static_cast<std::size_t>(d - p)] = prod[static_cast<std::size_t>(d - p)] + prod[static_cast<std::size_t>(d)] * u1;
        prod.resize(static_cast<std::size_t>(p));
        return prod;
      };
      std::vector<Elem> xm1(static_cast<std::size_t>(p), zero);
      xm1[0] = -one;
      xm1[1] = one;
      std::vector<Elem> piR(static_cast<std::size_t>(p), zero);
      piR[0] = pi.pow(-kk);
      for (int i = 0; i < s; ++i) piR = rmul(piR, xm1);
      // Multiplication matrix of Pi on the basis X^i.
      std::vector<std::vector<Elem>> mat(static_cast<std::size_t>(p), std::vector<Elem>(static_cast<std::size_t>(p), zero));
      std::vector<Elem> basis(static_cast<std::size_t>(p), zero);
      basis[0] = one;
      for (int col = 0; col < p; ++col) {
        auto img = rmul(piR, basis);
        for (int r = 0; r < p; ++r) mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] = img[static_cast<std::size_t>(r)];
        std::vector<Elem> xs(static_cast<std::size_t>(p), zero);
        xs[1] = one;
        basis = rmul(basis, xs);
      }
      auto cp = detail::charpoly(mat, zero);
      std::vector<Coeffs> poly;
      for (int i = 0; i < p; ++i) {
        const Elem& ci = cp[static_cast<std::size_t>(i)];
        if (ci.is_zero_marker()) {
          if (ci.abs_precision() < 1) throw PrecisionError("characteristic polynomial under-resolved");
          poly.push_back(F->zero());
        } else {
          poly.push_back(ci.integral());
        }
      }
      auto E = LocalField::with_polynomial(F, StepKind::Eisenstein, std::move(poly), precision, name);
      k.top_ = E;
      // Express X in powers of Pi: columns are Pi^i in the X basis.
      std::vector<std::vector<Elem>> pm(static_cast<std::size_t>(p), std::vector<Elem>(static_cast<std::size_t>(p), zero));
      std::vector<Elem> pw(static_cast<std::size_t>(p), zero);
      pw[0] = one;
      for (int col = 0; col < p; ++col) {
        for (int r = 0; r < p; ++r) pm[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] = pw[static_cast<std::size_t>(r)];
        pw = rmul(pw, piR);
      }
      std::vector<Elem> rhs(static_cast<std::size_t>(p), zero);
      rhs[1] = one;
      auto d = detail::solve(pm, rhs, zero);
      const Elem PiE = Elem::uniformizer(E);
      const Elem U = detail::evaluate(E, d, PiE);
      k.A_ = embed(E, scalar) * U;
      // sigma(Pi) = piR(xi X) evaluated at X = U.
      std::vector<Elem> twisted(static_cast<std::size_t>(p), zero);
      Elem xp = one;
      for (int i = 0; i < p; ++i) {
        twisted[static_cast<std::size_t>(i)] = piR[static_cast<std::size_t>(i)] * xp;
        xp = xp * xi;
      }
      const Elem sPi = detail::evaluate(E, twisted, U);
      k.sigma_gen_ = sPi.integral();
      k.sigma_pi_ = sPi;
      return k;
    }
  }

  // Returns the number of digits (relative to the top field) to which the
  // construction is verified.
  int certify() const {
    const auto& E = top_;
    int digits = E->precision();
    auto agreement = [&](const Elem& x, const Elem& y) {
      Elem d = x - y;
      if (d.is_zero_marker()) {
        if (d.abs_precision() - x.valuation() < minimum_precision(E->p(), E->ramification()))
          throw PrecisionError("Kummer step verified to too few digits");
        return E->precision();
      }
      return d.valuation() - x.valuation();
    };
    const Elem aE = embed(E, a_);
    digits = std::min(digits, agreement(A_.pow(static_cast<i64>(base_->p())), aE));
    const Elem xiE = embed(E, Elem::root_of_unity(base_));
    digits = std::min(digits, agreement(sigma(A_), xiE * A_));
    const Elem g = Elem::from_integral(E, E->generator(), E->precision() + E->val(E->generator()));
    Elem h = g;
    for (u64 i = 0; i < base_->p(); ++i) h = sigma(h);
    digits = std::min(digits, agreement(h, g));
    return digits;
  }

  FieldPtr base_, top_;
  Elem a_, A_;
  KummerShape shape_ = KummerShape::Uniformizer;
  Coeffs sigma_gen_;
  Elem sigma_pi_;
};

}  // namespace knorm::padic
