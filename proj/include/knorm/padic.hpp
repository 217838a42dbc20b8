#pragma once

// Finite-precision arithmetic in towers over Q_p.
//
// A LocalField is one level of a tower: Q_p itself, or a degree-d step over
// its parent given by a monic polynomial that is either Eisenstein or has
// irreducible reduction (unramified). The ring of integers of each level is
// the polynomial ring over the parent's integers modulo the step polynomial,
// so an integral element is a flat vector of coordinates over Z/p^M in the
// tower's power basis. M is fixed per prime (largest with p^M < 2^62) and is
// far larger than any tracked precision.
//
// Field elements carry relative precision: x = pi^v * u with u a unit known
// modulo pi^rel. Elements with every retained digit zero are "undetermined
// zeros" (known only modulo pi^abs); inverting one, or asking its valuation,
// throws PrecisionError.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "knorm/errors.hpp"
#include "knorm/fplin.hpp"

namespace knorm::padic {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using Coeffs = std::vector<u64>;

inline constexpr int kInfVal = INT_MAX / 4;

class LocalField;
using FieldPtr = std::shared_ptr<const LocalField>;

enum class StepKind { Base, Unramified, Eisenstein };

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

/// Default working precision in uniformizer digits: 4*ceil(p e/(p-1)) + 10.
inline int default_precision(u64 p, int e) {
  return 4 * ceil_div(static_cast<int>(p) * e, static_cast<int>(p) - 1) + 10;
}

/// Smallest precision at which p-th-power decisions are possible.
inline int minimum_precision(u64 p, int e) {
  return ceil_div(static_cast<int>(p) * e, static_cast<int>(p) - 1) + 2;
}

class LocalField : public std::enable_shared_from_this<LocalField> {
 public:
  // ---- construction -------------------------------------------------------

  static FieldPtr qp(u64 p, std::optional<int> precision = std::nullopt);

  /// Unramified step of the given degree; the step polynomial is the
  /// lexicographically first monic irreducible over the residue field.
  static FieldPtr unramified(const FieldPtr& parent, int degree,
                             std::optional<int> precision = std::nullopt);

  /// Step with an explicit monic polynomial (coefficients f_0..f_{d-1},
  /// integral elements of the parent). Kind decides the validity check.
  static FieldPtr with_polynomial(const FieldPtr& parent, StepKind kind, std::vector<Coeffs> poly,
                                  std::optional<int> precision = std::nullopt,
                                  std::string name = {});

  // ---- structure ----------------------------------------------------------

  u64 p() const { return p_; }
  int modulus_digits() const { return M_; }
  u64 modulus() const { return pm_; }
  const FieldPtr& parent() const { return parent_; }
  StepKind kind() const { return kind_; }
  int step_degree() const { return d_; }
  int degree() const { return N_; }  // absolute degree over Q_p
  int ramification() const { return e_; }
  int residue_degree() const { return f_; }
  int step_ramification() const { return e_step_; }
  int precision() const { return P_; }
  int level() const { return parent_ ? parent_->level() + 1 : 0; }
  const std::vector<Coeffs>& step_polynomial() const { return poly_; }
  const std::string& name() const { return name_; }
  bool has_mu_p() const { return has_mu_p_; }

  /// Residue field size q = p^f.
  u64 residue_size() const { return q_; }

  /// c = p e/(p-1) (only meaningful when mu_p is present).
  int wild_bound() const { return static_cast<int>(p_) * e_ / (static_cast<int>(p_) - 1); }

  bool is_ancestor_of(const LocalField& other) const {
    for (const LocalField* k = &other; k; k = k->parent_.get())
      if (k == this) return true;
    return false;
  }

  // ---- integral ring O/p^M -------------------------------------------------

  Coeffs zero() const { return Coeffs(static_cast<std::size_t>(N_), 0); }
  Coeffs one() const {
    auto c = zero();
    c[0] = 1;
    return c;
  }
  Coeffs from_int(i64 n) const {
    auto c = zero();
    c[0] = reduce_signed(n);
    return c;
  }
  u64 reduce_signed(i64 n) const {
    i64 m = static_cast<i64>(pm_);
    i64 r = n % m;
    if (r < 0) r += m;
    return static_cast<u64>(r);
  }

  Coeffs add(const Coeffs& a, const Coeffs& b) const {
    Coeffs r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      u64 s = a[i] + b[i];
      r[i] = s >= pm_ ? s - pm_ : s;
    }
    return r;
  }
  Coeffs sub(const Coeffs& a, const Coeffs& b) const {
    Coeffs r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + pm_ - b[i];
    return r;
  }
  Coeffs neg(const Coeffs& a) const { return sub(zero(), a); }
  Coeffs scale(const Coeffs& a, u64 s) const {
    Coeffs r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mulmod(a[i], s % pm_);
    return r;
  }

  Coeffs mul(const Coeffs& a, const Coeffs& b) const;
  Coeffs pow(Coeffs a, u64 k) const {
    Coeffs r = one();
    while (k) {
      if (k & 1) r = mul(r, a);
      a = mul(a, a);
      k >>= 1;
    }
    return r;
  }

  /// Valuation in this level's uniformizer; kInfVal for the zero vector.
  int val(const Coeffs& a) const;
  /// a / pi, assuming val(a) >= 1.
  Coeffs div_pi(const Coeffs& a) const;
  Coeffs div_pi(Coeffs a, int k) const {
    for (int i = 0; i < k; ++i) a = div_pi(a);
    return a;
  }
  Coeffs mul_pi(const Coeffs& a) const { return mul(a, uniformizer_); }
  Coeffs mul_pi(Coeffs a, int k) const {
    for (int i = 0; i < k; ++i) a = mul_pi(a);
    return a;
  }
  /// Inverse of a unit.
  Coeffs unit_inverse(const Coeffs& a) const;

  const Coeffs& uniformizer() const { return uniformizer_; }
  /// pi_parent / pi^{e_step} as a unit of this level.
  const Coeffs& parent_uniformizer_ratio() const { return eps_; }
  /// Places a parent integral element into block 0.
  Coeffs embed_parent(const Coeffs& c) const {
    auto r = zero();
    std::copy(c.begin(), c.end(), r.begin());
    return r;
  }
  /// Generator of the step as an integral element.
  Coeffs generator() const {
    auto r = zero();
    if (!parent_) {
      r[0] = 1;
      return r;
    }
    r[static_cast<std::size_t>(parent_->N_)] = 1;
    return r;
  }

  // ---- residue field ------------------------------------------------------

  using Res = std::uint32_t;  // residue as a base-p digit index in [0, q)

  Res residue(const Coeffs& a) const {
    Res idx = 0, mult = 1;
    for (int pos : residue_pos_) {
      idx += static_cast<Res>((a[static_cast<std::size_t>(pos)] % p_) * mult);
      mult *= static_cast<Res>(p_);
    }
    return idx;
  }
  Coeffs lift(Res r) const {
    auto c = zero();
    for (int pos : residue_pos_) {
      c[static_cast<std::size_t>(pos)] = r % p_;
      r /= static_cast<Res>(p_);
    }
    return c;
  }
  /// Residue digits over F_p (length f).
  fplin::Vec residue_digits(Res r) const {
    fplin::Vec v(static_cast<std::size_t>(f_));
    for (auto& x : v) {
      x = r % p_;
      r /= static_cast<Res>(p_);
    }
    return v;
  }
  Res residue_from_digits(const fplin::Vec& v) const {
    Res idx = 0, mult = 1;
    for (auto x : v) {
      idx += static_cast<Res>(x % p_) * mult;
      mult *= static_cast<Res>(p_);
    }
    return idx;
  }
  Res radd(Res a, Res b) const {
    Res r = 0, mult = 1;
    for (int i = 0; i < f_; ++i) {
      r += static_cast<Res>(((a % p_) + (b % p_)) % p_) * mult;
      a /= static_cast<Res>(p_);
      b /= static_cast<Res>(p_);
      mult *= static_cast<Res>(p_);
    }
    return r;
  }
  Res rneg(Res a) const {
    Res r = 0, mult = 1;
    for (int i = 0; i < f_; ++i) {
      r += static_cast<Res>((p_ - a % p_) % p_) * mult;
      a /= static_cast<Res>(p_);
      mult *= static_cast<Res>(p_);
    }
    return r;
  }
  Res rmul(Res a, Res b) const { return rmul_[a * q_ + b]; }
  Res rpow(Res a, u64 k) const {
    Res r = 1;
    while (k) {
      if (k & 1) r = rmul(r, a);
      a = rmul(a, a);
      k >>= 1;
    }
    return r;
  }
  Res rinv(Res a) const {
    if (a == 0) throw InternalError("inverse of zero residue");
    return rpow(a, q_ - 2);
  }
  /// Unique s with s^p = a.
  Res rproot(Res a) const { return rpow(a, q_ / p_); }

  /// Integral coordinates of the primitive p-th root of unity (a unit).
  const Coeffs& root_of_unity() const {
    if (!has_mu_p_) throw InputError("primitive p-th root of unity required");
    return xi_;
  }

  std::string describe() const;

 private:
  LocalField() = default;
  void finish(std::optional<int> precision);
  void find_root_of_unity();
  bool residue_poly_irreducible(const std::vector<Res>& monic_low) const;

  u64 mulmod(u64 a, u64 b) const { return static_cast<u64>(static_cast<u128>(a) * b % pm_); }
  Coeffs block(const Coeffs& a, int i) const {
    const auto n = static_cast<std::size_t>(parent_->N_);
    return Coeffs(a.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::size_t>(i)),
                  a.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::size_t>(i + 1)));
  }
  void set_block(Coeffs& a, int i, const Coeffs& b) const {
    const auto n = static_cast<std::size_t>(parent_->N_);
    std::copy(b.begin(), b.end(), a.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::size_t>(i)));
  }

  u64 p_ = 2;
  int M_ = 1;
  u64 pm_ = 2;
  FieldPtr parent_;
  StepKind kind_ = StepKind::Base;
  int d_ = 1;
  std::vector<Coeffs> poly_;
  int N_ = 1, e_ = 1, f_ = 1, e_step_ = 1, P_ = 0;
  u64 q_ = 2;
  Coeffs uniformizer_, h_, eps_;
  std::vector<int> residue_pos_;
  std::vector<Res> rmul_;
  bool has_mu_p_ = false;
  Coeffs xi_;
  std::string name_;
};

// ---------------------------------------------------------------------------

/// A field element pi^v * u with u a unit known modulo pi^rel, or an
/// undetermined zero known modulo pi^abs.
class Elem {
 public:
  Elem() = default;

  static Elem zero(FieldPtr f, int abs_prec) {
    Elem e;
    e.F_ = std::move(f);
    e.zero_ = true;
    e.prec_ = std::min(abs_prec, e.F_->precision() * 4);
    return e;
  }

  /// Normalizes an integral vector known modulo pi^abs_prec.
  static Elem from_integral(FieldPtr f, const Coeffs& c, int abs_prec) {
    int v = f->val(c);
    if (v >= abs_prec) return zero(std::move(f), abs_prec);
    Elem e;
    e.F_ = std::move(f);
    e.v_ = v;
    e.u_ = e.F_->div_pi(c, v);
    e.prec_ = std::min(abs_prec - v, e.F_->precision());
    return e;
  }

  static Elem integer(FieldPtr f, i64 n) {
    if (n == 0) throw InputError("zero is not a unit of any field");
    auto c = f->from_int(n);
    const int full = f->precision() + f->val(c);
    return from_integral(std::move(f), c, full);
  }

  static Elem one(FieldPtr f) { return integer(std::move(f), 1); }

  static Elem uniformizer(FieldPtr f) {
    Elem e;
    e.F_ = std::move(f);
    e.v_ = 1;
    e.u_ = e.F_->one();
    e.prec_ = e.F_->precision();
    return e;
  }

  /// Unit with the given integral coordinates at full precision.
  static Elem unit(FieldPtr f, Coeffs u) {
    if (f->val(u) != 0) throw InternalError("Elem::unit called on a non-unit");
    Elem e;
    e.F_ = std::move(f);
    e.u_ = std::move(u);
    e.prec_ = e.F_->precision();
    return e;
  }

  static Elem root_of_unity(FieldPtr f) {
    auto c = f->root_of_unity();
    return unit(std::move(f), std::move(c));
  }

  const FieldPtr& field() const { return F_; }
  bool is_zero_marker() const { return zero_; }

  int valuation() const {
    if (zero_)
      throw PrecisionError("valuation of an element indistinguishable from zero (known mod pi^" +
                           std::to_string(prec_) + ")");
    return v_;
  }
  /// Relative precision (for zero markers: absolute precision).
  int rel_precision() const { return prec_; }
  int abs_precision() const { return zero_ ? prec_ : v_ + prec_; }
  const Coeffs& unit_part() const {
    if (zero_) throw PrecisionError("unit part of an undetermined zero");
    return u_;
  }
  Elem unit_elem() const {
    Elem e = *this;
    (void)valuation();
    e.v_ = 0;
    return e;
  }

  /// pi^v u as an integral vector; requires v >= 0.
  Coeffs integral() const {
    if (zero_) return F_->zero();
    if (v_ < 0) throw InternalError("integral() on an element of negative valuation");
    return F_->mul_pi(u_, v_);
  }

  Elem with_precision(int rel) const {
    Elem e = *this;
    e.prec_ = std::min(e.prec_, rel);
    return e;
  }

  Elem operator*(const Elem& o) const {
    same_field(o);
    if (zero_ || o.zero_) {
      int a = zero_ ? prec_ : v_;
      int b = o.zero_ ? o.prec_ : o.v_;
      return zero(F_, a + b);
    }
    Elem e;
    e.F_ = F_;
    e.v_ = v_ + o.v_;
    e.u_ = F_->mul(u_, o.u_);
    e.prec_ = std::min(prec_, o.prec_);
    return e;
  }

  Elem operator+(const Elem& o) const {
    same_field(o);
    const int abs = std::min(abs_precision(), o.abs_precision());
    if (zero_ && o.zero_) return zero(F_, abs);
    if (zero_) return o.with_abs(abs);
    if (o.zero_) return with_abs(abs);
    const int v = std::min(v_, o.v_);
    if (v >= abs) return zero(F_, abs);
    Coeffs s = F_->zero();
    if (v_ < abs) s = F_->add(s, F_->mul_pi(u_, v_ - v));
    if (o.v_ < abs) s = F_->add(s, F_->mul_pi(o.u_, o.v_ - v));
    int w = F_->val(s);
    if (v + w >= abs) return zero(F_, abs);
    Elem e;
    e.F_ = F_;
    e.v_ = v + w;
    e.u_ = F_->div_pi(s, w);
    e.prec_ = std::min(abs - e.v_, F_->precision());
    return e;
  }

  Elem operator-() const {
    if (zero_) return *this;
    Elem e = *this;
    e.u_ = F_->neg(u_);
    return e;
  }
  Elem operator-(const Elem& o) const { return *this + (-o); }

  Elem inv() const {
    if (zero_) throw PrecisionError("inverting an element indistinguishable from zero");
    Elem e = *this;
    e.v_ = -v_;
    e.u_ = F_->unit_inverse(u_);
    return e;
  }
  Elem operator/(const Elem& o) const { return *this * o.inv(); }

  Elem pow(i64 k) const {
    if (k < 0) return inv().pow(-k);
    if (zero_) return k == 0 ? one(F_) : zero(F_, prec_ * static_cast<int>(std::min<i64>(k, 64)));
    Elem e = *this;
    e.v_ = static_cast<int>(v_ * k);
    e.u_ = F_->pow(u_, static_cast<u64>(k));
    return e;
  }

  /// Multiply by pi^k.
  Elem shift(int k) const {
    Elem e = *this;
    if (zero_)
      e.prec_ += k;
    else
      e.v_ += k;
    return e;
  }

  /// True when this element is zero modulo pi^abs.
  bool vanishes_to(int abs) const { return zero_ ? prec_ >= abs : v_ >= abs; }

  /// Residue of a unit.
  LocalField::Res residue() const {
    if (valuation() != 0) throw InternalError("residue of a non-unit");
    return F_->residue(u_);
  }

 private:
  void same_field(const Elem& o) const {
    if (F_.get() != o.F_.get()) throw InternalError("arithmetic between elements of different fields");
  }
  Elem with_abs(int abs) const {
    if (zero_) return zero(F_, std::min(prec_, abs));
    if (v_ >= abs) return zero(F_, abs);
    Elem e = *this;
    e.prec_ = std::min(prec_, abs - v_);
    return e;
  }

  FieldPtr F_;
  bool zero_ = false;
  int v_ = 0;
  Coeffs u_;
  int prec_ = 0;
};

/// True when a and b agree modulo pi^abs.
inline bool agree(const Elem& a, const Elem& b, int abs) { return (a - b).vanishes_to(abs); }

// ---------------------------------------------------------------------------
// LocalField implementation

inline Coeffs LocalField::mul(const Coeffs& a, const Coeffs& b) const {
  if (!parent_) return Coeffs{mulmod(a[0], b[0])};
  const auto& P = *parent_;
  std::vector<Coeffs> prod(static_cast<std::size_t>(2 * d_ - 1), P.zero());
  std::vector<Coeffs> ab, bb;
  for (int i = 0; i < d_; ++i) {
    ab.push_back(block(a, i));
    bb.push_back(block(b, i));
  }
  auto nil = [](const Coeffs& c) { return std::all_of(c.begin(), c.end(), [](u64 x) { return x == 0; }); };
  std::vector<bool> az, bz;
  for (int i = 0; i < d_; ++i) {
    az.push_back(nil(ab[static_cast<std::size_t>(i)]));
    bz.push_back(nil(bb[static_cast<std::size_t>(i)]));
  }
  for (int i = 0; i < d_; ++i) {
    if (az[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < d_; ++j) {
      if (bz[static_cast<std::size_t>(j)]) continue;
      auto& slot = prod[static_cast<std::size_t>(i + j)];
      slot = P.add(slot, P.mul(ab[static_cast<std::size_t>(i)], bb[static_cast<std::size_t>(j)]));
    }
  }
  for (int k = 2 * d_ - 2; k >= d_; --k) {
    const Coeffs c = prod[static_cast<std::size_t>(k)];
    if (std::all_of(c.begin(), c.end(), [](u64 x) { return x == 0; })) continue;
    for (int t = 0; t < d_; ++t) {
      auto& slot = prod[static_cast<std::size_t>(k - d_ + t)];
      slot = P.sub(slot, P.mul(c, poly_[static_cast<std::size_t>(t)]));
    }
  }
  Coeffs r = zero();
  for (int i = 0; i < d_; ++i) set_block(r, i, prod[static_cast<std::size_t>(i)]);
  return r;
}

inline int LocalField::val(const Coeffs& a) const {
  if (!parent_) {
    u64 x = a[0];
    if (x == 0) return kInfVal;
    int v = 0;
    while (x % p_ == 0) {
      x /= p_;
      ++v;
    }
    return v;
  }
  int best = kInfVal;
  for (int i = 0; i < d_; ++i) {
    int pv = parent_->val(block(a, i));
    if (pv >= kInfVal) continue;
    int v = kind_ == StepKind::Eisenstein ? e_step_ * pv + i : pv;
    best = std::min(best, v);
  }
  return best;
}

inline Coeffs LocalField::div_pi(const Coeffs& a) const {
  if (!parent_) {
    if (a[0] % p_ != 0) throw InternalError("div_pi on a unit");
    return Coeffs{a[0] / p_};
  }
  Coeffs r = zero();
  if (kind_ == StepKind::Unramified) {
    for (int i = 0; i < d_; ++i) set_block(r, i, parent_->div_pi(block(a, i)));
    return r;
  }
  for (int i = 1; i < d_; ++i) set_block(r, i - 1, block(a, i));
  Coeffs c0 = block(a, 0);
  if (parent_->val(c0) < kInfVal) r = add(r, mul(embed_parent(parent_->div_pi(c0)), h_));
  return r;
}

inline Coeffs LocalField::unit_inverse(const Coeffs& a) const {
  Res r = residue(a);
  if (r == 0) throw InternalError("unit_inverse of a non-unit");
  Coeffs y = lift(rinv(r));
  const Coeffs two = from_int(2);
  for (int it = 0; it < 80; ++it) {
    Coeffs ay = mul(a, y);
    if (ay == one()) return y;
    y = mul(y, sub(two, ay));
  }
  throw InternalError("unit_inverse: Newton iteration did not converge");
}

inline FieldPtr LocalField::qp(u64 p, std::optional<int> precision) {
  if (p >= (1u << 16) || !fplin::is_prime(p)) throw InputError("p must be a prime below 2^16");
  auto f = std::shared_ptr<LocalField>(new LocalField());
  f->p_ = p;
  int M = 0;
  u128 pm = 1;
  while (pm * p < (u128{1} << 62)) {
    pm *= p;
    ++M;
  }
  f->M_ = M;
  f->pm_ = static_cast<u64>(pm);
  f->kind_ = StepKind::Base;
  f->d_ = 1;
  f->N_ = 1;
  f->e_ = 1;
  f->f_ = 1;
  f->e_step_ = 1;
  f->uniformizer_ = Coeffs{p};
  f->eps_ = Coeffs{1};
  f->residue_pos_ = {0};
  f->name_ = "Q" + std::to_string(p);
  f->finish(precision);
  return f;
}

inline bool LocalField::residue_poly_irreducible(const std::vector<Res>& low) const {
  // Monic polynomial x^k + low[k-1] x^{k-1} + ... + low[0] over the residue
  // field of this level; irreducible iff no monic factor of degree <= k/2.
  const int k = static_cast<int>(low.size());
  using Poly = std::vector<Res>;  // low -> high, monic implied by caller where needed
  Poly f(low);
  f.push_back(1);
  auto divides = [&](const Poly& g) {
    Poly rem = f;
    const int dg = static_cast<int>(g.size()) - 1;
    for (int i = static_cast<int>(rem.size()) - 1; i >= dg; --i) {
      Res c = rem[static_cast<std::size_t>(i)];
      if (!c) continue;
      for (int j = 0; j <= dg; ++j) {
        auto& s = rem[static_cast<std::size_t>(i - dg + j)];
        s = radd(s, rneg(rmul(c, g[static_cast<std::size_t>(j)])));
      }
    }
    for (int i = 0; i < dg; ++i)
      if (rem[static_cast<std::size_t>(i)]) return false;
    return true;
  };
  for (int dg = 1; 2 * dg <= k; ++dg) {
    u64 count = 1;
    for (int i = 0; i < dg; ++i) count *= q_;
    for (u64 idx = 0; idx < count; ++idx) {
      Poly g(static_cast<std::size_t>(dg + 1));
      u64 t = idx;
      for (int i = 0; i < dg; ++i) {
        g[static_cast<std::size_t>(i)] = static_cast<Res>(t % q_);
        t /= q_;
      }
      g[static_cast<std::size_t>(dg)] = 1;
      if (divides(g)) return false;
    }
  }
  return true;
}

inline FieldPtr LocalField::unramified(const FieldPtr& parent, int degree, std::optional<int> precision) {
  if (degree < 1) throw InputError("unramified degree must be positive");
  if (degree == 1) throw InputError("unramified step of degree 1 is trivial");
  u64 count = 1;
  for (int i = 0; i < degree; ++i) {
    count *= parent->q_;
    if (count > (u64{1} << 24)) throw Unsupported("unramified step too large to search");
  }
  for (u64 idx = 0; idx < count; ++idx) {
    std::vector<Res> low(static_cast<std::size_t>(degree));
    u64 t = idx;
    for (auto& c : low) {
      c = static_cast<Res>(t % parent->q_);
      t /= parent->q_;
    }
    if (low[0] == 0) continue;
    if (!parent->residue_poly_irreducible(low)) continue;
    std::vector<Coeffs> poly;
    for (auto c : low) poly.push_back(parent->lift(c));
    return with_polynomial(parent, StepKind::Unramified, std::move(poly), precision);
  }
  throw InternalError("no irreducible polynomial found");
}

inline FieldPtr LocalField::with_polynomial(const FieldPtr& parent, StepKind kind, std::vector<Coeffs> poly,
                                            std::optional<int> precision, std::string name) {
  if (!parent) throw InputError("step requires a parent field");
  const int d = static_cast<int>(poly.size());
  if (d < 2) throw InputError("step polynomial must have degree at least 2");
  for (auto& c : poly) {
    if (c.size() != static_cast<std::size_t>(parent->N_))
      throw InputError("step coefficient has " + std::to_string(c.size()) + " digits, expected " +
                       std::to_string(parent->N_));
    for (auto& x : c) x %= parent->pm_;
  }
  if (kind == StepKind::Eisenstein) {
    if (parent->val(poly[0]) != 1) throw InputError("polynomial is not Eisenstein: constant term must have valuation 1");
    for (int i = 1; i < d; ++i)
      if (parent->val(poly[static_cast<std::size_t>(i)]) < 1)
        throw InputError("polynomial is not Eisenstein: middle coefficients must be divisible by the uniformizer");
  } else if (kind == StepKind::Unramified) {
    std::vector<Res> low;
    for (auto& c : poly) {
      if (parent->val(c) < kInfVal && parent->val(c) < 0) throw InputError("non-integral coefficient");
      low.push_back(parent->residue(c));
    }
    if (!parent->residue_poly_irreducible(low))
      throw InputError("unramified step polynomial must have irreducible reduction");
  } else {
    throw InputError("invalid step kind");
  }

  auto f = std::shared_ptr<LocalField>(new LocalField());
  f->p_ = parent->p_;
  f->M_ = parent->M_;
  f->pm_ = parent->pm_;
  f->parent_ = parent;
  f->kind_ = kind;
  f->d_ = d;
  f->poly_ = std::move(poly);
  f->N_ = parent->N_ * d;
  const int np = parent->N_;
  if (kind == StepKind::Eisenstein) {
    f->e_step_ = d;
    f->e_ = parent->e_ * d;
    f->f_ = parent->f_;
    f->residue_pos_ = parent->residue_pos_;
    f->uniformizer_ = f->generator();
    // pi_parent / Pi = -w^{-1} (Pi^{d-1} + f_{d-1} Pi^{d-2} + ... + f_1), f_0 = pi_parent w.
    Coeffs w = parent->div_pi(f->poly_[0]);
    Coeffs winv = parent->unit_inverse(w);
    Coeffs acc = f->zero();
    Coeffs power = f->one();
    for (int i = 1; i <= d; ++i) {
      Coeffs coeff = i == d ? parent->one() : f->poly_[static_cast<std::size_t>(i)];
      acc = f->add(acc, f->mul(f->embed_parent(coeff), power));
      power = f->mul(power, f->uniformizer_);
    }
    f->h_ = f->neg(f->mul(f->embed_parent(winv), acc));
    f->eps_ = f->div_pi(f->h_, d - 1);
  } else {
    f->e_step_ = 1;
    f->e_ = parent->e_;
    f->f_ = parent->f_ * d;
    for (int i = 0; i < d; ++i)
      for (int pos : parent->residue_pos_) f->residue_pos_.push_back(i * np + pos);
    f->uniformizer_ = f->embed_parent(parent->uniformizer_);
    f->eps_ = f->one();
  }
  f->name_ = name.empty() ? parent->name_ + (kind == StepKind::Eisenstein ? "[E" : "[U") + std::to_string(d) + "]"
                          : std::move(name);
  f->finish(precision);
  return f;
}

inline void LocalField::finish(std::optional<int> precision) {
  q_ = 1;
  for (int i = 0; i < f_; ++i) {
    q_ *= p_;
    if (q_ > 4096) throw Unsupported("residue field larger than 4096 elements");
  }
  const int minimum = minimum_precision(p_, e_);
  P_ = precision ? *precision : default_precision(p_, e_);
  if (P_ < minimum)
    throw InputError("precision " + std::to_string(P_) + " is below the minimum " + std::to_string(minimum) +
                     " for this field");
  if (static_cast<long>(e_) * M_ < static_cast<long>(P_) + e_ + 2)
    throw PrecisionError("precision " + std::to_string(P_) + " not representable with " + std::to_string(M_) +
                         " p-adic digits at ramification " + std::to_string(e_));
  rmul_.assign(static_cast<std::size_t>(q_ * q_), 0);
  std::vector<Coeffs> lifts;
  for (Res a = 0; a < q_; ++a) lifts.push_back(lift(a));
  for (Res a = 0; a < q_; ++a)
    for (Res b = a; b < q_; ++b) {
      Res r = residue(mul(lifts[a], lifts[b]));
      rmul_[a * q_ + b] = r;
      rmul_[b * q_ + a] = r;
    }
  find_root_of_unity();
}

inline void LocalField::find_root_of_unity() {
  has_mu_p_ = false;
  if (p_ == 2) {
    has_mu_p_ = true;
    xi_ = from_int(-1);
    return;
  }
  if (parent_ && parent_->has_mu_p_) {
    has_mu_p_ = true;
    xi_ = embed_parent(parent_->xi_);
    return;
  }
  const int p = static_cast<int>(p_);
  if (e_ % (p - 1) != 0) return;
  const int m = e_ / (p - 1);
  auto self = shared_from_this();
  // closeness(x) = v(Phi_p(x)) - (p-2) m measures the distance to the nearest
  // primitive root; raise it one digit at a time.
  auto phi = [&](const Coeffs& x) {
    Coeffs s = zero(), pw = one();
    for (int k = 0; k < p; ++k) {
      s = add(s, pw);
      pw = mul(pw, x);
    }
    return s;
  };
  auto closeness = [&](const Coeffs& x) {
    int v = val(phi(x));
    return v >= kInfVal ? kInfVal : v - (p - 2) * m;
  };
  Coeffs x = one();
  const int target = P_;
  int c = closeness(x);
  while (c < target) {
    bool improved = false;
    Coeffs shiftpow = mul_pi(one(), c);
    for (Res t = 1; t < q_ && !improved; ++t) {
      Coeffs cand = add(x, mul(lift(t), shiftpow));
      int cc = closeness(cand);
      if (cc > c) {
        x = cand;
        c = cc;
        improved = true;
      }
    }
    if (!improved) return;
  }
  // Certify: x^p = 1 and x != 1 to the working precision.
  if (val(sub(pow(x, p_), one())) < P_ || val(sub(x, one())) != m) return;
  has_mu_p_ = true;
  xi_ = x;
}

inline std::string LocalField::describe() const {
  return name_ + " (p=" + std::to_string(p_) + ", degree " + std::to_string(N_) + ", e=" + std::to_string(e_) +
         ", f=" + std::to_string(f_) + ", precision " + std::to_string(P_) + ")";
}

// ---------------------------------------------------------------------------
// Embeddings between tower levels.

/// The image in `target` of an element of one of its ancestors.
inline Elem embed(const FieldPtr& target, const Elem& x) {
  if (x.field().get() == target.get()) return x;
  if (!target->parent()) throw InternalError("embed: source is not an ancestor of the target");
  Elem y = embed(target->parent(), x);
  const int es = target->step_ramification();
  if (y.is_zero_marker()) return Elem::zero(target, y.abs_precision() * es);
  const int v = y.valuation();
  Coeffs eps = target->parent_uniformizer_ratio();
  Coeffs epsv = v >= 0 ? target->pow(eps, static_cast<u64>(v)) : target->unit_inverse(target->pow(eps, static_cast<u64>(-v)));
  Coeffs u = target->mul(target->embed_parent(y.unit_part()), epsv);
  Elem unit = Elem::unit(target, u).with_precision(y.rel_precision() * es);
  return unit * Elem::uniformizer(target).pow(static_cast<i64>(v) * es);
}

/// Teichmueller representative of a unit: the (q-1)-th root of unity with
/// the same residue.
inline Elem teichmueller(const Elem& x) {
  if (x.valuation() != 0) throw InputError("teichmueller: input must be a unit");
  const auto& F = x.field();
  Elem y = x;
  for (int i = 0; i < x.rel_precision(); ++i) y = y.pow(static_cast<i64>(F->residue_size()));
  return y;
}

/// p / pi^e as a unit (defines the Artin-Schreier twist at the wild level).
inline Elem p_over_pi_e(const FieldPtr& F) {
  Elem pe = Elem::integer(F, static_cast<i64>(F->p()));
  return pe.unit_elem();
}

}  // namespace knorm::padic
