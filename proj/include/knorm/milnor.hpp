#pragma once

// Mod-p Milnor K-groups of local fields containing mu_p.
//
// k_0 = F_p, k_1 = F^x/F^xp with an explicit basis, k_2 = F_p (one anonymous
// generator), k_n = 0 for n >= 3. For a degree-p Kummer step E = F(a^{1/p})
// the norm, restriction and Galois action are matrices in these bases.
// The k_2 pairing is realized by the norm criterion: {a, b} = 0 iff b is a
// norm from F(a^{1/p}). At p odd the generator of k_2 is pinned only up to a
// scalar, so only zero-ness of single symbols is exposed.

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "knorm/fplin.hpp"
#include "knorm/gmod.hpp"
#include "knorm/kummer.hpp"
#include "knorm/padic.hpp"
#include "knorm/units.hpp"

namespace knorm::milnor {

using fplin::FpMatrix;
using fplin::Residue;
using fplin::Subspace;
using fplin::Vec;
using padic::Elem;
using padic::FieldPtr;

inline constexpr int kTopDegree = 2;  // k_n = 0 above this for local fields

struct KGroup {
  FieldPtr field;
  int n = 0;
  Residue p = 2;
  std::vector<std::string> labels;
  std::vector<Elem> elements;  // representatives, n = 1 only
  std::shared_ptr<const padic::UnitFiltration> filtration;
  FpMatrix to_std, from_std;  // basis <-> filtration coordinates, n = 1 only

  std::size_t dim() const { return labels.size(); }
};
using KGroupPtr = std::shared_ptr<const KGroup>;

struct KClass {
  KGroupPtr group;
  Vec coords;
  bool is_zero() const { return fplin::is_zero(coords); }
};

struct KMap {
  KGroupPtr source, target;
  FpMatrix matrix;

  KMap() = default;
  KMap(KGroupPtr s, KGroupPtr t, FpMatrix m) : source(std::move(s)), target(std::move(t)), matrix(std::move(m)) {
    if (matrix.rows() != target->dim() || matrix.cols() != source->dim())
      throw InternalError("KMap shape does not match the groups");
  }
};

/// Balanced integer value of a Q_p element when it is a small integer.
inline std::optional<long long> small_integer(const Elem& x) {
  const auto& F = x.field();
  if (F->parent() || x.is_zero_marker() || x.valuation() < 0) return std::nullopt;
  std::uint64_t m = 1;
  for (int i = 0; i < x.abs_precision() && i < F->modulus_digits(); ++i) m *= F->p();
  const auto c = x.integral()[0] % m;
  long long v = c <= m / 2 ? static_cast<long long>(c) : -static_cast<long long>(m - c);
  if (v > 1000000 || v < -1000000) return std::nullopt;
  return v;
}

namespace detail {

inline KGroupPtr trivial_group(const FieldPtr& F, int n) {
  auto g = std::make_shared<KGroup>();
  g->field = F;
  g->n = n;
  g->p = static_cast<Residue>(F->p());
  if (n == 0) g->labels = {"1"};
  if (n == 2) g->labels = {"c"};
  return g;
}

inline std::string level_label(const padic::UnitFiltration& filt, std::size_t i) {
  const auto& F = filt.field();
  const int level = filt.levels()[i];
  if (level == 0) return "pi";
  std::string coef;
  if (i == 1) {
    if (filt.theta() != 1) coef = "[r" + std::to_string(filt.theta()) + "]";
  } else {
    const std::size_t digit = (i - 2) % static_cast<std::size_t>(F->residue_degree());
    if (digit) coef = "[r" + std::to_string(static_cast<unsigned long long>(std::pow(F->p(), digit))) + "]";
  }
  return "1+" + coef + "pi^" + std::to_string(level);
}

}  // namespace detail

/// Basis of k_1 F. Candidate order: xi, the wild-level generator, the
/// filtration generators by increasing level, then the uniformizer; each
/// candidate is kept when independent of those already chosen.
inline KGroupPtr k1_group(const FieldPtr& F) {
  if (!F->has_mu_p()) throw InputError("primitive p-th root of unity required");
  auto filt = std::make_shared<const padic::UnitFiltration>(F);
  const auto p = static_cast<Residue>(F->p());
  const auto dim = static_cast<std::size_t>(filt->dim());
  std::vector<std::pair<Elem, std::string>> candidates;
  candidates.emplace_back(Elem::root_of_unity(F), "xi");
  candidates.emplace_back(filt->generators()[1], detail::level_label(*filt, 1));
  for (std::size_t i = 2; i < dim; ++i) candidates.emplace_back(filt->generators()[i], detail::level_label(*filt, i));
  candidates.emplace_back(filt->generators()[0], "pi");

  auto g = std::make_shared<KGroup>();
  g->field = F;
  g->n = 1;
  g->p = p;
  g->filtration = filt;
  std::vector<Vec> cols;
  for (auto& [x, label] : candidates) {
    Vec v = filt->log(x);
    auto trial = cols;
    trial.push_back(v);
    if (FpMatrix::from_columns(p, dim, trial).rank() != trial.size()) continue;
    cols = std::move(trial);
    if (auto n = small_integer(x)) label = std::to_string(*n);
    g->labels.push_back(label);
    g->elements.push_back(x);
  }
  if (cols.size() != static_cast<std::size_t>(F->degree() + 2))
    throw InternalError("k_1 basis has dimension " + std::to_string(cols.size()) + ", expected [F:Q_p] + 2 = " +
                        std::to_string(F->degree() + 2));
  g->to_std = FpMatrix::from_columns(p, dim, cols);
  g->from_std = fplin::inverse(g->to_std);
  return g;
}

/// Certifies independence of the k_1 basis by testing every nontrivial
/// product of basis powers for being a p-th power (feasible for small p^dim).
inline bool certify_k1_independence(const KGroup& g) {
  const auto p = g.p;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < g.dim(); ++i) total *= p;
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    Elem x = Elem::one(g.field);
    std::uint64_t t = idx;
    for (std::size_t i = 0; i < g.dim(); ++i) {
      if (t % p) x = x * g.elements[i].pow(static_cast<padic::i64>(t % p));
      t /= p;
    }
    if (g.filtration->is_pth_power(x)) return false;
  }
  return true;
}

inline Vec class_coords(const KGroup& g, const Elem& x) {
  if (g.n != 1) throw InternalError("class_of needs k_1");
  if (x.field().get() != g.field.get()) throw InternalError("class_of: element from another field");
  return g.from_std.apply(g.filtration->log(x));
}

inline KClass class_of(const KGroupPtr& g, const Elem& x) { return {g, class_coords(*g, x)}; }

inline Elem representative(const KGroup& g, const Vec& c) {
  Elem x = Elem::one(g.field);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) x = x * g.elements[i].pow(static_cast<padic::i64>(c[i]));
  return x;
}

/// Class vector normalized so its first nonzero entry is 1 (same Kummer
/// extension as any nonzero multiple).
inline Vec normalize_line(Vec v, Residue p) {
  for (auto x : v)
    if (x) {
      Residue inv = fplin::inv_mod(x, p);
      for (auto& y : v) y = static_cast<Residue>(std::uint64_t{y} * inv % p);
      break;
    }
  return v;
}

class KummerK;

/// The K-groups of one local field, with lazily built Kummer steps over it.
/// Construction is single-threaded; a built value is safe to share.
class LocalK {
 public:
  explicit LocalK(FieldPtr F) : F_(std::move(F)) {
    groups_[0] = detail::trivial_group(F_, 0);
    groups_[1] = k1_group(F_);
    groups_[2] = detail::trivial_group(F_, 2);
    groups_[3] = detail::trivial_group(F_, 3);
    empty_ = detail::trivial_group(F_, -1);
  }

  const FieldPtr& field() const { return F_; }
  Residue p() const { return static_cast<Residue>(F_->p()); }
  KGroupPtr group(int n) const {
    if (n < 0) return empty_;
    if (n > 3) return groups_[3];
    return groups_[static_cast<std::size_t>(n)];
  }
  Vec class_of(const Elem& x) const { return class_coords(*groups_[1], x); }
  Elem element(const Vec& c) const { return representative(*groups_[1], c); }
  Vec xi_class() const { return class_of(Elem::root_of_unity(F_)); }

  /// The Kummer step for the line through a (cached).
  const KummerK& kummer(const Vec& a) const;

  /// N k_1 E inside k_1 F for E = F(a^{1/p}).
  Subspace norm_image(const Vec& a) const;

  /// Matrix of x -> {a} x from k_{n-1} to k_n (k_{-1} = 0).
  FpMatrix cup(const Vec& a, int n) const {
    const auto p = this->p();
    const auto d1 = groups_[1]->dim();
    if (a.size() != d1) throw InternalError("cup: class has wrong length");
    if (n < 1) return FpMatrix(p, group(n)->dim(), 0);
    if (n == 1) return FpMatrix::from_columns(p, d1, {a});
    if (n == 2) {
      FpMatrix m(p, 1, d1);
      if (fplin::is_zero(a)) return m;
      auto f = fplin::kernel(norm_image(a).as_rows());
      if (f.dim() != 1) throw CheckFailure("norm subgroup does not have index p in k_1");
      for (std::size_t j = 0; j < d1; ++j) m.set(0, j, f.basis()[0][j]);
      return m;
    }
    if (n == 3) return FpMatrix(p, 0, 1);
    return FpMatrix(p, 0, 0);
  }

  /// 0 or 1: whether {a, b} is nonzero in k_2.
  Residue symbol(const Vec& a, const Vec& b) const {
    if (fplin::is_zero(a) || fplin::is_zero(b)) return 0;
    return norm_image(a).contains(b) ? 0 : 1;
  }

  std::size_t cached_extensions() const { return cache_.size(); }

 private:
  FieldPtr F_;
  std::array<KGroupPtr, 4> groups_;
  KGroupPtr empty_;
  mutable std::map<Vec, std::unique_ptr<KummerK>> cache_;
};

/// A Kummer step with the K-theory of both levels and the connecting maps.
class KummerK {
 public:
  KummerK(const LocalK& base, Vec a_class)
      : base_(&base),
        a_(std::move(a_class)),
        ext_(padic::KummerExtension::build(base.field(), base.element(a_))),
        top_(std::make_unique<LocalK>(ext_.top())) {
    const auto p = base.p();
    const auto& kF = *base.group(1);
    const auto& kE = *top_->group(1);
    std::vector<Vec> ncols, icols, scols;
    for (const auto& b : kE.elements) ncols.push_back(base.class_of(ext_.norm_down(b)));
    for (const auto& b : kF.elements) icols.push_back(top_->class_of(ext_.up(b)));
    for (const auto& b : kE.elements) scols.push_back(top_->class_of(ext_.sigma(b)));
    n1_ = FpMatrix::from_columns(p, kF.dim(), ncols);
    i1_ = FpMatrix::from_columns(p, kE.dim(), icols);
    s1_ = FpMatrix::from_columns(p, kE.dim(), scols);
  }

  const LocalK& base() const { return *base_; }
  const LocalK& top() const { return *top_; }
  const padic::KummerExtension& ext() const { return ext_; }
  const Vec& a_class() const { return a_; }
  Residue p() const { return base_->p(); }

  /// N_{E/F} on k_n.
  KMap norm(int n) const {
    auto s = top_->group(n), t = base_->group(n);
    if (n == 0) return {s, t, FpMatrix(p(), 1, 1)};
    if (n == 1) return {s, t, n1_};
    if (n == 2) return {s, t, FpMatrix::identity(p(), 1)};
    return {s, t, FpMatrix(p(), 0, 0)};
  }

  /// i_E on k_n.
  KMap restriction(int n) const {
    auto s = base_->group(n), t = top_->group(n);
    if (n == 0) return {s, t, FpMatrix::identity(p(), 1)};
    if (n == 1) return {s, t, i1_};
    if (n == 2) return {s, t, FpMatrix(p(), 1, 1)};
    return {s, t, FpMatrix(p(), 0, 0)};
  }

  /// k_n E with its sigma-action.
  gmod::GModule sigma(int n) const {
    if (n == 1) return gmod::GModule(p(), sigma1_override_ ? *sigma1_override_ : s1_);
    return gmod::GModule::trivial(p(), top_->group(n)->dim());
  }
  const FpMatrix& sigma_matrix() const { return sigma1_override_ ? *sigma1_override_ : s1_; }

  /// Replaces the stored sigma matrix on k_1 (fault injection for tests).
  void override_sigma(FpMatrix m) const { sigma1_override_ = std::move(m); }

  /// {a} . - from k_{n-1} F to k_n F.
  KMap cup_a(int n) const { return {base_->group(n - 1), base_->group(n), base_->cup(a_, n)}; }

 private:
  const LocalK* base_;
  Vec a_;
  padic::KummerExtension ext_;
  std::unique_ptr<LocalK> top_;
  FpMatrix n1_, i1_, s1_;
  mutable std::optional<FpMatrix> sigma1_override_;
};

inline const KummerK& LocalK::kummer(const Vec& a) const {
  if (fplin::is_zero(a)) throw InputError("a is a p-th power; extension degenerate");
  Vec key = normalize_line(a, p());
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  auto k = std::make_unique<KummerK>(*this, key);
  auto& ref = *k;
  cache_.emplace(key, std::move(k));
  return ref;
}

inline Subspace LocalK::norm_image(const Vec& a) const { return fplin::image(kummer(a).norm(1).matrix); }

// ---------------------------------------------------------------------------
// Free-function views.

inline KMap norm_map(const KummerK& k, int n) { return k.norm(n); }
inline KMap restriction_map(const KummerK& k, int n) { return k.restriction(n); }
inline gmod::GModule sigma_map(const KummerK& k, int n) { return k.sigma(n); }
inline KMap cup_with(const LocalK& F, const Vec& a, int n) { return {F.group(n - 1), F.group(n), F.cup(a, n)}; }

/// Symbol (a, b) in k_2 F as a class (0 or the pinned generator).
inline KClass symbol(const LocalK& F, const Vec& a, const Vec& b) { return {F.group(2), {F.symbol(a, b)}}; }

/// Equality of two k_2 classes; at p odd two nonzero symbols cannot be
/// compared because the generator is pinned only up to a scalar.
inline bool symbols_equal(const KClass& x, const KClass& y) {
  if (x.group->p != 2 && !x.is_zero() && !y.is_zero())
    throw Unsupported("comparing two nonzero symbols at odd p needs an explicit reciprocity law");
  return x.coords == y.coords;
}

struct CheckItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Hilbert90Report {
  int n = 0;
  std::size_t dim_image_t = 0, dim_ker_norm = 0;
  std::vector<CheckItem> items;
  bool pass() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return true;
  }
};

/// image(sigma - 1) in ker N, i_E N = (sigma-1)^{p-1}, N i_E = 0 on k_n.
inline Hilbert90Report verify_hilbert90(const KummerK& k, int n) {
  Hilbert90Report r;
  r.n = n;
  const auto mod = k.sigma(n);
  const auto nm = k.norm(n).matrix;
  const auto im = k.restriction(n).matrix;
  auto img_t = fplin::image(mod.t());
  auto ker_n = fplin::kernel(nm);
  r.dim_image_t = img_t.dim();
  r.dim_ker_norm = ker_n.dim();
  r.items.push_back({"image(sigma-1) in ker N", ker_n.contains(img_t), ""});
  const auto trace = gmod::norm_operator(mod);
  r.items.push_back({"i_E N = sum of sigma^k", im * nm == trace, ""});
  r.items.push_back({"N i_E = 0", (nm * im).is_zero(), ""});
  return r;
}

struct SequenceReport {
  int m = 0;
  std::size_t dim_image_norm = 0, dim_ker_cup = 0, dim_image_cup = 0, dim_ker_res = 0;
  std::vector<CheckItem> items;
  bool pass() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return true;
  }
};

/// k_{m-1}E -N-> k_{m-1}F -{a}-> k_mF -i-> k_mE: exact at both middle terms.
inline SequenceReport verify_voevodsky_seq(const KummerK& k, int m) {
  if (m < 1) throw InputError("sequence degree must be at least 1");
  SequenceReport r;
  r.m = m;
  auto imN = fplin::image(k.norm(m - 1).matrix);
  const auto cup = k.cup_a(m).matrix;
  auto kerC = fplin::kernel(cup);
  auto imC = fplin::image(cup);
  auto kerI = fplin::kernel(k.restriction(m).matrix);
  r.dim_image_norm = imN.dim();
  r.dim_ker_cup = kerC.dim();
  r.dim_image_cup = imC.dim();
  r.dim_ker_res = kerI.dim();
  r.items.push_back({"image N = ann{a} in k_" + std::to_string(m - 1), imN == kerC, ""});
  r.items.push_back({"image {a} = ker i_E in k_" + std::to_string(m), imC == kerI, ""});
  return r;
}

/// Hilbert-symbol symmetry of the norm criterion: b is a norm from
/// F(a^{1/p}) iff a is a norm from F(b^{1/p}), for every nonzero b.
inline CheckItem verify_norm_symmetry(const LocalK& F, const Vec& a, std::size_t max_classes = 4096) {
  const auto p = F.p();
  const auto dim = F.group(1)->dim();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= p;
  if (total > max_classes) return {"norm symmetry", true, "skipped: too many classes"};
  const auto imA = F.norm_image(a);
  std::size_t tested = 0;
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    Vec b(dim);
    std::uint64_t t = idx;
    for (auto& x : b) {
      x = static_cast<Residue>(t % p);
      t /= p;
    }
    if (normalize_line(b, p) != b) continue;
    ++tested;
    if (imA.contains(b) != F.norm_image(b).contains(a))
      return {"norm symmetry", false, "asymmetric at class index " + std::to_string(idx)};
  }
  return {"norm symmetry", true, std::to_string(tested) + " lines"};
}

/// N_{E/F}({A} . i_E b) = {a'} . b with a' = -a for p = 2 and a' = a for p odd,
/// for b = 1 in k_0 and every basis b of k_1. In k_2 both sides are compared
/// through the norm criterion (N is an isomorphism on k_2).
inline std::vector<CheckItem> verify_projection_formula(const KummerK& k) {
  std::vector<CheckItem> out;
  const auto& F = k.base();
  const auto& E = k.top();
  const auto p = k.p();
  const Vec A = E.class_of(k.ext().root());
  Vec a_signed = F.class_of(k.ext().a());
  if (p == 2) {
    const Vec m1 = F.class_of(Elem::integer(F.field(), -1));
    for (std::size_t i = 0; i < a_signed.size(); ++i) a_signed[i] = (a_signed[i] + m1[i]) % 2;
  }
  out.push_back({"projection formula in k_1", k.norm(1).matrix.apply(A) == a_signed, ""});
  const auto i1 = k.restriction(1).matrix;
  const auto& basis = F.group(1)->labels;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    Vec b(basis.size(), 0);
    b[j] = 1;
    const Residue lhs = E.symbol(A, i1.apply(b));
    const Residue rhs = F.symbol(a_signed, b);
    out.push_back({"projection formula in k_2 at b = " + basis[j], lhs == rhs,
                   "lhs " + std::to_string(lhs) + ", rhs " + std::to_string(rhs)});
  }
  return out;
}

/// p = 2 symbol laws over all class pairs: bilinearity (every value equals
/// the bilinear form of the basis table), symmetry, and {a, -a} = 0.
inline std::vector<CheckItem> verify_symbol_laws(const LocalK& F) {
  if (F.p() != 2) throw Unsupported("symbol laws over all class pairs are decidable only at p = 2");
  const auto dim = F.group(1)->dim();
  if (dim > 12) throw Unsupported("too many classes for an exhaustive symbol audit");
  std::vector<Vec> classes;
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << dim); ++idx) {
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = (idx >> i) & 1;
    classes.push_back(v);
  }
  std::vector<Vec> table(dim, Vec(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) table[i][j] = F.symbol(classes[std::uint64_t{1} << i], classes[std::uint64_t{1} << j]);
  bool bilinear = true, symmetric = true, steinberg = true;
  std::string where;
  const Vec m1 = F.class_of(Elem::integer(F.field(), -1));
  for (const auto& a : classes) {
    Vec ma = a;
    for (std::size_t i = 0; i < dim; ++i) ma[i] ^= m1[i];
    if (F.symbol(a, ma) != 0) steinberg = false;
    for (const auto& b : classes) {
      Residue form = 0;
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) form ^= a[i] & b[j] & table[i][j];
      const Residue s = F.symbol(a, b);
      if (s != form) bilinear = false;
      if (s != F.symbol(b, a)) symmetric = false;
    }
  }
  return {{"symbol bilinear over all class pairs", bilinear, std::to_string(classes.size()) + " classes"},
          {"symbol symmetric", symmetric, ""},
          {"symbol(a, -a) = 0", steinberg, ""}};
}

}  // namespace knorm::milnor
