#pragma once

// Finite-dimensional modules over F_p[G], G = <sigma> cyclic of order p.
//
// Every such module is a direct sum of Jordan-type cyclic modules J_1..J_p
// (J_i = F_p[G]/(sigma-1)^i). The decomposition below follows the reverse
// induction on i = p, ..., 1: the fixed space is filtered by the images of
// powers of T = sigma - 1, complements L_i of consecutive layers are lifted
// through T^{i-1}, and the cyclic modules they generate are the summands.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "knorm/errors.hpp"
#include "knorm/fplin.hpp"

namespace knorm::gmod {

using fplin::FpMatrix;
using fplin::Residue;
using fplin::Subspace;
using fplin::Vec;

class GModule {
 public:
  GModule(Residue p, FpMatrix sigma) : p_(p), sigma_(std::move(sigma)) {
    if (sigma_.p() != p_) throw InputError("sigma matrix lives over a different prime");
    if (sigma_.rows() != sigma_.cols()) throw InputError("sigma must be square");
    const auto n = sigma_.rows();
    const auto id = FpMatrix::identity(p_, n);
    t_ = sigma_ - id;
    if (!(sigma_.pow(p_) == id)) throw CheckFailure("sigma^p is not the identity");
    if (!t_.pow(p_).is_zero()) throw CheckFailure("(sigma - 1)^p is not zero");
  }

  static GModule trivial(Residue p, std::size_t dim) {
    return GModule(p, FpMatrix::identity(p, dim));
  }

  Residue p() const { return p_; }
  std::size_t dim() const { return sigma_.rows(); }
  const FpMatrix& sigma() const { return sigma_; }
  /// The augmentation generator sigma - 1.
  const FpMatrix& t() const { return t_; }
  FpMatrix t_pow(std::size_t i) const { return t_.pow(i); }

 private:
  Residue p_;
  FpMatrix sigma_;
  FpMatrix t_;
};

/// Block-diagonal sum of Jordan modules; sizes[k] in 1..p.
inline GModule jordan_sum(Residue p, const std::vector<std::size_t>& sizes) {
  std::size_t n = 0;
  for (auto s : sizes) {
    if (s < 1 || s > p) throw InputError("Jordan block size must lie in 1..p");
    n += s;
  }
  FpMatrix sigma = FpMatrix::identity(p, n);
  std::size_t off = 0;
  for (auto s : sizes) {
    for (std::size_t i = 0; i + 1 < s; ++i) sigma.set(off + i + 1, off + i, 1);
    off += s;
  }
  return GModule(p, sigma);
}

/// The module with sigma replaced by c * sigma * c^{-1}.
inline GModule conjugate(const GModule& m, const FpMatrix& c) {
  return GModule(m.p(), c * m.sigma() * fplin::inverse(c));
}

/// m_i = number of cyclic summands of dimension i; stored for i = 1..p.
struct SummandProfile {
  Residue p = 2;
  std::vector<std::size_t> m;  // m[i-1] = multiplicity of length i

  std::size_t mult(std::size_t length) const { return m.at(length - 1); }
  std::size_t total_dim() const {
    std::size_t d = 0;
    for (std::size_t i = 0; i < m.size(); ++i) d += (i + 1) * m[i];
    return d;
  }
  std::size_t summands() const {
    std::size_t s = 0;
    for (auto x : m) s += x;
    return s;
  }
  bool operator==(const SummandProfile&) const = default;
};

inline std::string to_string(const SummandProfile& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.m.size(); ++i) out += (i ? "," : "") + std::to_string(s.m[i]);
  return out + ")";
}

struct Generator {
  std::size_t length;
  Vec vector;
};

struct Decomposition {
  SummandProfile profile;
  /// generators[i-1] = the lifts Y_i, one per cyclic summand of length i.
  std::vector<std::vector<Vec>> generators;
  /// summand_bases[i-1] = X_i = F_p[G] Y_i.
  std::vector<Subspace> summand_bases;
  /// layers[i-1] = L_i, the fixed part of X_i.
  std::vector<Subspace> layers;

  /// Generators sorted by summand length descending, then by echelon order.
  std::vector<Generator> ordered_generators() const {
    std::vector<Generator> out;
    for (std::size_t len = generators.size(); len >= 1; --len)
      for (const auto& g : generators[len - 1]) out.push_back({len, g});
    return out;
  }
};

inline Subspace fixed_points(const GModule& m) { return fplin::kernel(m.t()); }

inline Subspace omega_image(const GModule& m, std::size_t i) {
  if (i > m.p()) throw InputError("omega_image: exponent must lie in 0..p");
  return fplin::image(m.t_pow(i));
}

inline std::size_t length_of(const GModule& m, const Vec& v) {
  if (v.size() != m.dim()) throw InputError("length_of: vector has wrong dimension");
  if (fplin::is_zero(v)) throw InputError("length_of: the zero vector has no length");
  Vec w = v;
  std::size_t l = 0;
  while (!fplin::is_zero(w)) {
    w = m.t().apply(w);
    ++l;
    if (l > m.p()) throw InternalError("length exceeds p: module is not unipotent");
  }
  return l;
}

/// N = (sigma-1)^{p-1}, cross-checked against 1 + sigma + ... + sigma^{p-1}.
inline FpMatrix norm_operator(const GModule& m) {
  FpMatrix via_t = m.t_pow(m.p() - 1);
  FpMatrix via_sum(m.p(), m.dim(), m.dim());
  FpMatrix power = FpMatrix::identity(m.p(), m.dim());
  for (Residue k = 0; k < m.p(); ++k) {
    via_sum = via_sum + power;
    power = power * m.sigma();
  }
  if (!(via_t == via_sum)) throw InternalError("(sigma-1)^{p-1} differs from the trace sum");
  return via_t;
}

/// Rank oracle: m_i = r_{i-1} - 2 r_i + r_{i+1}, r_i = rank T^i.
inline SummandProfile multiplicity_oracle(const GModule& m) {
  const std::size_t p = m.p();
  std::vector<long> r(p + 2, 0);
  FpMatrix power = FpMatrix::identity(m.p(), m.dim());
  for (std::size_t i = 0; i <= p; ++i) {
    r[i] = static_cast<long>(power.rank());
    power = power * m.t();
  }
  SummandProfile prof{m.p(), std::vector<std::size_t>(p, 0)};
  for (std::size_t i = 1; i <= p; ++i) {
    long v = r[i - 1] - 2 * r[i] + r[i + 1];
    if (v < 0) throw InternalError("negative multiplicity from rank oracle");
    prof.m[i - 1] = static_cast<std::size_t>(v);
  }
  return prof;
}

inline std::size_t free_rank(const GModule& m) { return m.t_pow(m.p() - 1).rank(); }

namespace detail {

inline Subspace span_of(Residue p, std::size_t n, const std::vector<Vec>& vs) {
  return Subspace::span(p, n, vs);
}

// Layer W_i = T^{i-1} X ∩ X^G, i = 1..p+1 (W_{p+1} = 0).
inline std::vector<Subspace> fixed_layers(const GModule& m) {
  const auto fixed = fixed_points(m);
  std::vector<Subspace> w;
  for (std::size_t i = 1; i <= m.p() + 1; ++i)
    w.push_back(fplin::intersect(omega_image(m, std::min<std::size_t>(i - 1, m.p())), fixed));
  return w;
}

}  // namespace detail

/// Checks that layers[i-1] = L_i satisfy the hypotheses of the structure
/// construction; returns a description of the first violation, if any.
inline std::string layer_violation(const GModule& m, const std::vector<Subspace>& layers) {
  const std::size_t p = m.p();
  if (layers.size() != p) return "expected p layers";
  auto w = detail::fixed_layers(m);
  if (!(layers[p - 1] == omega_image(m, p - 1)))
    return "L_p differs from (sigma-1)^{p-1} X";
  for (std::size_t i = 1; i < p; ++i) {
    const auto& li = layers[i - 1];
    const auto& upper = w[i];      // T^i X ∩ X^G
    const auto& outer = w[i - 1];  // T^{i-1} X ∩ X^G
    auto [cap, plus] = fplin::intersect_and_sum(li, upper);
    if (cap.dim() != 0 || !(plus == outer))
      return "L_" + std::to_string(i) + " is not a complement of (sigma-1)^" + std::to_string(i) +
             "X ∩ X^G in (sigma-1)^" + std::to_string(i - 1) + "X ∩ X^G";
  }
  return {};
}

/// Builds the summands from layers that already satisfy the hypotheses.
inline Decomposition decompose_from_layers(const GModule& m, const std::vector<Subspace>& layers) {
  if (auto why = layer_violation(m, layers); !why.empty()) throw CheckFailure("decompose: " + why);
  const std::size_t p = m.p(), n = m.dim();
  Decomposition dec;
  dec.profile = {m.p(), std::vector<std::size_t>(p, 0)};
  dec.layers = layers;
  std::vector<Vec> all;
  for (std::size_t i = 1; i <= p; ++i) {
    const FpMatrix lift = m.t_pow(i - 1);
    const FpMatrix kill = m.t_pow(i);
    std::vector<Vec> gens, block;
    for (const auto& l : layers[i - 1].basis()) {
      auto y = fplin::solve(lift, l);
      if (!y) throw InternalError("decompose: layer vector has no preimage under (sigma-1)^{i-1}");
      // Any preimage works: T^i y = T l = 0 because l is fixed.
      if (!fplin::is_zero(kill.apply(*y))) throw InternalError("decompose: lift not killed by (sigma-1)^i");
      Vec cur = *y;
      for (std::size_t k = 0; k < i; ++k) {
        block.push_back(cur);
        cur = m.t().apply(cur);
      }
      gens.push_back(std::move(*y));
    }
    dec.profile.m[i - 1] = gens.size();
    all.insert(all.end(), block.begin(), block.end());
    dec.summand_bases.push_back(detail::span_of(m.p(), n, block));
    dec.generators.push_back(std::move(gens));
  }
  if (all.size() != n || detail::span_of(m.p(), n, all).dim() != n)
    throw InternalError("decompose: summands do not form a direct sum equal to the module");
  return dec;
}

inline Decomposition decompose(const GModule& m) {
  const std::size_t p = m.p();
  auto w = detail::fixed_layers(m);
  std::vector<Subspace> layers;
  for (std::size_t i = 1; i < p; ++i) layers.push_back(fplin::complement(w[i], w[i - 1]));
  layers.push_back(omega_image(m, p - 1));
  return decompose_from_layers(m, layers);
}

/// Re-verifies every structural invariant of a decomposition.
inline std::string decomposition_violation(const GModule& m, const Decomposition& dec) {
  const std::size_t p = m.p(), n = m.dim();
  if (dec.profile.total_dim() != n) return "profile dimensions do not add up";
  std::vector<Vec> all;
  for (std::size_t i = 1; i <= p; ++i) {
    const auto& xi = dec.summand_bases[i - 1];
    if (xi.dim() != i * dec.profile.mult(i)) return "X_" + std::to_string(i) + " has wrong dimension";
    if (fplin::image_of(m.t_pow(i), xi).dim() != 0) return "(sigma-1)^i does not kill X_i";
    for (const auto& g : dec.generators[i - 1]) {
      if (fplin::is_zero(m.t_pow(i - 1).apply(g))) return "generator of X_i has length < i";
      if (!xi.contains(g)) return "generator outside its summand";
    }
    all.insert(all.end(), xi.basis().begin(), xi.basis().end());
  }
  if (Subspace::span(m.p(), n, all).dim() != n) return "summands do not span a direct sum";
  return {};
}

/// Exclusion check: if the fixed parts of the sigma-stable parts form a
/// direct sum, the parts themselves must too. Returns whether the
/// implication held on this input.
inline bool verify_exclusion(const std::vector<Subspace>& parts, const GModule& ambient) {
  std::size_t fixed_total = 0, total = 0;
  std::vector<Vec> fixed_vecs, part_vecs;
  const auto fixed = fixed_points(ambient);
  for (const auto& part : parts) {
    if (part.ambient_dim() != ambient.dim()) throw InputError("part has wrong ambient dimension");
    if (!part.contains(fplin::image_of(ambient.sigma(), part)))
      throw InputError("part is not sigma-stable");
    auto pf = fplin::intersect(part, fixed);
    fixed_total += pf.dim();
    total += part.dim();
    fixed_vecs.insert(fixed_vecs.end(), pf.basis().begin(), pf.basis().end());
    part_vecs.insert(part_vecs.end(), part.basis().begin(), part.basis().end());
  }
  const bool fixed_direct = Subspace::span(ambient.p(), ambient.dim(), fixed_vecs).dim() == fixed_total;
  const bool parts_direct = Subspace::span(ambient.p(), ambient.dim(), part_vecs).dim() == total;
  return !fixed_direct || parts_direct;
}

}  // namespace knorm::gmod
