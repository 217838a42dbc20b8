#pragma once

// Galois-module structure of k_n E for a cyclic degree-p Kummer step E/F:
// the invariants d, e, Upsilon_1, Upsilon_2, y, z, the explicit
// decomposition X_1 + X_2 + Y + Z, and the subspace identities behind it.

#include <string>
#include <vector>

#include "knorm/fplin.hpp"
#include "knorm/gmod.hpp"
#include "knorm/milnor.hpp"

namespace knorm::structure {

using fplin::FpMatrix;
using fplin::Residue;
using fplin::Subspace;
using fplin::Vec;
using milnor::CheckItem;
using milnor::KummerK;

/// Complement rule used for every non-canonical choice.
inline constexpr const char* kComplementRule = "echelon-greedy-v1";

struct Invariants {
  Residue p = 2;
  int n = 0;
  std::size_t d = 0, e = 0, upsilon1 = 0, upsilon2 = 0, y = 0, z = 0;

  /// Dimension of k_n E predicted by the decomposition.
  std::size_t predicted_total() const {
    return p == 2 ? upsilon1 + 2 * y + z : upsilon1 + 2 * upsilon2 + p * y + z;
  }
  /// Summand multiplicities m_1..m_p predicted by the decomposition.
  gmod::SummandProfile predicted_profile() const {
    gmod::SummandProfile s{p, std::vector<std::size_t>(p, 0)};
    s.m[0] = upsilon1 + z;
    if (p > 2) s.m[1] = upsilon2;
    s.m[p - 1] += y;
    return s;
  }
  bool operator==(const Invariants&) const = default;
};

namespace detail {

inline std::size_t qdim(const Subspace& inner, const Subspace& outer, const std::string& what) {
  if (!outer.contains(inner)) throw CheckFailure(what + ": expected inclusion fails");
  return outer.dim() - inner.dim();
}

}  // namespace detail

/// The spaces entering the invariants for one (E/F, n).
struct Spaces {
  Residue p = 2;
  int n = 0;
  FpMatrix norm, res, cup_a, cup_xi;  // N_n, i_n, {a}: k_{n-1}F -> k_nF, {xi}: k_{n-1}F -> k_nF
  gmod::GModule module;               // k_n E
  Subspace kF, kF_prev;               // k_n F, k_{n-1} F
  Subspace norm_image;                // N k_n E
  Subspace ann_a, ann_a_xi;           // in k_{n-1} F
  Subspace a_times_prev;              // {a} k_{n-1} F
  Subspace xi_times_prev;             // {xi} k_{n-1} F
  Subspace fixed;                     // (k_n E)^G
  Subspace res_image;                 // i_E k_n F
};

inline Spaces spaces(const KummerK& k, int n) {
  const auto& F = k.base();
  const Residue p = k.p();
  const auto a = k.a_class();
  const auto xi = F.xi_class();
  auto norm = k.norm(n).matrix;
  auto res = k.restriction(n).matrix;
  auto cup_a = F.cup(a, n);
  auto cup_xi = F.cup(xi, n);
  auto module = k.sigma(n);
  auto ann_a_xi = fplin::kernel(F.cup(a, n + 1) * cup_xi);
  Spaces s{p,
           n,
           norm,
           res,
           cup_a,
           cup_xi,
           module,
           Subspace::full(p, F.group(n)->dim()),
           Subspace::full(p, F.group(n - 1)->dim()),
           fplin::image(norm),
           fplin::kernel(cup_a),
           ann_a_xi,
           fplin::image(cup_a),
           fplin::image(cup_xi),
           gmod::fixed_points(module),
           fplin::image(res)};
  return s;
}

/// d, e, Upsilon_1, Upsilon_2, y, z as quotient dimensions.
inline Invariants compute_invariants(const Spaces& s) {
  Invariants inv;
  inv.p = s.p;
  inv.n = s.n;
  inv.e = s.norm_image.dim();
  inv.d = s.kF.dim() - inv.e;
  inv.upsilon1 = detail::qdim(s.ann_a, s.ann_a_xi, "ann{a} in ann{a,xi}");
  inv.upsilon2 = s.kF_prev.dim() - s.ann_a_xi.dim();
  if (s.p > 2) {
    inv.y = detail::qdim(s.a_times_prev, s.norm_image, "{a}k_{n-1}F in N k_nE");
    inv.z = s.kF.dim() - fplin::sum(s.xi_times_prev, s.norm_image).dim();
  } else {
    inv.y = detail::qdim(fplin::image_of(s.cup_a, s.ann_a_xi), s.norm_image, "{a}ann{a,-1} in N k_nE");
    inv.z = s.kF.dim() - fplin::sum(s.a_times_prev, s.norm_image).dim();
  }
  return inv;
}

inline Invariants compute_invariants(const KummerK& k, int n) { return compute_invariants(spaces(k, n)); }

/// Relation checks between the invariants and dim k_n E.
inline std::vector<CheckItem> relation_checks(const Invariants& inv, std::size_t dim_knE) {
  std::vector<CheckItem> out;
  if (inv.p > 2)
    out.push_back({"Upsilon1 + Upsilon2 + y = e", inv.upsilon1 + inv.upsilon2 + inv.y == inv.e, ""});
  else
    out.push_back({"Upsilon1 + y = e", inv.upsilon1 + inv.y == inv.e, ""});
  out.push_back({"Upsilon2 + z = d", inv.upsilon2 + inv.z == inv.d, ""});
  out.push_back({"dim k_nE matches the decomposition", inv.predicted_total() == dim_knE,
                 std::to_string(inv.predicted_total()) + " vs " + std::to_string(dim_knE)});
  return out;
}

struct StructureReport {
  Invariants invariants;
  gmod::SummandProfile profile;
  gmod::Decomposition decomposition;
  Subspace X1, X2, Y, Z;  // X2 is zero for p = 2
  Subspace W;             // complement of ann{a,xi} in k_{n-1}F
  std::vector<CheckItem> checks;
  std::string complement_rule = kComplementRule;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Builds the decomposition from the explicit fixed layers:
/// L_1 = X_1 + Z, L_2 = i_E({xi} W) (p > 2), L_p = i_E N k_n E.
inline StructureReport decompose_knE(const Spaces& s) {
  const Residue p = s.p;
  const std::size_t dimE = s.module.dim();
  StructureReport r;
  r.invariants = compute_invariants(s);
  r.checks = relation_checks(r.invariants, dimE);

  r.X1 = fplin::complement(s.res_image, s.fixed);
  const Subspace res_norm = fplin::image_of(s.res, s.norm_image);
  const Subspace res_xi = fplin::image_of(s.res, s.xi_times_prev);
  const Subspace boundary = p > 2 ? fplin::sum(res_xi, res_norm) : res_norm;
  if (!s.res_image.contains(boundary)) throw CheckFailure("i_E({xi}k_{n-1}F) + i_E N k_nE not inside i_E k_nF");
  r.Z = fplin::complement(boundary, s.res_image);
  r.W = fplin::complement(s.ann_a_xi, s.kF_prev);

  std::vector<Subspace> layers(p, Subspace::zero(p, dimE));
  layers[0] = fplin::sum(r.X1, r.Z);
  if (p > 2) layers[1] = fplin::image_of(s.res * s.cup_xi, r.W);
  layers[p - 1] = res_norm;

  r.decomposition = gmod::decompose_from_layers(s.module, layers);
  r.profile = r.decomposition.profile;
  r.Y = r.decomposition.summand_bases[p - 1];
  r.X2 = p > 2 ? r.decomposition.summand_bases[1] : Subspace::zero(p, dimE);

  const auto& inv = r.invariants;
  r.checks.push_back({"dim X1 = Upsilon1", r.X1.dim() == inv.upsilon1, std::to_string(r.X1.dim())});
  r.checks.push_back({"dim Z = z", r.Z.dim() == inv.z, std::to_string(r.Z.dim())});
  if (p > 2) r.checks.push_back({"X2 has Upsilon2 summands", r.profile.mult(2) == inv.upsilon2, ""});
  r.checks.push_back({"Y has rank y", r.profile.mult(p) == inv.y, ""});
  r.checks.push_back({"profile matches invariants", r.profile == inv.predicted_profile(),
                      gmod::to_string(r.profile) + " vs " + gmod::to_string(inv.predicted_profile())});
  auto plain = gmod::decompose(s.module).profile;
  r.checks.push_back({"unseeded profile matches", plain == inv.predicted_profile() &&
                                                       plain == gmod::multiplicity_oracle(s.module),
                      gmod::to_string(plain)});
  bool excluded = true;
  for (std::size_t j = 3; j < p; ++j) excluded = excluded && plain.mult(j) == 0;
  r.checks.push_back({"no summands of length 2 < j < p", excluded, ""});
  if (auto why = gmod::decomposition_violation(s.module, r.decomposition); !why.empty())
    r.checks.push_back({"decomposition invariants", false, why});
  else
    r.checks.push_back({"decomposition invariants", true, ""});
  return r;
}

inline StructureReport decompose_knE(const KummerK& k, int n) { return decompose_knE(spaces(k, n)); }

/// Statements about the individual summands.
inline std::vector<CheckItem> check_theorem_items(const StructureReport& r, const Spaces& s) {
  const Residue p = s.p;
  std::vector<CheckItem> out;
  out.push_back({"X1 trivial", fplin::image_of(s.module.t(), r.X1).dim() == 0, ""});
  out.push_back({"X1 meets i_E k_nF trivially", fplin::intersect(r.X1, s.res_image).dim() == 0, ""});
  out.push_back({"Z trivial", fplin::image_of(s.module.t(), r.Z).dim() == 0, ""});
  out.push_back({"Z inside i_E k_nF", s.res_image.contains(r.Z), ""});
  out.push_back({"Y free of rank y", r.Y.dim() == p * r.invariants.y, ""});
  const Subspace y_fixed = fplin::intersect(r.Y, s.fixed);
  out.push_back({"Y^G = i_E N k_nE", y_fixed == fplin::image_of(s.res, s.norm_image), ""});
  if (p > 2) {
    const Subspace x12 = fplin::sum(r.X1, r.X2);
    out.push_back({"N(X1 + X2) = {a}k_{n-1}F", fplin::image_of(s.norm, x12) == s.a_times_prev, ""});
    out.push_back({"X2 summands have length 2", r.X2.dim() == 2 * r.invariants.upsilon2 &&
                                                     fplin::image_of(s.module.t_pow(2), r.X2).dim() == 0,
                   ""});
  } else {
    const Subspace target = fplin::image_of(s.cup_a, s.ann_a_xi);
    const Subspace nx = fplin::image_of(s.norm, r.X1);
    out.push_back({"N: X1 -> {a}ann{a,-1} is an isomorphism", nx.dim() == r.X1.dim() && nx == target, ""});
  }
  return out;
}

/// Choice-free identities: the fixed layers, N = (sigma-1)^{p-1}, and the
/// six-term sequence 0 -> ann{a} -> k_{n-1}F -> k_nF -> (k_nE)^G -> {a}ann{a,xi} -> 0.
inline std::vector<CheckItem> check_canonical(const Spaces& s) {
  const Residue p = s.p;
  std::vector<CheckItem> out;
  const Subspace res_norm = fplin::image_of(s.res, s.norm_image);
  const Subspace t_fixed = fplin::intersect(gmod::omega_image(s.module, 1), s.fixed);
  const Subspace expected =
      p > 2 ? fplin::sum(fplin::image_of(s.res, s.xi_times_prev), res_norm) : res_norm;
  out.push_back({"(sigma-1)k_nE meets (k_nE)^G in the expected space", t_fixed == expected,
                 std::to_string(t_fixed.dim()) + " vs " + std::to_string(expected.dim())});
  for (std::size_t i = 3; i <= p; ++i) {
    const Subspace layer = fplin::intersect(gmod::omega_image(s.module, i - 1), s.fixed);
    out.push_back({"(sigma-1)^" + std::to_string(i - 1) + " layer = i_E N k_nE", layer == res_norm, ""});
  }
  out.push_back({"i_E N k_nE = (sigma-1)^{p-1} k_nE", res_norm == gmod::omega_image(s.module, p - 1), ""});

  // six-term sequence
  const Subspace last = fplin::image_of(s.cup_a, s.ann_a_xi);
  const Subspace n_fixed = fplin::image_of(s.norm, s.fixed);
  const Subspace ker_n_fixed = fplin::intersect(fplin::kernel(s.norm), s.fixed);
  out.push_back({"exact at ann{a}", true, "inclusion"});
  out.push_back({"exact at k_{n-1}F", s.ann_a == fplin::kernel(s.cup_a), ""});
  out.push_back({"exact at k_nF", s.a_times_prev == fplin::kernel(s.res), ""});
  out.push_back({"exact at (k_nE)^G", s.fixed.contains(s.res_image) && s.res_image == ker_n_fixed, ""});
  out.push_back({"exact at {a}ann{a,xi}", n_fixed == last, ""});
  const long alt = static_cast<long>(s.ann_a.dim()) - static_cast<long>(s.kF_prev.dim()) +
                   static_cast<long>(s.kF.dim()) - static_cast<long>(s.fixed.dim()) + static_cast<long>(last.dim());
  out.push_back({"six-term alternating sum = 0", alt == 0,
                 std::to_string(s.ann_a.dim()) + " | " + std::to_string(s.kF_prev.dim()) + " -> " +
                     std::to_string(s.kF.dim()) + " -> " + std::to_string(s.fixed.dim()) + " -> " +
                     std::to_string(last.dim())});
  return out;
}

/// {a}: V + W -> {a}k_{n-1}F is an isomorphism; for p > 2 also
/// i_E({xi} .): W -> i_E({xi}W) is.
inline std::vector<CheckItem> check_lemma_VW(const Spaces& s) {
  std::vector<CheckItem> out;
  const Subspace V = fplin::complement(s.ann_a, s.ann_a_xi);
  const Subspace W = fplin::complement(s.ann_a_xi, s.kF_prev);
  const Subspace VW = fplin::sum(V, W);
  const Subspace img = fplin::image_of(s.cup_a, VW);
  out.push_back({"{a}: V + W -> {a}k_{n-1}F bijective", img.dim() == VW.dim() && img == s.a_times_prev,
                 "dim " + std::to_string(VW.dim())});
  if (s.p > 2) {
    const Subspace iw = fplin::image_of(s.res * s.cup_xi, W);
    out.push_back({"i_E({xi} .) injective on W", iw.dim() == W.dim(), "dim " + std::to_string(W.dim())});
  }
  return out;
}

/// Full report for one (E/F, n): construction, theorem items, canonical
/// identities and the V/W lemma.
inline StructureReport analyze(const KummerK& k, int n) {
  const auto s = spaces(k, n);
  auto r = decompose_knE(s);
  for (auto& c : check_theorem_items(r, s)) r.checks.push_back(std::move(c));
  for (auto& c : check_canonical(s)) r.checks.push_back(std::move(c));
  for (auto& c : check_lemma_VW(s)) r.checks.push_back(std::move(c));
  return r;
}

}  // namespace knorm::structure
