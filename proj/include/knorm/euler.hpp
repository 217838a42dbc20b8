#pragma once

// Partial Euler-Poincare characteristics of the maximal pro-p Galois group
// T of F and of an index-p subgroup N, computed from a cohomology profile
// h_i = dim H^i(T), a_i = dim ann(a) in H^i(T), d_i = h_i - a_i.

#include <optional>
#include <string>
#include <vector>

#include "knorm/milnor.hpp"
#include "knorm/structure.hpp"

namespace knorm::euler {

using fplin::Residue;
using milnor::CheckItem;

enum class Source { LocalField, Manual };

/// Data observed directly on k_i E, available for local-field profiles.
struct Observed {
  std::vector<long> dim_hN;      // dim k_i E
  std::vector<long> free_rank;   // rank of a maximal free summand of k_i E
  std::vector<long> y;           // structure invariant y in degree i
  std::vector<std::optional<long>> cor_over_a;  // dim N k_iE / {a}k_{i-1}F when the inclusion holds
};

struct CohomologyProfile {
  Residue p = 2;
  int n = 0;
  std::vector<long> h;  // h_0..h_n
  std::vector<long> a;  // a_0..a_n (a_0 = 0 for a nontrivial class)
  std::vector<long> d;  // d_0..d_n
  std::optional<bool> minus_one_norm;
  Source source = Source::Manual;
  std::optional<Observed> observed;

  void validate() const {
    const auto len = static_cast<std::size_t>(n + 1);
    if (n < 0) throw InputError("profile degree must be nonnegative");
    if (h.size() != len || a.size() != len || d.size() != len) throw InputError("profile lists have the wrong length");
    if (h[0] != 1) throw InputError("h_0 must be 1");
    for (std::size_t i = 0; i < len; ++i) {
      if (h[i] < 0 || a[i] < 0 || d[i] < 0) throw InputError("profile entries must be nonnegative");
      if (h[i] != a[i] + d[i]) throw InputError("h_i = a_i + d_i fails at i = " + std::to_string(i));
    }
  }
};

/// Manual profile from h_0..h_n and a_1..a_n.
inline CohomologyProfile manual_profile(Residue p, int n, std::vector<long> h, const std::vector<long>& a_tail,
                                        std::optional<bool> minus_one_norm) {
  fplin::check_modulus(p);
  if (n < 0) throw InputError("profile degree must be nonnegative");
  if (a_tail.size() != static_cast<std::size_t>(n)) throw InputError("a must list a_1..a_n");
  CohomologyProfile pr;
  pr.p = p;
  pr.n = n;
  pr.h = std::move(h);
  pr.a = {0};
  pr.a.insert(pr.a.end(), a_tail.begin(), a_tail.end());
  if (pr.h.size() != pr.a.size()) throw InputError("h must list h_0..h_n");
  for (std::size_t i = 0; i < pr.h.size(); ++i) pr.d.push_back(pr.h[i] - pr.a[i]);
  pr.minus_one_norm = minus_one_norm;
  pr.source = Source::Manual;
  pr.validate();
  return pr;
}

inline CohomologyProfile profile_from_field(const milnor::KummerK& k, int n) {
  if (n < 0) throw InputError("profile degree must be nonnegative");
  const auto& F = k.base();
  CohomologyProfile pr;
  pr.p = k.p();
  pr.n = n;
  pr.source = Source::LocalField;
  Observed obs;
  for (int i = 0; i <= n; ++i) {
    const long h = static_cast<long>(F.group(i)->dim());
    const long a = static_cast<long>(fplin::kernel(F.cup(k.a_class(), i + 1)).dim());
    pr.h.push_back(h);
    pr.a.push_back(a);
    pr.d.push_back(h - a);
    const auto mod = k.sigma(i);
    obs.dim_hN.push_back(static_cast<long>(mod.dim()));
    obs.free_rank.push_back(static_cast<long>(gmod::free_rank(mod)));
    obs.y.push_back(static_cast<long>(structure::compute_invariants(k, i).y));
    const auto cor = fplin::image(k.norm(i).matrix);
    const auto ah = fplin::image(F.cup(k.a_class(), i));
    obs.cor_over_a.push_back(cor.contains(ah) ? std::optional<long>(static_cast<long>(cor.dim() - ah.dim()))
                                              : std::nullopt);
  }
  if (pr.p == 2) {
    const auto m1 = F.class_of(padic::Elem::integer(F.field(), -1));
    pr.minus_one_norm = F.norm_image(k.a_class()).contains(m1);
  }
  pr.observed = std::move(obs);
  pr.validate();
  return pr;
}

inline long sign(int i) { return i % 2 ? -1 : 1; }

/// chi_n(T) = sum (-1)^i h_i.
inline long chi_T(const CohomologyProfile& pr) {
  long s = 0;
  for (int i = 0; i <= pr.n; ++i) s += sign(i) * pr.h[static_cast<std::size_t>(i)];
  return s;
}

enum class Variant { A, B, C };

inline std::string to_string(Variant v) { return v == Variant::A ? "a" : v == Variant::B ? "b" : "c"; }

/// Whether variant (b) is licensed: p > 2, or p = 2 with -1 a norm.
inline bool licensed_b(const CohomologyProfile& pr) { return pr.p > 2 || pr.minus_one_norm.value_or(false); }

/// dim H^i(N) by the requested formula; nullopt when the formula's
/// hypotheses are not met.
inline std::optional<long> dim_HN_formula(const CohomologyProfile& pr, int i, Variant v) {
  if (i < 0 || i > pr.n) throw InputError("degree outside the profile");
  const long p = static_cast<long>(pr.p);
  if (i == 0) return 1;
  const auto u = static_cast<std::size_t>(i);
  const long base = pr.d[u - 1] + pr.d[u];
  switch (v) {
    case Variant::A: {
      if (pr.observed) {
        const auto q = pr.observed->cor_over_a[u];
        if (!q) return std::nullopt;
        return base + p * *q;
      }
      if (!licensed_b(pr)) return std::nullopt;
      return base + p * (pr.a[u] - pr.d[u - 1]);
    }
    case Variant::B: {
      if (!licensed_b(pr)) return std::nullopt;
      const long y = pr.observed ? pr.observed->y[u] : pr.a[u] - pr.d[u - 1];
      return base + p * y;
    }
    case Variant::C:
      return base + p * (pr.a[u] - pr.d[u - 1]);
  }
  return std::nullopt;
}

/// chi_n(N) through variant (c).
inline long chi_N(const CohomologyProfile& pr) {
  long s = 0;
  for (int i = 0; i <= pr.n; ++i) s += sign(i) * *dim_HN_formula(pr, i, Variant::C);
  return s;
}

/// Free characteristic p * sum_{i=1}^n (-1)^i (a_i - d_{i-1}).
inline long chi_free_formula(const CohomologyProfile& pr) {
  long s = 0;
  for (int i = 1; i <= pr.n; ++i)
    s += sign(i) * (pr.a[static_cast<std::size_t>(i)] - pr.d[static_cast<std::size_t>(i - 1)]);
  return static_cast<long>(pr.p) * s;
}

struct EPReport {
  long chi_T = 0, chi_N = 0;
  std::optional<long> chi_free_N;  // when variant (b) is licensed
  std::vector<long> dim_HN;
  long theorem3a_lhs = 0, theorem3a_rhs = 0;
  std::optional<long> theorem3b_lhs, theorem3b_rhs;
  bool doubles = false;  // chi_n(N) = p chi_n(T)
  std::vector<CheckItem> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline EPReport theorem3_check(const CohomologyProfile& pr) {
  pr.validate();
  const long p = static_cast<long>(pr.p);
  const long dn = pr.d[static_cast<std::size_t>(pr.n)];
  EPReport r;
  r.chi_T = chi_T(pr);
  r.chi_N = chi_N(pr);
  for (int i = 0; i <= pr.n; ++i) r.dim_HN.push_back(*dim_HN_formula(pr, i, Variant::C));

  if (pr.observed) {
    const auto& obs = *pr.observed;
    long direct = 0;
    for (int i = 0; i <= pr.n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      direct += sign(i) * obs.dim_hN[u];
      r.checks.push_back({"formula (c) = dim k_" + std::to_string(i) + "E", r.dim_HN[u] == obs.dim_hN[u],
                          std::to_string(r.dim_HN[u]) + " vs " + std::to_string(obs.dim_hN[u])});
      for (auto v : {Variant::A, Variant::B}) {
        if (auto f = dim_HN_formula(pr, i, v))
          r.checks.push_back({"formula (" + to_string(v) + ") = dim k_" + std::to_string(i) + "E", *f == obs.dim_hN[u],
                              std::to_string(*f) + " vs " + std::to_string(obs.dim_hN[u])});
      }
    }
    r.checks.push_back({"chi_n(N) equals the direct count", direct == r.chi_N, std::to_string(direct)});
  }

  r.theorem3a_lhs = p * r.chi_T - r.chi_N;
  r.theorem3a_rhs = sign(pr.n) * (p - 1) * dn;
  r.checks.push_back({"p chi_n(T) - chi_n(N) = (-1)^n (p-1) d_n", r.theorem3a_lhs == r.theorem3a_rhs,
                      std::to_string(r.theorem3a_lhs) + " = " + std::to_string(r.theorem3a_rhs)});

  if (pr.p == 2 && !pr.minus_one_norm) throw InputError("p = 2 profile must declare minus_one_norm");
  if (licensed_b(pr)) {
    r.chi_free_N = chi_free_formula(pr);
    if (pr.observed) {
      long direct = 0;
      for (int i = 0; i <= pr.n; ++i) direct += sign(i) * p * pr.observed->free_rank[static_cast<std::size_t>(i)];
      r.checks.push_back({"free characteristic equals the free summands of k_iE", direct == *r.chi_free_N,
                          std::to_string(*r.chi_free_N) + " vs " + std::to_string(direct)});
    }
    r.theorem3b_lhs = r.chi_N;
    r.theorem3b_rhs = *r.chi_free_N + sign(pr.n) * dn;
    r.checks.push_back({"chi_n(N) = free part + (-1)^n d_n", *r.theorem3b_lhs == *r.theorem3b_rhs,
                        std::to_string(*r.theorem3b_lhs) + " = " + std::to_string(*r.theorem3b_rhs)});
  } else {
    r.checks.push_back({"chi_n(N) = free part + (-1)^n d_n", true, "not licensed: -1 is not a norm"});
  }

  r.doubles = r.chi_N == p * r.chi_T;
  r.checks.push_back({"doubling iff d_n = 0", r.doubles == (dn == 0), ""});
  if (r.chi_free_N)
    r.checks.push_back({"doubling iff chi_n(N) = free part", r.doubles == (r.chi_N == *r.chi_free_N), ""});
  return r;
}

struct CorollaryReport {
  std::size_t extensions = 0;
  std::size_t doubling = 0;
  bool all_double = false;
  std::vector<CheckItem> checks;
  std::string summary;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Cohomological-dimension probe over the profiles of every index-p subgroup.
/// `cd` is the known cohomological dimension, when there is one.
inline CorollaryReport corollary_checks(const std::vector<CohomologyProfile>& profiles, std::size_t expected_count,
                                        std::optional<int> cd) {
  CorollaryReport r;
  r.extensions = profiles.size();
  r.checks.push_back({"enumeration complete", profiles.size() == expected_count,
                      std::to_string(profiles.size()) + " of " + std::to_string(expected_count)});
  if (profiles.empty()) return r;
  const int n = profiles.front().n;
  const long p = static_cast<long>(profiles.front().p);
  for (const auto& pr : profiles) {
    auto ep = theorem3_check(pr);
    if (ep.doubles) ++r.doubling;
    for (auto& c : ep.checks)
      if (!c.pass) r.checks.push_back(std::move(c));
  }
  r.all_double = r.doubling == profiles.size();
  const std::string chi = "chi_" + std::to_string(n);
  const std::string mult = p == 2 ? "doubles" : "multiplies by " + std::to_string(p);
  if (r.all_double)
    r.summary = chi + " " + mult + " for all " + std::to_string(profiles.size()) + " subgroups";
  else
    r.summary = chi + " " + mult + " for " + std::to_string(r.doubling) + " of " + std::to_string(profiles.size()) +
                " subgroups";
  if (cd) {
    const bool expect = n >= *cd;
    r.summary += r.all_double == expect ? ": consistent with cd = " + std::to_string(*cd)
                                        : ": inconsistent with cd = " + std::to_string(*cd);
    r.checks.push_back({"cohomological dimension probe", r.all_double == expect, r.summary});
  }
  return r;
}

/// All lines in k_1 F, each as its normalized class vector.
inline std::vector<fplin::Vec> all_lines(const milnor::LocalK& F) {
  const auto p = F.p();
  const auto dim = F.group(1)->dim();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= p;
  std::vector<fplin::Vec> out;
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    fplin::Vec v(dim);
    auto t = idx;
    for (auto& x : v) {
      x = static_cast<Residue>(t % p);
      t /= p;
    }
    if (milnor::normalize_line(v, p) == v) out.push_back(std::move(v));
  }
  return out;
}

/// (p^dim - 1) / (p - 1), the number of index-p subgroups.
inline std::size_t line_count(Residue p, std::size_t dim) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= p;
  return (total - 1) / (p - 1);
}

}  // namespace knorm::euler
