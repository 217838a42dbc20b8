#pragma once

// Independent reference computations used only by the test suites.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "knorm/fplin.hpp"

namespace oracle {

using knorm::fplin::Residue;
using knorm::fplin::Vec;

/// Every vector of F_p^n (p^n must be small).
inline std::vector<Vec> all_vectors(Residue p, std::size_t n) {
  std::vector<Vec> out;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= p;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    Vec v(n);
    std::uint64_t t = idx;
    for (auto& x : v) {
      x = static_cast<Residue>(t % p);
      t /= p;
    }
    out.push_back(std::move(v));
  }
  return out;
}

/// The set of all F_p-combinations of the given generators.
inline std::set<Vec> span_set(Residue p, std::size_t n, const std::vector<Vec>& gens) {
  std::set<Vec> out;
  for (const auto& c : all_vectors(p, gens.size())) {
    Vec v(n, 0);
    for (std::size_t g = 0; g < gens.size(); ++g)
      for (std::size_t j = 0; j < n; ++j) v[j] = static_cast<Residue>((v[j] + std::uint64_t{c[g]} * gens[g][j]) % p);
    out.insert(v);
  }
  return out;
}

/// log_p of the size of a finite F_p-space given as a set.
inline std::size_t dim_of_set(Residue p, std::size_t size) {
  std::size_t d = 0;
  while (size > 1) {
    size /= p;
    ++d;
  }
  return d;
}

inline Vec mat_vec(Residue p, const std::vector<Vec>& rows, const Vec& v) {
  Vec out(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s += std::uint64_t{rows[i][j]} * v[j];
    out[i] = static_cast<Residue>(s % p);
  }
  return out;
}

/// Random invertible n x n matrix given by its rows.
inline knorm::fplin::FpMatrix random_invertible(Residue p, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<Residue> dist(0, p - 1);
  for (;;) {
    knorm::fplin::FpMatrix m(p, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, dist(rng));
    if (m.rank() == n) return m;
  }
}

}  // namespace oracle

#include "knorm/padic.hpp"

namespace oracle {

using knorm::padic::Coeffs;
using knorm::padic::Elem;
using knorm::padic::FieldPtr;

/// Brute force: x is a p-th power iff v(x) = 0 mod p and its unit part is
/// congruent to some y^p modulo pi^{c+1}, y running over O / pi^{c+1}.
inline bool brute_pth_power(const Elem& x) {
  const FieldPtr& F = x.field();
  const int p = static_cast<int>(F->p());
  if (((x.valuation() % p) + p) % p != 0) return false;
  const int c = F->wild_bound();
  const Coeffs u = x.unit_part();
  const std::uint64_t q = F->residue_size();
  std::uint64_t total = 1;
  for (int i = 0; i <= c; ++i) total *= q;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    Coeffs y = F->zero();
    std::uint64_t t = idx;
    Coeffs pw = F->one();
    for (int i = 0; i <= c; ++i) {
      y = F->add(y, F->mul(F->lift(static_cast<knorm::padic::LocalField::Res>(t % q)), pw));
      t /= q;
      pw = F->mul_pi(pw);
    }
    if (F->val(F->sub(F->pow(y, F->p()), u)) >= c + 1) return true;
  }
  return false;
}

/// Determinant by cofactor expansion.
inline Elem determinant(const std::vector<std::vector<Elem>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Elem acc = Elem::zero(m[0][0].field(), 1000);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Elem>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Elem> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[r][c]);
      minor.push_back(row);
    }
    Elem term = m[0][j] * determinant(minor);
    acc = j % 2 ? acc - term : acc + term;
  }
  return acc;
}

/// Norm from a one-step extension E/F as det of multiplication by x.
inline Elem det_norm(const Elem& x) {
  const FieldPtr& E = x.field();
  const FieldPtr& F = E->parent();
  const int d = E->step_degree();
  const int np = F->degree();
  const int v = x.valuation();
  // x = pi_E^v u with u integral; norm(pi_E) via the step polynomial.
  const Coeffs u = x.unit_part();
  std::vector<std::vector<Elem>> mat(static_cast<std::size_t>(d));
  Coeffs g = E->one();
  std::vector<Coeffs> cols;
  for (int i = 0; i < d; ++i) {
    cols.push_back(E->mul(u, g));
    g = E->mul(g, E->generator());
  }
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      Coeffs b(cols[static_cast<std::size_t>(c)].begin() + r * np, cols[static_cast<std::size_t>(c)].begin() + (r + 1) * np);
      mat[static_cast<std::size_t>(r)].push_back(Elem::from_integral(F, b, F->precision()));
    }
  Elem nu = determinant(mat);
  Elem npi = E->kind() == knorm::padic::StepKind::Eisenstein
                 ? Elem::from_integral(F, E->step_polynomial()[0], F->precision()) * Elem::integer(F, d % 2 ? -1 : 1)
                 : Elem::uniformizer(F).pow(d);
  return nu * npi.pow(v);
}

}  // namespace oracle
