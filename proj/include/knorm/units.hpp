#pragma once

// Coordinates of F^x / F^xp through the principal-unit filtration, for a
// field F containing mu_p.
//
// With c = p e/(p-1) and m = e/(p-1), a basis of F^x/F^xp is
//   pi;  1 + theta_c pi^c;  1 + beta_t pi^j   (1 <= j < c, p does not divide j)
// where beta_t runs over the F_p-basis of the residue field and theta_c is
// the first residue outside the image of s -> s^p + eps s, eps = p / pi^e.
// The log peels the unit one level at a time; levels past c are p-th powers.

#include <string>
#include <vector>

#include "knorm/padic.hpp"

namespace knorm::padic {

class UnitFiltration {
 public:
  using Res = LocalField::Res;

  explicit UnitFiltration(FieldPtr f) : F_(std::move(f)) {
    if (!F_->has_mu_p()) throw InputError("primitive p-th root of unity required");
    const int p = static_cast<int>(F_->p());
    c_ = F_->wild_bound();
    m_ = F_->ramification() / (p - 1);
    eps_ = p_over_pi_e(F_).residue();
    const auto q = F_->residue_size();
    wp_pre_.assign(q, -1);
    for (Res s = 0; s < q; ++s) {
      Res img = wp(s);
      if (wp_pre_[img] < 0) wp_pre_[img] = static_cast<int>(s);
    }
    theta_ = 0;
    while (theta_ < q && wp_pre_[theta_] >= 0) ++theta_;
    if (theta_ == q) throw InternalError("Artin-Schreier map is surjective; mu_p data inconsistent");

    gens_.push_back(Elem::uniformizer(F_));
    levels_.push_back(0);
    gens_.push_back(Elem::one(F_) + Elem::unit(F_, F_->lift(theta_)).shift(c_));
    levels_.push_back(c_);
    for (int j = 1; j < c_; ++j) {
      if (j % p == 0) continue;
      Res beta = 1;
      for (int t = 0; t < F_->residue_degree(); ++t) {
        gens_.push_back(Elem::one(F_) + Elem::unit(F_, F_->lift(beta)).shift(j));
        levels_.push_back(j);
        beta *= static_cast<Res>(p);
      }
    }
    if (static_cast<int>(gens_.size()) != F_->degree() + 2)
      throw InternalError("filtration generator count differs from [F:Q_p] + 2");
  }

  const FieldPtr& field() const { return F_; }
  int dim() const { return static_cast<int>(gens_.size()); }
  int wild_level() const { return c_; }
  /// Standard generators in coordinate order.
  const std::vector<Elem>& generators() const { return gens_; }
  /// Filtration level of each generator (0 for the uniformizer).
  const std::vector<int>& levels() const { return levels_; }
  Res theta() const { return theta_; }

  /// The Artin-Schreier-type map s -> s^p + eps s on residues.
  Res wp(Res s) const { return F_->radd(F_->rpow(s, F_->p()), F_->rmul(eps_, s)); }

  /// Coordinates of the class of x in F^x/F^xp.
  fplin::Vec log(const Elem& x) const {
    const auto p = static_cast<fplin::Residue>(F_->p());
    fplin::Vec out(static_cast<std::size_t>(dim()), 0);
    const int v = x.valuation();
    out[0] = static_cast<fplin::Residue>(((v % static_cast<int>(p)) + static_cast<int>(p)) % static_cast<int>(p));
    if (x.rel_precision() < c_ + 1)
      throw PrecisionError("p-th power test needs relative precision " + std::to_string(c_ + 1) + ", have " +
                           std::to_string(x.rel_precision()));
    Elem u = x.unit_elem();
    Elem u1 = u / teichmueller(u);
    const Elem one = Elem::one(F_);
    for (int guard = 0; guard <= 2 * c_ + 2; ++guard) {
      Elem w = u1 - one;
      if (w.vanishes_to(c_ + 1)) return out;
      const int j = w.valuation();
      if (j > c_) return out;
      const Res t = w.shift(-j).residue();
      if (j < c_ && j % static_cast<int>(p) != 0) {
        auto digits = F_->residue_digits(t);
        for (std::size_t k = 0; k < digits.size(); ++k) {
          if (!digits[k]) continue;
          const std::size_t idx = index_of(j, static_cast<int>(k));
          out[idx] = digits[k];
          u1 = u1 / gens_[idx].pow(digits[k]);
        }
      } else if (j < c_) {
        Elem g = one + Elem::unit(F_, F_->lift(F_->rproot(t))).shift(j / static_cast<int>(p));
        u1 = u1 / g.pow(p);
      } else {
        auto [k, s] = split_wild(t);
        out[1] = k;
        if (k) u1 = u1 / gens_[1].pow(k);
        if (s) u1 = u1 / (one + Elem::unit(F_, F_->lift(s)).shift(m_)).pow(p);
      }
    }
    throw InternalError("unit filtration log did not terminate");
  }

  bool is_pth_power(const Elem& x) const { return fplin::is_zero(log(x)); }

  /// Writes t = wp(s) + k theta; returns (k, s).
  std::pair<fplin::Residue, Res> split_wild(Res t) const {
    Res shift = 0;
    for (fplin::Residue k = 0; k < F_->p(); ++k) {
      Res target = F_->radd(t, F_->rneg(shift));
      if (wp_pre_[target] >= 0) return {k, static_cast<Res>(wp_pre_[target])};
      shift = F_->radd(shift, theta_);
    }
    throw InternalError("residue not in any Artin-Schreier coset");
  }
  /// Preimage of t under wp, if any.
  std::optional<Res> wp_preimage(Res t) const {
    if (wp_pre_[t] < 0) return std::nullopt;
    return static_cast<Res>(wp_pre_[t]);
  }

 private:
  std::size_t index_of(int level, int digit) const {
    const int p = static_cast<int>(F_->p());
    const int before = (level - 1) - (level - 1) / p;  // admissible levels below `level`
    return 2 + static_cast<std::size_t>(before * F_->residue_degree() + digit);
  }

  FieldPtr F_;
  int c_ = 0, m_ = 0;
  Res eps_ = 0, theta_ = 0;
  std::vector<int> wp_pre_;
  std::vector<Elem> gens_;
  std::vector<int> levels_;
};

inline bool is_pth_power(const Elem& x) {
  const auto& F = x.field();
  if (!F->has_mu_p()) throw InputError("p-th power test requires mu_p in the field");
  return UnitFiltration(F).is_pth_power(x);
}

}  // namespace knorm::padic
