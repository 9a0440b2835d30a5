#include "grslab/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grslab/weightlab.hpp"

namespace grslab::seqspace {

const char* to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::summable: return "summable";
    case TailVerdict::divergent: return "divergent";
    default: return "inconclusive";
  }
}

LatticeSeq::LatticeSeq(int dim, int half_width) : dim_(dim), half_width_(half_width) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("lattice dim must be 1 or 2");
  int cap = dim == 1 ? kMaxHalfWidth1d : kMaxHalfWidth2d;
  if (half_width < 1 || half_width > cap)
    throw std::invalid_argument("lattice half-width out of range");
  std::size_t n = 2 * static_cast<std::size_t>(half_width) + 1;
  values_.assign(dim == 1 ? n : n * n, 0.0);
}

double& LatticeSeq::at(int k1, int k2) {
  if (std::abs(k1) > half_width_ || std::abs(k2) > half_width_ ||
      (dim_ == 1 && k2 != 0))
    throw std::out_of_range("lattice index outside the section");
  std::size_t n = 2 * static_cast<std::size_t>(half_width_) + 1;
  std::size_t i = static_cast<std::size_t>(k1 + half_width_);
  return dim_ == 1 ? values_[i] : values_[i * n + (k2 + half_width_)];
}

double LatticeSeq::at(int k1, int k2) const {
  return const_cast<LatticeSeq*>(this)->at(k1, k2);
}

namespace {

double weight_at(const Weight& w, int dim, int k1, int k2) {
  if (dim == 1) {
    double x = k1;
    return w.eval(std::span<const double>(&x, 1));
  }
  double x[2] = {static_cast<double>(k1), static_cast<double>(k2)};
  return w.eval(std::span<const double>(x, 2));
}

/// Accumulates |a(k) w(k)|^p (or the sup for p = inf) over |k|_inf <= width.
struct CubeSum {
  double power_sum = 0.0;
  double sup = 0.0;
};

CubeSum cube_sum(const LatticeSeq& a, const Weight& w, double p, int width) {
  CubeSum s;
  const bool sup_form = std::isinf(p);
  if (a.dim() == 1) {
    for (int k = -width; k <= width; ++k) {
      double t = std::abs(a.at(k)) * weight_at(w, 1, k, 0);
      if (sup_form)
        s.sup = std::max(s.sup, t);
      else
        s.power_sum += std::pow(t, p);
    }
  } else {
    for (int k1 = -width; k1 <= width; ++k1)
      for (int k2 = -width; k2 <= width; ++k2) {
        double t = std::abs(a.at(k1, k2)) * weight_at(w, 2, k1, k2);
        if (sup_form)
          s.sup = std::max(s.sup, t);
        else
          s.power_sum += std::pow(t, p);
      }
  }
  return s;
}

}  // namespace

double weighted_lp_norm(const LatticeSeq& a, const Weight& w, double p) {
  if (w.dim() != a.dim())
    throw std::invalid_argument("weight and sequence dims differ");
  if (!(p > 0.0)) throw std::invalid_argument("weighted_lp_norm needs p > 0");
  CubeSum s = cube_sum(a, w, p, a.half_width());
  return std::isinf(p) ? s.sup : std::pow(s.power_sum, 1.0 / p);
}

TailVerdict tail_growth_probe(const LatticeSeq& a, const Weight& w, double p,
                              int windows) {
  if (w.dim() != a.dim())
    throw std::invalid_argument("weight and sequence dims differ");
  if (!(p > 0.0)) throw std::invalid_argument("tail_growth_probe needs p > 0");
  if (windows < 3) throw std::invalid_argument("tail_growth_probe needs windows >= 3");

  const int K = a.half_width();
  const bool sup_form = std::isinf(p);

  // Increments of the partial p-power sums on nested cubes (annulus sups for
  // the sup form).
  std::vector<double> increments;
  double prev = 0.0;
  int prev_width = -1;
  for (int i = 1; i <= windows; ++i) {
    int width = std::max(1, static_cast<int>(std::llround(static_cast<double>(i) * K / windows)));
    if (width == prev_width) continue;
    CubeSum s = cube_sum(a, w, p, width);
    if (sup_form) {
      increments.push_back(std::max(0.0, s.sup - prev));
      prev = std::max(prev, s.sup);
    } else {
      if (std::isinf(s.power_sum)) return TailVerdict::divergent;  // overflow = growth
      increments.push_back(std::max(0.0, s.power_sum - prev));
      prev = s.power_sum;
    }
    prev_width = width;
  }
  if (increments.size() < 3) return TailVerdict::inconclusive;

  // The first increments carry core mass, not tail behavior; only ratios
  // between genuine tail increments decide.  Zero tails are summable.
  const double kTiny = 1e-300;
  std::size_t tail_len = std::min<std::size_t>(3, increments.size() - 2);
  std::size_t first = increments.size() - tail_len;
  bool tail_zero = true;
  for (std::size_t i = first; i < increments.size(); ++i)
    if (increments[i] > kTiny) tail_zero = false;
  if (tail_zero) return TailVerdict::summable;

  bool all_decay = true, all_grow = true;
  for (std::size_t i = first; i < increments.size(); ++i) {
    double num = increments[i], den = increments[i - 1];
    double ratio;
    if (den <= kTiny)
      ratio = num <= kTiny ? 0.0 : std::numeric_limits<double>::infinity();
    else
      ratio = num / den;
    if (!(ratio <= 0.9)) all_decay = false;
    if (!(ratio >= 1.0 - 1e-9)) all_grow = false;
  }
  if (all_decay) return TailVerdict::summable;
  if (all_grow) return TailVerdict::divergent;
  return TailVerdict::inconclusive;
}

IdentityReport identity_experiment(
    const std::vector<std::pair<std::string, LatticeSeq>>& test_seqs,
    const std::vector<Weight>& grs_battery, const std::vector<double>& eps_list,
    double p, int windows) {
  if (grs_battery.empty()) throw std::invalid_argument("battery must be non-empty");
  weightlab::ScanParams checks;
  for (const auto& w : grs_battery) {
    if (!weightlab::check_grs_via_limit(w, checks).passed() ||
        !weightlab::check_grs_via_subexp(w, checks).passed())
      throw std::invalid_argument("identity battery contains a weight failing the growth checks: " +
                                  w.id());
  }

  IdentityReport rep;
  for (const auto& [id, seq] : test_seqs) {
    IdentityRow row;
    row.sequence_id = id;

    int eps_summable = 0, eps_divergent = 0;
    for (double eps : eps_list) {
      Weight v_eps = Weight::subexp(eps, 1.0, seq.dim());
      TailVerdict v = tail_growth_probe(seq, v_eps, p, windows);
      row.per_eps.emplace_back(v_eps.id(), v);
      if (v == TailVerdict::summable) ++eps_summable;
      if (v == TailVerdict::divergent) ++eps_divergent;
    }
    if (eps_summable > 0)
      row.left = TailVerdict::summable;
    else if (eps_divergent == static_cast<int>(eps_list.size()))
      row.left = TailVerdict::divergent;
    else
      row.left = TailVerdict::inconclusive;

    int w_summable = 0, w_divergent = 0;
    for (const auto& w : grs_battery) {
      TailVerdict v = tail_growth_probe(seq, w, p, windows);
      row.per_weight.emplace_back(w.id(), v);
      if (v == TailVerdict::summable) ++w_summable;
      if (v == TailVerdict::divergent) ++w_divergent;
    }
    if (w_divergent > 0)
      row.right = TailVerdict::divergent;
    else if (w_summable == static_cast<int>(grs_battery.size()))
      row.right = TailVerdict::summable;
    else
      row.right = TailVerdict::inconclusive;

    if (row.left != TailVerdict::inconclusive && row.right != TailVerdict::inconclusive) {
      ++rep.decisive_rows;
      if (row.left == row.right)
        ++rep.agreeing_rows;
      else
        rep.all_agree = false;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<std::pair<std::string, LatticeSeq>> shipped_sequences(int half_width) {
  std::vector<std::pair<std::string, LatticeSeq>> out;
  out.emplace_back("delta0", LatticeSeq::from_fn(half_width, [](int k) {
                     return k == 0 ? 1.0 : 0.0;
                   }));
  out.emplace_back("gauss", LatticeSeq::from_fn(half_width, [](int k) {
                     return std::exp(-0.5 * k * k);
                   }));
  out.emplace_back("exp2", LatticeSeq::from_fn(half_width, [](int k) {
                     return std::exp(-2.0 * std::abs(k));
                   }));
  out.emplace_back("poly3_exp2", LatticeSeq::from_fn(half_width, [](int k) {
                     double ak = std::abs(k);
                     return std::pow(1.0 + ak, 3.0) * std::exp(-2.0 * ak);
                   }));
  out.emplace_back("ones", LatticeSeq::from_fn(half_width, [](int) { return 1.0; }));
  out.emplace_back("polyinv2", LatticeSeq::from_fn(half_width, [](int k) {
                     return std::pow(1.0 + std::abs(k), -2.0);
                   }));
  return out;
}

std::vector<Weight> default_identity_battery() {
  return {Weight::constant(), Weight::polynomial(3.0), Weight::subexp(1.0, 0.5),
          Weight::subexp(2.0, 0.9)};
}

}  // namespace grslab::seqspace
