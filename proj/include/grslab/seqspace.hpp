#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grslab/weight.hpp"

namespace grslab::seqspace {

inline constexpr int kMaxHalfWidth1d = 512;
inline constexpr int kMaxHalfWidth2d = 64;

/// Dense real values on the centered cube {-K..K}^d of Z^d, d = 1 or 2.
class LatticeSeq {
 public:
  LatticeSeq(int dim, int half_width);

  /// Fills from fn(k) (d = 1) or fn(k1, k2) (d = 2).
  template <typename Fn>
  static LatticeSeq from_fn(int half_width, Fn&& fn) {
    LatticeSeq a(1, half_width);
    for (int k = -half_width; k <= half_width; ++k) a.at(k) = fn(k);
    return a;
  }
  template <typename Fn>
  static LatticeSeq from_fn2(int half_width, Fn&& fn) {
    LatticeSeq a(2, half_width);
    for (int k1 = -half_width; k1 <= half_width; ++k1)
      for (int k2 = -half_width; k2 <= half_width; ++k2) a.at(k1, k2) = fn(k1, k2);
    return a;
  }

  double& at(int k1, int k2 = 0);
  double at(int k1, int k2 = 0) const;

  int dim() const { return dim_; }
  int half_width() const { return half_width_; }
  std::span<const double> values() const { return values_; }

 private:
  int dim_;
  int half_width_;
  std::vector<double> values_;
};

/// (sum_k |a(k) w(k)|^p)^{1/p}; sup form for p = inf.  Quasi-norm semantics
/// for p < 1 (same formula, no triangle inequality implied).
double weighted_lp_norm(const LatticeSeq& a, const Weight& w, double p);

enum class TailVerdict { summable, divergent, inconclusive };
const char* to_string(TailVerdict v);

/// Finite-section membership surrogate: partial weighted p-power sums over
/// the nested cubes K/windows, 2K/windows, ..., K.  The verdict looks at the
/// ratios of the last (up to three) partial-sum increments:
///   summable    every tail ratio <= 0.9 (or the tail increments vanish)
///   divergent   every tail ratio >= 1, or an increment overflowed
///   inconclusive otherwise
/// For p = inf the increments are the per-annulus sups of |a(k)| w(k).
TailVerdict tail_growth_probe(const LatticeSeq& a, const Weight& w, double p,
                              int windows);

struct IdentityRow {
  std::string sequence_id;
  TailVerdict left;   // exists eps in eps_list with a summable v_eps probe
  TailVerdict right;  // probe summable for every battery weight
  std::vector<std::pair<std::string, TailVerdict>> per_weight;
  std::vector<std::pair<std::string, TailVerdict>> per_eps;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  int decisive_rows = 0;   // rows where both verdicts are decisive
  int agreeing_rows = 0;
  bool all_agree = true;   // over decisive rows
};

/// Probes both sides of the union/intersection identity on a finite test
/// set.  Every battery member must pass both growth checks (error if not).
IdentityReport identity_experiment(
    const std::vector<std::pair<std::string, LatticeSeq>>& test_seqs,
    const std::vector<Weight>& grs_battery, const std::vector<double>& eps_list,
    double p, int windows = 8);

/// The six-sequence test set shipped with the CLI.
std::vector<std::pair<std::string, LatticeSeq>> shipped_sequences(int half_width = 512);
/// Default adversarial battery for the identity experiment (all members
/// satisfy both growth checks; includes a fast-growing admissible weight).
std::vector<Weight> default_identity_battery();

}  // namespace grslab::seqspace
