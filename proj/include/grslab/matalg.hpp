#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "grslab/weight.hpp"

namespace grslab::matalg {

inline constexpr int kMaxHalfWidth = 512;

/// Dense real matrix indexed by the centered section {-N..N} x {-N..N} of
/// the 1-d lattice.
class LatticeMatrix {
 public:
  explicit LatticeMatrix(int half_width);
  static LatticeMatrix identity(int half_width);
  /// a(j,k) = fn(j - k).
  template <typename Fn>
  static LatticeMatrix toeplitz(int half_width, Fn&& fn) {
    LatticeMatrix m(half_width);
    for (int j = -half_width; j <= half_width; ++j)
      for (int k = -half_width; k <= half_width; ++k) m.at(j, k) = fn(j - k);
    return m;
  }

  double& at(int j, int k);
  double at(int j, int k) const;

  int half_width() const { return half_width_; }
  int n() const { return 2 * half_width_ + 1; }
  int dim() const { return 1; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

 private:
  int half_width_;
  std::vector<double> data_;  // row-major, index (j+N)*(2N+1) + (k+N)
};

/// Least-squares line through (|k|, log d_k) over the fit band; rate is the
/// negated slope.  `valid` is false when fewer than two usable points exist
/// (rate then reports the +inf sentinel).
struct ExpFit {
  double rate = std::numeric_limits<double>::infinity();
  double amplitude = 0.0;
  double r_squared = 0.0;
  int band_lo = 0;
  int band_hi = 0;
  bool valid = false;
};

/// Per-offset sups d_k = sup_j |a(j, j-k)| for k in [-2N, 2N], with an
/// exponential envelope fitted on |k| in [N/4, 3N/4] (zeros excluded).
struct DecayProfile {
  int half_width = 0;
  std::vector<double> values;  // index k + 2N
  ExpFit fit;
  double at(int k) const { return values[static_cast<std::size_t>(k + 2 * half_width)]; }
};

/// sum_k d_k v(k) over the section's offset range.
double av_norm(const LatticeMatrix& A, const Weight& v);

DecayProfile decay_profile(const LatticeMatrix& A);
/// Same, but sups restricted to rows |j| <= row_half_width (used to keep
/// finite-section boundary effects out of inverse measurements).
DecayProfile decay_profile(const LatticeMatrix& A, int row_half_width);

enum class MatrixKind { toeplitz, random_sign, diag_dominant };

/// Test instances with |a(j,k)| <= e^{-c |j-k|^s} off the diagonal.
///   toeplitz       a(j,k) = e^{-c|j-k|^s}
///   random_sign    toeplitz magnitudes with per-entry signs drawn from a
///                  hash of (seed, j, k); sections of different N nest
///   diag_dominant  random_sign off the diagonal, diagonal raised to twice
///                  the off-diagonal row sum (strict dominance, hence
///                  invertible)
LatticeMatrix generate_decay_matrix(MatrixKind kind, int half_width, double c, double s,
                                    std::uint64_t seed);

struct InverseResult {
  LatticeMatrix inverse;
  double residual;  // max |A A^{-1} - I|, required <= 1e-8 (2N+1)
};

/// Exact elimination with partial pivoting.  Throws singular_error when a
/// pivot falls below 1e-13 max|entry|, and a runtime error if the residual
/// bound fails.
InverseResult invert_section(const LatticeMatrix& A);

struct singular_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A * B with both factors zero-embedded into the common section, so the
/// product carries its full support and norms see no truncation leakage.
LatticeMatrix multiply_zero_padded(const LatticeMatrix& A, const LatticeMatrix& B);

struct WeightNorms {
  std::string weight_id;
  double norm_a = 0.0;
  double norm_inverse = 0.0;
};

struct InverseClosednessReport {
  double c1 = 0.0;          // caller's nominal input rate
  ExpFit fit_a;             // measured on A (all rows)
  ExpFit fit_inverse;       // measured on A^{-1}, central rows |j| <= N/2
  double residual = 0.0;
  std::vector<WeightNorms> norms;  // battery weights first, then v_eps
  bool c2_positive = false;
  bool c2_within = false;      // c2 <= c1 + 0.1
  bool norms_finite = false;   // every battery (admissible-weight) norm finite
  double c2() const { return fit_inverse.rate; }
};

/// Inverts A and compares decay rates and weighted norms on both sides.
/// Precondition: decay_profile(A) rate >= c1 - 0.1 (sentinel +inf passes).
InverseClosednessReport inverse_closedness_experiment(const LatticeMatrix& A, double c1,
                                                      const std::vector<Weight>& grs_battery,
                                                      const std::vector<double>& eps_list);

/// Tame default battery for the experiment report.
std::vector<Weight> default_inverse_battery();

}  // namespace grslab::matalg
