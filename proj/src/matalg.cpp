#include "grslab/matalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grslab::matalg {

LatticeMatrix::LatticeMatrix(int half_width) : half_width_(half_width) {
  if (half_width < 1 || half_width > kMaxHalfWidth)
    throw std::invalid_argument("matrix half-width out of range");
  std::size_t n = 2 * static_cast<std::size_t>(half_width) + 1;
  data_.assign(n * n, 0.0);
}

LatticeMatrix LatticeMatrix::identity(int half_width) {
  LatticeMatrix m(half_width);
  for (int j = -half_width; j <= half_width; ++j) m.at(j, j) = 1.0;
  return m;
}

double& LatticeMatrix::at(int j, int k) {
  if (std::abs(j) > half_width_ || std::abs(k) > half_width_)
    throw std::out_of_range("matrix index outside the section");
  std::size_t n = 2 * static_cast<std::size_t>(half_width_) + 1;
  return data_[static_cast<std::size_t>(j + half_width_) * n + (k + half_width_)];
}

double LatticeMatrix::at(int j, int k) const {
  return const_cast<LatticeMatrix*>(this)->at(j, k);
}

double av_norm(const LatticeMatrix& A, const Weight& v) {
  if (v.dim() != 1) throw std::invalid_argument("av_norm needs a dim-1 weight");
  DecayProfile prof = decay_profile(A);
  double sum = 0.0;
  for (int k = -2 * A.half_width(); k <= 2 * A.half_width(); ++k) {
    double x = k;
    sum += prof.at(k) * v.eval(std::span<const double>(&x, 1));
  }
  return sum;
}

namespace {

ExpFit fit_band(const std::vector<double>& d, int two_n, int band_lo, int band_hi) {
  ExpFit fit;
  fit.band_lo = band_lo;
  fit.band_hi = band_hi;
  std::vector<double> xs, ys;
  for (int k = -two_n; k <= two_n; ++k) {
    int ak = std::abs(k);
    if (ak < band_lo || ak > band_hi) continue;
    double v = d[static_cast<std::size_t>(k + two_n)];
    if (v > 0.0) {
      xs.push_back(ak);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 2) return fit;  // rate stays at the +inf sentinel

  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return fit;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;

  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double fit_y = intercept + slope * xs[i];
    ss_res += (ys[i] - fit_y) * (ys[i] - fit_y);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.rate = -slope;
  fit.amplitude = std::exp(intercept);
  fit.r_squared = ss_tot > 1e-30 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.valid = true;
  return fit;
}

}  // namespace

DecayProfile decay_profile(const LatticeMatrix& A) {
  return decay_profile(A, A.half_width());
}

DecayProfile decay_profile(const LatticeMatrix& A, int row_half_width) {
  const int N = A.half_width();
  if (row_half_width < 0 || row_half_width > N)
    throw std::invalid_argument("row band must lie inside the section");
  DecayProfile prof;
  prof.half_width = N;
  prof.values.assign(4 * static_cast<std::size_t>(N) + 1, 0.0);
  for (int k = -2 * N; k <= 2 * N; ++k) {
    int j_lo = std::max(-row_half_width, k - N);
    int j_hi = std::min(row_half_width, k + N);
    double d = 0.0;
    for (int j = j_lo; j <= j_hi; ++j) d = std::max(d, std::abs(A.at(j, j - k)));
    prof.values[static_cast<std::size_t>(k + 2 * N)] = d;
  }
  int band_lo = static_cast<int>(std::lround(N / 4.0));
  int band_hi = static_cast<int>(std::lround(3.0 * N / 4.0));
  prof.fit = fit_band(prof.values, 2 * N, std::max(1, band_lo), band_hi);
  return prof;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Entry sign as a pure function of (seed, j, k): sections of different
/// half-widths generated from one seed agree where they overlap.
double entry_sign(std::uint64_t seed, int j, int k) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(j)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k)));
  return (h & 1ull) ? 1.0 : -1.0;
}

}  // namespace

LatticeMatrix generate_decay_matrix(MatrixKind kind, int half_width, double c, double s,
                                    std::uint64_t seed) {
  if (half_width > kMaxHalfWidth) throw std::invalid_argument("half-width over cap");
  if (!(c > 0.0)) throw std::invalid_argument("decay rate c must be > 0");
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("decay exponent s must be in (0, 1]");
  const int N = half_width;
  auto envelope = [&](int offset) {
    return std::exp(-c * std::pow(std::abs(offset), s));
  };

  LatticeMatrix m(N);
  for (int j = -N; j <= N; ++j)
    for (int k = -N; k <= N; ++k) {
      double mag = envelope(j - k);
      switch (kind) {
        case MatrixKind::toeplitz:
          m.at(j, k) = mag;
          break;
        case MatrixKind::random_sign:
          m.at(j, k) = entry_sign(seed, j, k) * mag;
          break;
        case MatrixKind::diag_dominant:
          if (j != k) m.at(j, k) = entry_sign(seed, j, k) * mag;
          break;
      }
    }
  if (kind == MatrixKind::diag_dominant) {
    for (int j = -N; j <= N; ++j) {
      double row = 0.0;
      for (int k = -N; k <= N; ++k)
        if (k != j) row += std::abs(m.at(j, k));
      m.at(j, j) = 2.0 * row;
    }
  }
  return m;
}

InverseResult invert_section(const LatticeMatrix& A) {
  const int n = A.n();
  std::vector<double> lu(A.data().begin(), A.data().end());
  auto e = [&](int i, int j) -> double& { return lu[static_cast<std::size_t>(i) * n + j]; };

  double amax = 0.0;
  for (double v : lu) amax = std::max(amax, std::abs(v));
  const double pivot_floor = 1e-13 * amax;
  if (amax == 0.0) throw singular_error("matrix section is zero");

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(e(col, col));
    for (int i = col + 1; i < n; ++i) {
      double v = std::abs(e(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < pivot_floor) throw singular_error("matrix section is numerically singular");
    if (piv != col) {
      std::swap_ranges(lu.begin() + static_cast<std::size_t>(piv) * n,
                       lu.begin() + static_cast<std::size_t>(piv + 1) * n,
                       lu.begin() + static_cast<std::size_t>(col) * n);
      std::swap(perm[piv], perm[col]);
    }
    double inv_p = 1.0 / e(col, col);
    for (int i = col + 1; i < n; ++i) {
      double m = e(i, col) * inv_p;
      e(i, col) = m;
      if (m == 0.0) continue;
      double* ri = &e(i, col + 1);
      const double* rc = &e(col, col + 1);
      for (int j = 0; j < n - col - 1; ++j) ri[j] -= m * rc[j];
    }
  }

  // Column solves against the permuted unit vectors.
  LatticeMatrix inv(A.half_width());
  std::vector<double> y(n);
  for (int col = 0; col < n; ++col) {
    int start = 0;
    while (start < n && perm[start] != col) ++start;
    std::fill(y.begin(), y.begin() + start, 0.0);
    for (int i = start; i < n; ++i) {
      double acc = perm[i] == col ? 1.0 : 0.0;
      const double* row = &lu[static_cast<std::size_t>(i) * n];
      for (int k = start; k < i; ++k) acc -= row[k] * y[k];
      y[i] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
      double acc = y[i];
      const double* row = &lu[static_cast<std::size_t>(i) * n];
      for (int k = i + 1; k < n; ++k) acc -= row[k] * y[k];
      y[i] = acc / row[i];
    }
    double* out = inv.data().data();
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i) * n + col] = y[i];
  }

  // Residual gate on max |A X - I|.
  const double* a = A.data().data();
  const double* x = inv.data().data();
  double residual = 0.0;
  std::vector<double> row_acc(n);
  for (int i = 0; i < n; ++i) {
    std::fill(row_acc.begin(), row_acc.end(), 0.0);
    const double* arow = &a[static_cast<std::size_t>(i) * n];
    for (int k = 0; k < n; ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* xrow = &x[static_cast<std::size_t>(k) * n];
      for (int j = 0; j < n; ++j) row_acc[j] += aik * xrow[j];
    }
    row_acc[i] -= 1.0;
    for (double v : row_acc) residual = std::max(residual, std::abs(v));
  }
  if (residual > 1e-8 * n)
    throw std::runtime_error("inverse residual exceeds the section bound");
  return {std::move(inv), residual};
}

LatticeMatrix multiply_zero_padded(const LatticeMatrix& A, const LatticeMatrix& B) {
  const int N = std::max(A.half_width(), B.half_width());
  LatticeMatrix out(N);
  const int n = out.n();
  auto padded = [N, n](const LatticeMatrix& m) {
    std::vector<double> p(static_cast<std::size_t>(n) * n, 0.0);
    int hw = m.half_width();
    for (int j = -hw; j <= hw; ++j)
      for (int k = -hw; k <= hw; ++k)
        p[static_cast<std::size_t>(j + N) * n + (k + N)] = m.at(j, k);
    return p;
  };
  std::vector<double> a = padded(A), b = padded(B);
  double* c = out.data().data();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double aik = a[static_cast<std::size_t>(i) * n + k];
      if (aik == 0.0) continue;
      const double* brow = &b[static_cast<std::size_t>(k) * n];
      double* crow = &c[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  return out;
}

InverseClosednessReport inverse_closedness_experiment(const LatticeMatrix& A, double c1,
                                                      const std::vector<Weight>& grs_battery,
                                                      const std::vector<double>& eps_list) {
  InverseClosednessReport rep;
  rep.c1 = c1;
  rep.fit_a = decay_profile(A).fit;
  if (rep.fit_a.valid && rep.fit_a.rate < c1 - 0.1)
    throw std::invalid_argument("input decay rate is below the claimed c1");

  InverseResult inv = invert_section(A);
  rep.residual = inv.residual;
  rep.fit_inverse = decay_profile(inv.inverse, A.half_width() / 2).fit;

  rep.norms_finite = true;
  for (const auto& w : grs_battery) {
    WeightNorms row;
    row.weight_id = w.id();
    row.norm_a = av_norm(A, w);
    row.norm_inverse = av_norm(inv.inverse, w);
    if (!std::isfinite(row.norm_a) || !std::isfinite(row.norm_inverse))
      rep.norms_finite = false;
    rep.norms.push_back(std::move(row));
  }
  for (double eps : eps_list) {
    Weight v_eps = Weight::subexp(eps, 1.0);
    WeightNorms row;
    row.weight_id = v_eps.id();
    row.norm_a = av_norm(A, v_eps);
    row.norm_inverse = av_norm(inv.inverse, v_eps);
    rep.norms.push_back(std::move(row));
  }

  rep.c2_positive = rep.fit_inverse.rate > 0.0;
  rep.c2_within = rep.fit_inverse.valid && rep.fit_inverse.rate <= c1 + 0.1;
  return rep;
}

std::vector<Weight> default_inverse_battery() {
  return {Weight::constant(), Weight::polynomial(1.0), Weight::polynomial(3.0),
          Weight::subexp(1.0, 0.5)};
}

}  // namespace grslab::matalg
