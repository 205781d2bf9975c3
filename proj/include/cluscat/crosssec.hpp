#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cluscat/geom.hpp"
#include "cluscat/pattern.hpp"
#include "cluscat/specfun.hpp"

namespace cluscat {

/// Scattering cross section (1/k0^2) integral of |g|^2 over the unit sphere.
inline double scs(const FarFieldPattern& p) {
  double sum = 0.0;
  for (size_t q = 0; q < p.samples.size(); ++q)
    sum += p.grid->weights[q] * std::norm(p.samples[q]);
  return sum / (p.k0 * p.k0);
}

/// Cluster interaction cross section: sum of far-field cross terms between
/// distinct patterns. Default path: scs(sum) - sum of scs. The double-sum
/// quadrature of the k != m terms is kept behind a verification flag.
inline double interaction_cs(const std::vector<FarFieldPattern>& ps,
                             bool via_double_sum = false) {
  if (ps.size() < 2)
    throw std::domain_error("interaction_cs: need at least 2 patterns");
  for (const auto& p : ps)
    if (p.grid != ps[0].grid)
      throw std::domain_error("interaction_cs: grid mismatch");

  if (via_double_sum) {
    const auto& grid = *ps[0].grid;
    double sum = 0.0;
    for (size_t k = 0; k < ps.size(); ++k)
      for (size_t m = 0; m < k; ++m) {
        Complex cross = 0.0;
        for (size_t q = 0; q < grid.nodes.size(); ++q)
          cross += grid.weights[q] * ps[k].samples[q] *
                   std::conj(ps[m].samples[q]);
        sum += 2.0 * cross.real();
      }
    return sum / (ps[0].k0 * ps[0].k0);
  }

  double total = scs(sum_patterns(ps));
  for (const auto& p : ps) total -= scs(p);
  return total;
}

/// Closed-form primary-interaction cross section of point scatterers:
/// 4 pi sum_{k != m} A_k conj(A_m) j0(k0 |b_k - b_m|).
inline double primary_interaction_cs_closed(const std::vector<Complex>& A,
                                            const std::vector<Vec3>& b,
                                            double k0) {
  if (A.size() != b.size() || A.size() < 2)
    throw std::domain_error("primary_interaction_cs_closed: need >= 2 scatterers");
  double sum = 0.0;
  for (size_t k = 0; k < A.size(); ++k)
    for (size_t m = 0; m < k; ++m) {
      double d = (b[k] - b[m]).norm();
      if (d == 0.0)
        throw std::domain_error(
            "primary_interaction_cs_closed: coincident positions");
      double j0 = std::sin(k0 * d) / (k0 * d);
      sum += 2.0 * std::real(A[k] * std::conj(A[m])) * j0;
    }
  return 4.0 * PI * sum;
}

/// Closed-form overall primary cross section:
/// 4 pi sum_{k,m} A_k conj(A_m) j0(k0 |b_k - b_m|).
inline double overall_primary_cs_closed(const std::vector<Complex>& A,
                                        const std::vector<Vec3>& b, double k0) {
  double sum = 0.0;
  for (const auto& a : A) sum += 4.0 * PI * std::norm(a);
  if (A.size() >= 2) sum += primary_interaction_cs_closed(A, b, k0);
  return sum;
}

struct CrossSectionReport {
  double sigma = 0.0;
  std::vector<double> sigma_j;
  double sigma_c = 0.0;       // may be negative
  double sigma_direct = 0.0;  // sum of sigma_j
  std::vector<double> ratio_j;
  double ratio_c = 0.0;
  double ratio_direct = 0.0;
};

inline CrossSectionReport cross_section_report(
    const std::vector<FarFieldPattern>& patterns, bool via_double_sum = false) {
  if (patterns.empty())
    throw std::domain_error("cross_section_report: no patterns");
  CrossSectionReport rep;
  rep.sigma = scs(sum_patterns(patterns));
  for (const auto& p : patterns) rep.sigma_j.push_back(scs(p));
  rep.sigma_direct =
      std::accumulate(rep.sigma_j.begin(), rep.sigma_j.end(), 0.0);
  rep.sigma_c = (patterns.size() >= 2)
                    ? interaction_cs(patterns, via_double_sum)
                    : 0.0;
  for (double s : rep.sigma_j) rep.ratio_j.push_back(s / rep.sigma);
  rep.ratio_c = rep.sigma_c / rep.sigma;
  rep.ratio_direct = rep.sigma_direct / rep.sigma;
  return rep;
}

/// sigma with member n removed (0-based index into the pattern sequence).
inline double scs_without(const std::vector<FarFieldPattern>& patterns,
                          size_t n) {
  std::vector<FarFieldPattern> rest;
  for (size_t j = 0; j < patterns.size(); ++j)
    if (j != n) rest.push_back(patterns[j]);
  return scs(sum_patterns(rest));
}

struct RemovalCheck {
  size_t rank = 0;          // 1-based in ascending sigma_j order
  size_t member = 0;        // original index
  double delta = 0.0;       // sigma^N - sigma_n^{N-1}
  double bound = 0.0;       // (2n-1) sigma_n + 2(N-n) sigma_N
  bool ok = false;
  double sigma_removed = 0.0;  // sigma_n^{N-1}
};

struct BoundVerdicts {
  size_t N = 0;
  double r_min = 0.0, r_max = 0.0;
  bool rc_le_frac = false;          // R_c <= (N-1)/N
  double rc_le_frac_margin = 0.0;
  bool rc_le_one_minus_n_rmin = false;
  double rc_le_one_minus_n_rmin_margin = 0.0;
  bool rc_ge_one_minus_n_rmax = false;
  double rc_ge_one_minus_n_rmax_margin = 0.0;
  bool n_bounds_applicable = false;  // (N-1)/N <= 1 - N R_min
  bool n_bounds_ok = false;          // 1/sqrt(R_max) <= N <= 1/sqrt(R_min)
  bool rmax_equality = false;        // R_max = 1/N^2 diagnostic
  bool all_rn_equality = false;      // every R_n = 1/N^2 diagnostic
  std::vector<RemovalCheck> removal;       // ordered ascending, all ranks
  std::vector<bool> ratio_gap_applicable;  // N sigma_n <= sigma_direct, per rank
  std::vector<bool> ratio_gap_ok;          // R_c - R_D <= sigma_n^{N-1}/sigma
  bool all_ok = true;  // every applicable non-diagnostic check passed

  void note(bool ok) { all_ok = all_ok && ok; }
};

/// Evaluates every cross-section-ratio inequality and the removal bounds.
/// `eq_tol` controls the equality diagnostics; the inequalities themselves
/// allow a relative slack of `tol` for roundoff.
inline BoundVerdicts check_bounds(const std::vector<FarFieldPattern>& patterns,
                                  const CrossSectionReport& rep,
                                  double tol = 1e-12, double eq_tol = 1e-9) {
  const size_t N = patterns.size();
  if (N < 2) throw std::domain_error("check_bounds: need N >= 2");
  BoundVerdicts v;
  v.N = N;
  v.r_min = *std::min_element(rep.ratio_j.begin(), rep.ratio_j.end());
  v.r_max = *std::max_element(rep.ratio_j.begin(), rep.ratio_j.end());
  const double slack = tol * std::max(1.0, std::abs(rep.ratio_c));

  double frac = (static_cast<double>(N) - 1.0) / N;
  v.rc_le_frac_margin = frac - rep.ratio_c;
  v.rc_le_frac = rep.ratio_c <= frac + slack;
  v.note(v.rc_le_frac);

  v.rc_le_one_minus_n_rmin_margin = (1.0 - N * v.r_min) - rep.ratio_c;
  v.rc_le_one_minus_n_rmin = rep.ratio_c <= 1.0 - N * v.r_min + slack;
  v.note(v.rc_le_one_minus_n_rmin);

  v.rc_ge_one_minus_n_rmax_margin = rep.ratio_c - (1.0 - N * v.r_max);
  v.rc_ge_one_minus_n_rmax = rep.ratio_c >= 1.0 - N * v.r_max - slack;
  v.note(v.rc_ge_one_minus_n_rmax);

  v.n_bounds_applicable = frac <= 1.0 - N * v.r_min + slack;
  if (v.n_bounds_applicable) {
    double n = static_cast<double>(N);
    v.n_bounds_ok = (1.0 / std::sqrt(v.r_max) <= n * (1.0 + tol)) &&
                    (n <= (1.0 + tol) / std::sqrt(v.r_min));
    v.note(v.n_bounds_ok);
  }

  double inv_n2 = 1.0 / (static_cast<double>(N) * N);
  v.rmax_equality = std::abs(v.r_max - inv_n2) <= eq_tol * inv_n2;
  v.all_rn_equality = std::all_of(
      rep.ratio_j.begin(), rep.ratio_j.end(),
      [&](double r) { return std::abs(r - inv_n2) <= eq_tol * inv_n2; });

  // ascending ordering of single-scatterer cross sections, stable
  std::vector<size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return rep.sigma_j[a] < rep.sigma_j[b];
  });
  double sigma_largest = rep.sigma_j[order.back()];

  for (size_t rank = 1; rank <= N; ++rank) {
    size_t member = order[rank - 1];
    RemovalCheck rc;
    rc.rank = rank;
    rc.member = member;
    rc.sigma_removed = scs_without(patterns, member);
    rc.delta = rep.sigma - rc.sigma_removed;
    double sn = rep.sigma_j[member];
    rc.bound = (2.0 * rank - 1.0) * sn +
               2.0 * (static_cast<double>(N) - rank) * sigma_largest;
    rc.ok = rc.delta <= rc.bound + tol * std::max(1.0, std::abs(rc.bound));
    v.note(rc.ok);
    v.removal.push_back(rc);

    bool applicable = N * sn <= rep.sigma_direct +
                                tol * std::max(1.0, rep.sigma_direct);
    v.ratio_gap_applicable.push_back(applicable);
    if (applicable) {
      double lhs = rep.ratio_c - rep.ratio_direct;
      double rhs = rc.sigma_removed / rep.sigma;
      bool ok = lhs <= rhs + slack;
      v.ratio_gap_ok.push_back(ok);
      v.note(ok);
    } else {
      v.ratio_gap_ok.push_back(true);
    }
  }
  return v;
}

}  // namespace cluscat
