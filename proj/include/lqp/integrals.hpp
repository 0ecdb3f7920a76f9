#pragma once

#include "lqp/warping.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lqp {

/// Knobs for the numeric tail classifier and the quadrature underneath it.
/// Every default is spelled out here and surfaced by `lqpc --show-defaults`.
struct ClassifierConfig {
  double divergence_ceiling = 1e8;  // partial beyond this + rising slope => divergent
  double epsilon_tail = 1e-8;       // increment floor that ends a convergent scan
  int max_cutoffs = 40;             // doubling cutoffs T_i = a + initial_step * 2^i
  double initial_step = 1.0;
  double panel_rel_tol = 1e-9;      // per-panel trapezoid refinement target
};

enum class IntegralStatus { Diverges, Converges, Unknown };

std::string to_string(IntegralStatus s);

/// Outcome of classifying an improper integral.  `value`/`error_bound` are
/// meaningful only for Converges; for bounded model classes they are the
/// midpoint and half-width of the certified bracket.  Diagnostics always
/// carry enough to reconstruct why: cutoff partials, a fitted growth
/// exponent where one was fitted, and free-form notes (never empty for
/// Unknown).
struct IntegralVerdict {
  IntegralStatus status = IntegralStatus::Unknown;
  double value = 0.0;
  double error_bound = 0.0;
  std::vector<std::pair<double, double>> partials;  // (cutoff, partial integral)
  std::optional<double> fitted_exponent;
  std::vector<std::string> notes;

  static IntegralVerdict diverges(std::vector<std::string> notes = {});
  static IntegralVerdict converges(double value, double err,
                                   std::vector<std::string> notes = {});
  static IntegralVerdict unknown(std::vector<std::string> notes);
};

/// p -> p/(p-1), exact.  Requires p > 1.  Involution: conjugate of the
/// conjugate is p again.
Rational conjugate_exponent(const Rational& p);

// ---------------------------------------------------------------------------
// Quadrature helpers (shared by the classifiers and the tests' oracles)
// ---------------------------------------------------------------------------

/// Composite trapezoid over [lo, hi] with doubling refinement until the
/// Richardson-accelerated value is stable to rel_tol.  Panels wider than a
/// couple of octaves should be pre-split by the caller; the tail machinery
/// below does that with a log substitution.
double integrate_panel(const std::function<double(double)>& g, double lo, double hi,
                       double rel_tol);

/// Integral over [lo, hi] split at the given breakpoints (kinks of grid
/// interpolants) and, for wide ranges, at octave boundaries.
double integrate_finite(const std::function<double(double)>& g, double lo, double hi,
                        double rel_tol, const std::vector<double>& breakpoints = {});

// ---------------------------------------------------------------------------
// Numeric tail classifier
// ---------------------------------------------------------------------------

/// Classifies integral_a^inf g, g >= 0, from partial integrals on doubling
/// cutoffs T_i = a + initial_step * 2^i.  Divergence is declared when
/// partials pass the ceiling while still rising, or when the per-octave
/// increments refuse to decay (harmonic and slower).  Convergence is
/// declared when increments die geometrically or faster than 1/i; the
/// returned value adds an extrapolated tail with the extrapolation recorded
/// as the error bound.  Everything else is Unknown, with diagnostics.
IntegralVerdict adaptive_tail_classification(const std::function<double(double)>& g,
                                             double a, const ClassifierConfig& cfg = {});

// ---------------------------------------------------------------------------
// Criterion integrals
// ---------------------------------------------------------------------------
//
// With alpha = n/p - k and beta = n/p - k + 1 (the degree-(k-1) exponent):
//
//   I  = integral_a^b  F_(k,p)^p dt                     (upper envelope)
//   J  = integral_d0^b f_(k,p)^p(tau) * (integral_a^tau F_(k,p)^p)^-1 dtau
//   It = integral_a^b  f_(k-1,p)^(-p') dt               ("I tilde")
//   A  = integral_d0^b F_(k-1,p)^p f_(k-1,p)^(-pp') (integral_a^tau f^(-p'))^-1
//                      |log integral_a^tau f^(-p')|^-p dtau
//
// Symbolic models classify exactly (closed antiderivatives, exact rational
// tail tests, certified brackets for bounded classes).  GridSampled models
// classify only over their sampled range; an unbounded b returns Unknown
// because finite samples cannot certify a tail.

IntegralVerdict classify_I(const WarpingModel& h, long long n, long long k, const Rational& p,
                           double a, double b, const ClassifierConfig& cfg = {});

/// delta0 is the outer integral's lower limit; it must lie in (a, b).  When
/// unset it defaults to a + 1 (or the midpoint of [a, b] if b <= a + 1).
/// classify_A additionally advances it past the point where the inner
/// integral crosses 1, recording the shift in the notes.
IntegralVerdict classify_J(const WarpingModel& h, long long n, long long k, const Rational& p,
                           double a, double b, std::optional<double> delta0 = {},
                           const ClassifierConfig& cfg = {});

IntegralVerdict classify_I_tilde(const WarpingModel& h, long long n, long long k,
                                 const Rational& p, double a, double b,
                                 const ClassifierConfig& cfg = {});

IntegralVerdict classify_A(const WarpingModel& h, long long n, long long k, const Rational& p,
                           double a, double b, std::optional<double> delta0 = {},
                           const ClassifierConfig& cfg = {});

// ---------------------------------------------------------------------------
// Growth-term tails (exposed for the symbolic/numeric cross-checks)
// ---------------------------------------------------------------------------

/// integral^inf of coef * t^tpow * e^(rate t) diverges iff rate > 0, or
/// rate == 0 and tpow >= -1.  Exact.
bool tail_diverges(const GrowthTerm& term);

/// Exact value of integral_lo^hi for pure terms (tpow == 0 or rate == 0);
/// hi may be +infinity when the tail converges.  Mixed terms fall back to
/// quadrature (they do not arise from the model families).
double growth_term_integral(const GrowthTerm& term, double lo, double hi);

}  // namespace lqp
