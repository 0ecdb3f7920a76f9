#pragma once

#include "lqp/rational.hpp"

#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lqp {

/// Cylinder axis interval [a, b), b may be +infinity.
struct Interval {
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  bool unbounded() const { return !(b < std::numeric_limits<double>::infinity()); }
  double length() const { return b - a; }
};

// ---------------------------------------------------------------------------
// Separable warping profiles h(t).  Only closed families: symbolic
// classification needs exact antiderivatives, not expression trees.
// ---------------------------------------------------------------------------

struct ConstantExpr { double value = 1.0; };               // h(t) = value
struct PowerExpr { double coef = 1.0; Rational exponent; } ;  // h(t) = coef * t^exponent
struct ExpExpr { double coef = 1.0; Rational rate; };      // h(t) = coef * exp(rate*t)

using SeparableExpr = std::variant<ConstantExpr, PowerExpr, ExpExpr>;

double eval(const SeparableExpr& e, double t);
std::string describe(const SeparableExpr& e);

/// coef * t^tpow * exp(rate*t), coef > 0.  Closed under products and
/// rational powers; every symbolic envelope bound lives in this family.
/// Exponents stay rational so tail tests ("rate >= 0", "tpow >= -1")
/// are decided exactly.
struct GrowthTerm {
  double coef = 1.0;
  Rational tpow;
  Rational rate;

  double eval(double t) const;
  GrowthTerm pow(const Rational& e) const;
  std::string describe() const;
};

// ---------------------------------------------------------------------------
// Warping models
// ---------------------------------------------------------------------------

/// A positive warping function h(t, x) on [a,b) x N, given either exactly
/// (Separable), as a two-sided symbolic envelope class (ExpBounded /
/// PowerBounded, which stand for *every* h between the stated bounds), or
/// as grid samples on a uniform torus grid (GridSampled).
class WarpingModel {
public:
  enum class Kind { Separable, ExpBounded, PowerBounded, GridSampled };

  static WarpingModel separable(SeparableExpr expr, Interval iv);
  // c1*e^(s1 t) <= h <= c2*e^(s2 t); needs 0 <= s1 <= s2, 0 < c1 <= c2.
  static WarpingModel exp_bounded(double c1, Rational s1, double c2, Rational s2, Interval iv);
  // c1*t^s1 <= h <= c2*t^s2 for t >= a > 0.
  static WarpingModel power_bounded(double c1, Rational s1, double c2, Rational s2, Interval iv);
  // values[i][j] = h(t_nodes[i], x_j); the x layout is irrelevant here,
  // envelopes only consume per-slice minima and maxima.
  static WarpingModel grid_sampled(std::vector<double> t_nodes,
                                   std::vector<std::vector<double>> values);

  Kind kind() const { return kind_; }
  const Interval& interval() const { return interval_; }
  bool symbolic() const { return kind_ != Kind::GridSampled; }
  bool separable_kind() const { return kind_ == Kind::Separable; }

  const SeparableExpr& expr() const;
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  const Rational& s1() const { return s1_; }
  const Rational& s2() const { return s2_; }
  const std::vector<double>& t_nodes() const { return t_nodes_; }
  const std::vector<std::vector<double>>& grid_values() const { return values_; }

  /// (min_x h, max_x h) at t.  Separable: both equal h(t).  Bounded kinds:
  /// the class-wide certified range.  GridSampled: per-slice extrema,
  /// linearly interpolated between t-samples, no extrapolation.
  std::pair<double, double> h_range(double t) const;

  /// Certified bracket for both envelopes of x -> h(t,x)^alpha, symbolic
  /// kinds only: {lower, upper} with lower(t) <= f_(alpha) <= F_(alpha)
  /// <= upper(t) throughout the model class.
  std::pair<GrowthTerm, GrowthTerm> envelope_bracket(const Rational& alpha) const;

  std::string describe() const;

private:
  WarpingModel() = default;

  Kind kind_ = Kind::Separable;
  Interval interval_;
  SeparableExpr expr_;
  double c1_ = 1.0, c2_ = 1.0;
  Rational s1_, s2_;
  std::vector<double> t_nodes_;
  std::vector<std::vector<double>> values_;
  std::vector<double> row_min_, row_max_;
};

// ---------------------------------------------------------------------------
// Envelope operations
// ---------------------------------------------------------------------------

/// alpha = n/p - k, exact.  Requires n >= 1, k >= 0, p > 1.
Rational envelope_exponent(long long n, long long k, const Rational& p);

/// f_(k,p)(t) = min_x h^alpha and F_(k,p)(t) = max_x h^alpha, evaluated
/// through the per-slice range of h: min_x h^alpha = (min_x h)^alpha for
/// alpha >= 0 and (max_x h)^alpha for alpha < 0.  alpha == 0 returns 1
/// exactly without touching h.  For bounded model classes these return the
/// class-wide outer bracket (lower_envelope <= every f, upper_envelope >=
/// every F in the class).
double lower_envelope(const WarpingModel& h, const Rational& alpha, double t);
double upper_envelope(const WarpingModel& h, const Rational& alpha, double t);

/// k == n/p as exact rationals.
bool is_middle_dimension(long long n, long long k, const Rational& p);

}  // namespace lqp
