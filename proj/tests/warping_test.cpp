#include "lqp/warping.hpp"

#include <cmath>
#include <stdexcept>

#include "support.hpp"

using namespace lqp;

static void test_separable_exprs() {
  const SeparableExpr c = ConstantExpr{2.5};
  CHECK(eval(c, 0.0) == 2.5);
  CHECK(eval(c, 17.0) == 2.5);

  const SeparableExpr pw = PowerExpr{3.0, Rational(1, 2)};
  CHECK_REL(eval(pw, 4.0), 6.0, 1e-15);

  const SeparableExpr ex = ExpExpr{1.0, Rational(-1)};
  CHECK(eval(ex, 0.0) == 1.0);
  CHECK_REL(eval(ex, 1.0), std::exp(-1.0), 1e-15);

  CHECK(!describe(c).empty());
  CHECK(!describe(pw).empty());
  CHECK(!describe(ex).empty());
}

static void test_growth_terms() {
  GrowthTerm g;
  g.coef = 2.0;
  g.tpow = Rational(3);
  g.rate = Rational(1, 2);
  CHECK_REL(g.eval(2.0), 2.0 * 8.0 * std::exp(1.0), 1e-15);

  const GrowthTerm sq = g.pow(Rational(2));
  CHECK(sq.tpow == Rational(6));
  CHECK(sq.rate == Rational(1));
  CHECK_REL(sq.eval(2.0), g.eval(2.0) * g.eval(2.0), 1e-14);

  const GrowthTerm inv = g.pow(Rational(-1));
  CHECK(inv.tpow == Rational(-3));
  CHECK(inv.rate == Rational(-1, 2));
  CHECK_REL(inv.eval(2.0), 1.0 / g.eval(2.0), 1e-14);
  CHECK(!g.describe().empty());
}

static void test_envelope_exponent() {
  CHECK(envelope_exponent(2, 1, Rational(2)) == Rational(0));
  CHECK(envelope_exponent(3, 1, Rational(3, 2)) == Rational(1));
  CHECK(envelope_exponent(1, 2, Rational(2)) == Rational(-3, 2));
  CHECK(envelope_exponent(6, 0, Rational(3)) == Rational(2));
  CHECK_THROWS(envelope_exponent(0, 1, Rational(2)), std::domain_error);
  CHECK_THROWS(envelope_exponent(2, -1, Rational(2)), std::domain_error);
  CHECK_THROWS(envelope_exponent(2, 1, Rational(1)), std::domain_error);
}

static void test_middle_dimension() {
  CHECK(is_middle_dimension(2, 1, Rational(2)));
  CHECK(is_middle_dimension(3, 2, Rational(3, 2)));
  CHECK(is_middle_dimension(6, 2, Rational(3)));
  CHECK(!is_middle_dimension(3, 1, Rational(2)));
  CHECK(!is_middle_dimension(2, 2, Rational(2)));
}

static void test_separable_model() {
  const auto m = WarpingModel::separable(ExpExpr{2.0, Rational(1)}, Interval{0.0, 10.0});
  CHECK(m.kind() == WarpingModel::Kind::Separable);
  CHECK(m.symbolic());
  CHECK(m.separable_kind());

  // h does not depend on x, so the slice range collapses.
  const auto [lo, hi] = m.h_range(1.0);
  CHECK_REL(lo, 2.0 * std::exp(1.0), 1e-15);
  CHECK(lo == hi);

  const Rational alpha(3, 2);
  CHECK_REL(lower_envelope(m, alpha, 1.0), std::pow(2.0 * std::exp(1.0), 1.5), 1e-14);
  CHECK(lower_envelope(m, alpha, 1.0) == upper_envelope(m, alpha, 1.0));

  // alpha = 0 is exactly 1, no evaluation of h involved.
  CHECK(lower_envelope(m, Rational(0), 3.7) == 1.0);
  CHECK(upper_envelope(m, Rational(0), 3.7) == 1.0);

  CHECK(!m.describe().empty());
  CHECK_THROWS(WarpingModel::separable(ConstantExpr{-1.0}, Interval{0.0, 1.0}),
               std::invalid_argument);
  CHECK_THROWS(WarpingModel::separable(PowerExpr{1.0, Rational(2)}, Interval{0.0, 1.0}),
               std::invalid_argument);  // power profiles need a > 0
}

static void test_exp_bounded_model() {
  // 2 e^t <= h <= 3 e^(2t)
  const auto m =
      WarpingModel::exp_bounded(2.0, Rational(1), 3.0, Rational(2), Interval{0.0, 100.0});
  const auto [lo, hi] = m.h_range(1.0);
  CHECK_REL(lo, 2.0 * std::exp(1.0), 1e-15);
  CHECK_REL(hi, 3.0 * std::exp(2.0), 1e-15);

  // Positive exponent keeps the bracket orientation.
  CHECK_REL(lower_envelope(m, Rational(1), 1.0), 2.0 * std::exp(1.0), 1e-15);
  CHECK_REL(upper_envelope(m, Rational(1), 1.0), 3.0 * std::exp(2.0), 1e-15);

  // Negative exponent swaps which bound is binding.
  CHECK_REL(lower_envelope(m, Rational(-1), 1.0), 1.0 / (3.0 * std::exp(2.0)), 1e-15);
  CHECK_REL(upper_envelope(m, Rational(-1), 1.0), 1.0 / (2.0 * std::exp(1.0)), 1e-15);

  // The symbolic bracket agrees with the pointwise envelopes.
  const auto [lo_term, hi_term] = m.envelope_bracket(Rational(-1));
  for (double t : {0.0, 0.5, 2.0}) {
    CHECK_REL(lo_term.eval(t), lower_envelope(m, Rational(-1), t), 1e-14);
    CHECK_REL(hi_term.eval(t), upper_envelope(m, Rational(-1), t), 1e-14);
  }

  CHECK_THROWS(WarpingModel::exp_bounded(3.0, Rational(1), 2.0, Rational(2), Interval{}),
               std::invalid_argument);  // c1 > c2
  CHECK_THROWS(WarpingModel::exp_bounded(1.0, Rational(2), 2.0, Rational(1), Interval{}),
               std::invalid_argument);  // s1 > s2
  CHECK_THROWS(WarpingModel::exp_bounded(1.0, Rational(-1), 2.0, Rational(1), Interval{}),
               std::invalid_argument);  // s1 < 0
}

static void test_power_bounded_model() {
  // t <= h <= 2 t^2 on [1, inf)
  const auto m = WarpingModel::power_bounded(
      1.0, Rational(1), 2.0, Rational(2),
      Interval{1.0, std::numeric_limits<double>::infinity()});
  CHECK(m.interval().unbounded());
  const auto [lo, hi] = m.h_range(3.0);
  CHECK_REL(lo, 3.0, 1e-15);
  CHECK_REL(hi, 18.0, 1e-15);
  CHECK_REL(lower_envelope(m, Rational(2), 3.0), 9.0, 1e-14);
  CHECK_REL(upper_envelope(m, Rational(2), 3.0), 324.0, 1e-14);
  CHECK_REL(lower_envelope(m, Rational(-1, 2), 4.0), 1.0 / std::sqrt(32.0), 1e-14);
  CHECK_REL(upper_envelope(m, Rational(-1, 2), 4.0), 0.5, 1e-14);

  CHECK_THROWS(
      WarpingModel::power_bounded(1.0, Rational(1), 2.0, Rational(2), Interval{0.0, 5.0}),
      std::invalid_argument);  // needs a > 0
}

static void test_grid_sampled_model() {
  const auto m = WarpingModel::grid_sampled({0.0, 1.0, 2.0}, {{1.0, 2.0}, {3.0, 1.0}, {5.0, 4.0}});
  CHECK(m.kind() == WarpingModel::Kind::GridSampled);
  CHECK(!m.symbolic());
  CHECK(m.interval().a == 0.0);
  CHECK(m.interval().b == 2.0);

  // Node hits return the row extrema.
  {
    const auto [lo, hi] = m.h_range(1.0);
    CHECK(lo == 1.0);
    CHECK(hi == 3.0);
  }
  // Between nodes the per-slice extrema interpolate linearly.
  {
    const auto [lo, hi] = m.h_range(0.5);
    CHECK_CLOSE(lo, 1.0, 1e-15);
    CHECK_CLOSE(hi, 2.5, 1e-15);
  }
  {
    const auto [lo, hi] = m.h_range(1.5);
    CHECK_CLOSE(lo, 2.5, 1e-15);
    CHECK_CLOSE(hi, 4.0, 1e-15);
  }

  // Envelopes follow the h-range with the exponent applied outside.
  CHECK_CLOSE(lower_envelope(m, Rational(2), 1.0), 1.0, 1e-15);
  CHECK_CLOSE(upper_envelope(m, Rational(2), 1.0), 9.0, 1e-15);
  CHECK_CLOSE(lower_envelope(m, Rational(-1), 1.0), 1.0 / 3.0, 1e-15);
  CHECK_CLOSE(upper_envelope(m, Rational(-1), 1.0), 1.0, 1e-15);

  // No extrapolation outside the sampled range.
  CHECK_THROWS(m.h_range(-0.1), std::domain_error);
  CHECK_THROWS(m.h_range(2.1), std::domain_error);
  CHECK_THROWS(m.envelope_bracket(Rational(1)), std::logic_error);

  CHECK_THROWS(WarpingModel::grid_sampled({0.0}, {{1.0}}), std::invalid_argument);
  CHECK_THROWS(WarpingModel::grid_sampled({0.0, 0.0}, {{1.0}, {1.0}}), std::invalid_argument);
  CHECK_THROWS(WarpingModel::grid_sampled({0.0, 1.0}, {{1.0}, {-1.0}}), std::invalid_argument);
  CHECK_THROWS(WarpingModel::grid_sampled({0.0, 1.0}, {{1.0, 2.0}, {1.0}}),
               std::invalid_argument);
}

int main() {
  test_separable_exprs();
  test_growth_terms();
  test_envelope_exponent();
  test_middle_dimension();
  test_separable_model();
  test_exp_bounded_model();
  test_power_bounded_model();
  test_grid_sampled_model();
  return testlib::summary("warping_test");
}
