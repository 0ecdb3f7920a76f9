#include "lqp/grid_forms.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "support.hpp"

using namespace lqp;

namespace {

const double kPi = std::acos(-1.0);

std::shared_ptr<const DiscreteCylinder> make(double a, double T, long long Nt, long long n,
                                             long long Nx, double h_value = 1.0) {
  return std::make_shared<const DiscreteCylinder>(
      DiscreteCylinder::constant(a, T, Nt, n, Nx, h_value));
}

std::shared_ptr<const DiscreteCylinder> make_h(
    double a, double T, long long Nt, long long n, long long Nx,
    const std::function<double(double, const std::vector<double>&)>& h) {
  return std::make_shared<const DiscreteCylinder>(DiscreteCylinder::build(a, T, Nt, n, Nx, h));
}

double max_abs(const DiscreteForm& f) {
  double m = 0.0;
  for (const auto& arr : f.A_components)
    for (double v : arr) m = std::max(m, std::abs(v));
  for (const auto& arr : f.B_components)
    for (double v : arr) m = std::max(m, std::abs(v));
  return m;
}

bool identical(const DiscreteForm& f, const DiscreteForm& g) {
  return f.A_components == g.A_components && f.B_components == g.B_components;
}

}  // namespace

static void test_increasing_tuples() {
  const auto t32 = increasing_tuples(3, 2);
  CHECK(t32.size() == 3);
  CHECK((t32[0] == std::vector<int>{1, 2}));
  CHECK((t32[1] == std::vector<int>{1, 3}));
  CHECK((t32[2] == std::vector<int>{2, 3}));
  CHECK(increasing_tuples(4, 2).size() == 6);
  CHECK(increasing_tuples(5, 0).size() == 1);
  CHECK(increasing_tuples(5, 0)[0].empty());
  CHECK(increasing_tuples(2, 3).empty());
  CHECK(increasing_tuples(2, -1).empty());
  CHECK((increasing_tuples(4, 4)[0] == std::vector<int>{1, 2, 3, 4}));
}

static void test_cylinder_accessors() {
  const auto c = make(0.0, 2.0, 5, 2, 8);
  CHECK_CLOSE(c->dt(), 0.5, 1e-15);
  CHECK_CLOSE(c->dx(), 2.0 * kPi / 8.0, 1e-15);
  CHECK_CLOSE(c->t_node(2), 1.0, 1e-15);
  CHECK(c->x_total() == 64);
  CHECK_REL(c->cell_volume(), c->dx() * c->dx(), 1e-15);
  CHECK_REL(c->torus_volume(), 4.0 * kPi * kPi, 1e-15);

  CHECK(c->t_index(c->t_node(3)) == 3);
  CHECK(c->t_index(0.5 + 1e-12) == 1);
  CHECK_THROWS(c->t_index(0.7), std::invalid_argument);

  // Axis 0 is slowest in the flattened x index; cells sample at centers.
  const auto xp = c->x_point(2 * 8 + 5);
  CHECK_CLOSE(xp[0], 2.5 * c->dx(), 1e-15);
  CHECK_CLOSE(xp[1], 5.5 * c->dx(), 1e-15);
  CHECK_CLOSE(c->x_point(0)[0], 0.5 * c->dx(), 1e-15);

  // Envelopes agree with a direct scan; the exponent applies pointwise.
  const auto cv = make_h(0.0, 1.0, 4, 1, 16, [](double t, const std::vector<double>& x) {
    return 1.0 + 0.3 * std::sin(x[0]) + 0.1 * t;
  });
  for (const Rational& alpha : {Rational(3, 2), Rational(-2)}) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (long long x = 0; x < cv->x_total(); ++x) {
      const double v = pow_rational(cv->h(2, x), alpha);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(cv->envelope_min(2, alpha) == lo);
    CHECK(cv->envelope_max(2, alpha) == hi);
  }
  // alpha = 0 collapses both envelopes to exactly 1, whatever h does.
  CHECK(cv->envelope_min(1, Rational(0)) == 1.0);
  CHECK(cv->envelope_max(1, Rational(0)) == 1.0);

  // validate() rejects bad shapes and nonpositive samples.
  DiscreteCylinder bad = *c;
  bad.Nt = 1;
  CHECK_THROWS(bad.validate(), std::invalid_argument);
  bad = *c;
  bad.Nx = 2;
  CHECK_THROWS(bad.validate(), std::invalid_argument);
  bad = *c;
  bad.h_samples.pop_back();
  CHECK_THROWS(bad.validate(), std::invalid_argument);
  bad = *c;
  bad.h_samples[7] = 0.0;
  CHECK_THROWS(bad.validate(), std::invalid_argument);
  CHECK_THROWS(DiscreteCylinder::build(0.0, 1.0, 4, 1, 8,
                                       [](double, const std::vector<double>&) { return -1.0; }),
               std::invalid_argument);
  CHECK_THROWS(DiscreteCylinder::constant(1.0, 1.0, 4, 1, 8), std::invalid_argument);
}

static void test_random_forms_and_operators() {
  const auto c = make(0.0, 1.0, 6, 2, 6);
  const DiscreteForm f = random_trig_form(c, 1, 42);
  const DiscreteForm f2 = random_trig_form(c, 1, 42);
  const DiscreteForm g = random_trig_form(c, 1, 43);
  CHECK(identical(f, f2));
  CHECK(!identical(f, g));
  CHECK(f.A_components.size() == 2);
  CHECK(f.B_components.size() == 1);
  CHECK(max_abs(f) > 0.0);

  // x + x and 2 * x round identically, so these match bit for bit.
  CHECK(identical(f + f, 2.0 * f));
  CHECK(identical(f - f, DiscreteForm::zero(c, 1)));
  CHECK_THROWS(f + random_trig_form(c, 2, 1), std::invalid_argument);
  CHECK_THROWS(f + random_trig_form(make(0.0, 1.0, 6, 2, 6), 1, 1), std::invalid_argument);

  // d is linear up to rounding noise.
  const DiscreteForm lin = exterior_derivative(f + g) -
                           (exterior_derivative(f) + exterior_derivative(g));
  CHECK(max_abs(lin) < 1e-12 * (1.0 + max_abs(f) + max_abs(g)));
}

static void test_dd_zero() {
  const auto c = make_h(0.0, 1.0, 24, 2, 12, [](double t, const std::vector<double>& x) {
    return 1.0 + 0.2 * std::cos(x[0]) + 0.1 * t;
  });
  for (long long degree : {0LL, 1LL}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const DiscreteForm f = random_trig_form(c, degree, seed);
      const DiscreteForm ddf = exterior_derivative(exterior_derivative(f));
      CHECK(max_abs(ddf) <= 1e-10 * (1.0 + max_abs(f)));
    }
  }
}

static void test_lp_norms() {
  // Constant dt-part, flat h: the integral is (T - a) |N| |c|^p exactly.
  {
    const auto c = make(0.0, 2.0, 5, 2, 8);
    const DiscreteForm f = form_from(
        c, 1, nullptr,
        [](long long, double, const std::vector<double>&) { return 0.75; });
    const double vol = 2.0 * c->torus_volume();
    CHECK_REL(lp_norm(f, Rational(2)), 0.75 * std::sqrt(vol), 1e-13);
    CHECK_REL(lp_norm(f, Rational(3, 2)), 0.75 * std::pow(vol, 2.0 / 3.0), 1e-13);
  }
  // h = 2: the B-slot of a 1-form carries weight h^{2(n/p - 1 + 1)} = h^2.
  {
    const auto c = make(0.0, 2.0, 5, 2, 8, 2.0);
    const DiscreteForm f = form_from(
        c, 1, nullptr, [](long long, double, const std::vector<double>&) { return 1.0; });
    CHECK_REL(lp_norm(f, Rational(2)), 2.0 * std::sqrt(2.0 * c->torus_volume()), 1e-13);
  }
  // ...while the A-slot of a 1-form carries h^{2(n/p - 1)} = h^0 = 1.
  {
    const auto c = make(0.0, 2.0, 5, 2, 8, 2.0);
    const DiscreteForm f = form_from(
        c, 1,
        [](long long ci, double, const std::vector<double>&) { return ci == 0 ? 3.0 : 4.0; },
        nullptr);
    CHECK_REL(lp_norm(f, Rational(2)), 5.0 * std::sqrt(2.0 * c->torus_volume()), 1e-13);
  }
  // Homogeneity.
  {
    const auto c = make_h(0.0, 1.0, 8, 1, 12, [](double t, const std::vector<double>& x) {
      return std::exp(0.3 * t) * (1.0 + 0.2 * std::sin(x[0]));
    });
    const DiscreteForm f = random_trig_form(c, 1, 9);
    CHECK_REL(lp_norm(-2.5 * f, Rational(3, 2)), 2.5 * lp_norm(f, Rational(3, 2)), 1e-12);
    CHECK(lp_norm(DiscreteForm::zero(c, 1), Rational(2)) == 0.0);
    CHECK_THROWS(lp_norm(f, Rational(1, 2)), std::domain_error);
  }
  // The horizontal route agrees with the split-modulus route on dt-free
  // forms; it refuses anything with a dt-part.
  {
    const auto c = make_h(0.0, 1.0, 8, 2, 8, [](double t, const std::vector<double>& x) {
      return 1.0 + 0.25 * std::sin(x[0]) + 0.1 * t * std::cos(x[1]);
    });
    DiscreteForm f = random_trig_form(c, 1, 11);
    for (auto& arr : f.B_components) arr.assign(arr.size(), 0.0);
    for (const Rational& p : {Rational(2), Rational(3), Rational(3, 2)})
      CHECK_REL(lp_norm_horizontal(f, p), lp_norm(f, p), 1e-12);
    CHECK_THROWS(lp_norm_horizontal(random_trig_form(c, 1, 12), Rational(2)),
                 std::invalid_argument);
  }
}

static void test_pointwise_modulus() {
  const auto c = make(0.0, 1.0, 4, 2, 6, 2.0);
  const DiscreteForm f = form_from(
      c, 1,
      [](long long ci, double, const std::vector<double>&) { return ci == 0 ? 3.0 : 4.0; },
      [](long long, double, const std::vector<double>&) { return 2.0; });
  // h^{-2k}|A|^2 + h^{-2(k-1)}|B|^2 with h = 2, k = 1: 25/4 + 4.
  CHECK_REL(pointwise_modulus(f, 1, 3), std::sqrt(25.0 / 4.0 + 4.0), 1e-14);
  CHECK_THROWS(pointwise_modulus(f, 4, 0), std::invalid_argument);
  CHECK_THROWS(pointwise_modulus(f, 0, 36), std::invalid_argument);
}

static void test_exterior_derivative() {
  // f = sin(x): centered differences return cos(x) sin(dx)/dx exactly.
  {
    const auto c = make(0.0, 1.0, 5, 1, 16);
    const DiscreteForm f = form_from(
        c, 0, [](long long, double, const std::vector<double>& x) { return std::sin(x[0]); },
        nullptr);
    const DiscreteForm df = exterior_derivative(f);
    const double factor = std::sin(c->dx()) / c->dx();
    for (long long ti = 0; ti < c->Nt; ++ti)
      for (long long x = 0; x < c->x_total(); ++x) {
        const double want = std::cos(c->x_point(x)[0]) * factor;
        CHECK_CLOSE(df.A_components[0][ti * c->x_total() + x], want, 1e-13);
        CHECK_CLOSE(df.B_components[0][ti * c->x_total() + x], 0.0, 1e-15);
      }
  }
  // f = t^2: both the centered stencil and the one-sided second-order end
  // stencils differentiate quadratics exactly.
  {
    const auto c = make(0.0, 2.0, 9, 1, 4);
    const DiscreteForm f = form_from(
        c, 0, [](long long, double t, const std::vector<double>&) { return t * t; }, nullptr);
    const DiscreteForm df = exterior_derivative(f);
    for (long long ti = 0; ti < c->Nt; ++ti)
      for (long long x = 0; x < c->x_total(); ++x)
        CHECK_CLOSE(df.B_components[0][ti * c->x_total() + x], 2.0 * c->t_node(ti), 1e-12);
  }
  // Degree gate and the 3-node minimum.
  {
    const auto c = make(0.0, 1.0, 5, 1, 4);
    CHECK_THROWS(exterior_derivative(random_trig_form(c, 2, 1)), std::invalid_argument);
    const auto c2 = make(0.0, 1.0, 2, 1, 4);
    CHECK_THROWS(exterior_derivative(DiscreteForm::zero(c2, 0)), std::invalid_argument);
  }
  // base_derivative matches the horizontal part of d on a t-constant form.
  {
    const auto c = make(0.0, 1.0, 5, 2, 8);
    BaseForm b = BaseForm::zero(c, 0);
    for (long long x = 0; x < c->x_total(); ++x)
      b.components[0][static_cast<size_t>(x)] = std::sin(c->x_point(x)[0]);
    const BaseForm db = base_derivative(b);
    const DiscreteForm dpull = exterior_derivative(base_pullback(b));
    for (size_t ci = 0; ci < db.components.size(); ++ci)
      for (long long x = 0; x < c->x_total(); ++x)
        CHECK_CLOSE(db.components[ci][static_cast<size_t>(x)],
                    dpull.A_components[ci][static_cast<size_t>(x)], 1e-14);
  }
}

static void test_pullbacks_and_fiber_integral() {
  const auto c = make(0.0, 2.0, 5, 2, 6);
  // Round trip through a slice is the identity on t-constant dt-free forms.
  {
    const DiscreteForm f = form_from(
        c, 1,
        [](long long ci, double, const std::vector<double>& x) {
          return std::cos(x[0]) + 0.5 * static_cast<double>(ci);
        },
        nullptr);
    const DiscreteForm back = base_pullback(slice_pullback(f, 1.0));
    CHECK(identical(f, back));
    CHECK_THROWS(slice_pullback(f, 0.3), std::invalid_argument);
  }
  // Trapezoid integrates linear dt-parts exactly, including partial cells.
  {
    const DiscreteForm f = form_from(
        c, 1, nullptr, [](long long, double t, const std::vector<double>&) { return t; });
    const BaseForm full = fiber_integral(f, 0.0, 2.0);
    const BaseForm part = fiber_integral(f, 0.0, 0.75);
    for (long long x = 0; x < c->x_total(); ++x) {
      CHECK_CLOSE(full.components[0][static_cast<size_t>(x)], 2.0, 1e-14);
      CHECK_CLOSE(part.components[0][static_cast<size_t>(x)], 0.75 * 0.75 / 2.0, 1e-14);
    }
    // Antisymmetry in the endpoints, computed as an exact negation.
    const BaseForm fwd = fiber_integral(f, 0.5, 1.5);
    const BaseForm rev = fiber_integral(f, 1.5, 0.5);
    for (long long x = 0; x < c->x_total(); ++x)
      CHECK(fwd.components[0][static_cast<size_t>(x)] ==
            -rev.components[0][static_cast<size_t>(x)]);
  }
  // dt-free forms integrate to zero; gates throw.
  {
    const DiscreteForm f = form_from(
        c, 1, [](long long, double, const std::vector<double>&) { return 1.0; }, nullptr);
    const BaseForm z = fiber_integral(f, 0.0, 2.0);
    for (long long x = 0; x < c->x_total(); ++x)
      CHECK(z.components[0][static_cast<size_t>(x)] == 0.0);
    CHECK_THROWS(fiber_integral(DiscreteForm::zero(c, 0), 0.0, 1.0), std::domain_error);
    CHECK_THROWS(fiber_integral(f, -0.5, 1.0), std::invalid_argument);
    CHECK_THROWS(fiber_integral(f, 0.0, 2.5), std::invalid_argument);
  }
}

static void test_homotopy_checks() {
  const auto c = make_h(0.0, 1.0, 32, 1, 32, [](double t, const std::vector<double>& x) {
    return 1.0 + 0.25 * std::sin(x[0]) + 0.1 * t;
  });
  for (long long degree : {1LL, 2LL}) {
    const DiscreteForm f = random_trig_form(c, degree, 5);
    if (degree <= c->n) {
      const double r = check_homotopy_base(f, 0.0, 1.0);
      CHECK(r < 0.05);
    }
    const double rc = check_homotopy_cylinder(f, 0.0);
    CHECK(rc < 0.05);
  }
  // Degree 0: the identity reduces to omega - pi^* i_c^* omega plus S_c d.
  const DiscreteForm f0 = random_trig_form(c, 0, 6);
  CHECK(check_homotopy_cylinder(f0, 0.0) < 0.05);
  // A t-constant dt-free form is reproduced by the pullback term alone, so
  // the residual collapses to quadrature noise.
  const DiscreteForm flat = form_from(
      c, 1, [](long long, double, const std::vector<double>& x) { return std::sin(x[0]); },
      nullptr);
  CHECK(check_homotopy_cylinder(flat, 0.0) < 1e-10);
}

static void test_lemma_inequality() {
  const auto c = make_h(0.0, 1.0, 48, 1, 32, [](double t, const std::vector<double>& x) {
    return 1.0 + 0.25 * std::sin(x[0]) + 0.1 * t;
  });
  const std::vector<std::pair<Rational, Rational>> pq = {
      {Rational(2), Rational(2)}, {Rational(3), Rational(2)}, {Rational(2), Rational(3, 2)}};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (long long degree : {1LL, 2LL}) {
      const DiscreteForm f = random_trig_form(c, degree, seed);
      for (const auto& [p, q] : pq) {
        const LemmaCheck r = check_lemma_ineq(f, 0.0, 1.0, p, q);
        CHECK(r.holds);
        CHECK(r.lhs <= r.rhs * 1.02 + 1e-30);
      }
    }
  }
  // Swapped endpoints still satisfy the bound (the integral is symmetric in
  // absolute value).
  const DiscreteForm f = random_trig_form(c, 1, 3);
  CHECK(check_lemma_ineq(f, 1.0, 0.0, Rational(2), Rational(2)).holds);
  CHECK_THROWS(check_lemma_ineq(DiscreteForm::zero(c, 0), 0.0, 1.0, Rational(2), Rational(2)),
               std::domain_error);
  CHECK_THROWS(check_lemma_ineq(f, 0.0, 1.0, Rational(2), Rational(3)), std::domain_error);
}

static void test_asymp_sequence() {
  const auto c = make(0.0, 4.0, 9, 1, 8);
  // Constant slice norms with constant g: only the first node sets a record.
  {
    const DiscreteForm f = form_from(
        c, 1, [](long long, double, const std::vector<double>&) { return 1.0; }, nullptr);
    const auto seq = find_asymp_sequence(f, [](double) { return 1.0; }, 1, 1, Rational(2));
    CHECK(seq.size() == 1);
    CHECK(seq[0] == 0.0);
  }
  // Strictly decaying slice norms: every node is a record low.
  {
    const DiscreteForm f = form_from(
        c, 1,
        [](long long, double t, const std::vector<double>&) { return std::exp(-t); }, nullptr);
    const auto seq = find_asymp_sequence(f, [](double) { return 1.0; }, 1, 1, Rational(2));
    CHECK(seq.size() == static_cast<size_t>(c->Nt));
    CHECK(seq.front() == 0.0);
    CHECK(seq.back() == 4.0);
  }
  // Zero-ratio slices are always kept.
  {
    const DiscreteForm f = form_from(
        c, 1,
        [](long long, double t, const std::vector<double>&) { return t < 2.0 ? 1.0 : 0.0; },
        nullptr);
    const auto seq = find_asymp_sequence(f, [](double) { return 1.0; }, 1, 1, Rational(2));
    CHECK(seq.size() >= 5);
  }
  {
    const DiscreteForm f = form_from(
        c, 1, [](long long, double, const std::vector<double>&) { return 1.0; }, nullptr);
    CHECK_THROWS(find_asymp_sequence(f, [](double) { return 0.0; }, 1, 1, Rational(2)),
                 std::invalid_argument);
    CHECK_THROWS(find_asymp_sequence(f, [](double) { return 1.0; }, 1, 1, Rational(1, 2)),
                 std::domain_error);
  }
}

int main() {
  test_increasing_tuples();
  test_cylinder_accessors();
  test_random_forms_and_operators();
  test_dd_zero();
  test_lp_norms();
  test_pointwise_modulus();
  test_exterior_derivative();
  test_pullbacks_and_fiber_integral();
  test_homotopy_checks();
  test_lemma_inequality();
  test_asymp_sequence();
  return testlib::summary("grid_forms_test");
}
