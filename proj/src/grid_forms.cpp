#include "lqp/grid_forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "lqp/integrals.hpp"

namespace lqp {
namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

long long ipow_ll(long long base, long long e) {
  long long r = 1;
  for (long long i = 0; i < e; ++i) r *= base;
  return r;
}

long long tuple_count(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long tuple_index(const std::vector<std::vector<int>>& tuples, const std::vector<int>& t) {
  for (size_t i = 0; i < tuples.size(); ++i)
    if (tuples[i] == t) return static_cast<long long>(i);
  fail("multi-index not found in range");
}

void require_form(const DiscreteForm& f) {
  if (!f.cylinder) fail("form has no cylinder");
  const DiscreteCylinder& c = *f.cylinder;
  c.validate();
  if (f.degree < 0 || f.degree > c.n + 1) fail("form degree out of range");
  const size_t cells = static_cast<size_t>(c.Nt * c.x_total());
  if (static_cast<long long>(f.A_components.size()) != tuple_count(c.n, f.degree))
    fail("A-component count does not match the degree");
  if (static_cast<long long>(f.B_components.size()) != tuple_count(c.n, f.degree - 1))
    fail("B-component count does not match the degree");
  for (const auto& arr : f.A_components)
    if (arr.size() != cells) fail("A-component array does not match the grid");
  for (const auto& arr : f.B_components)
    if (arr.size() != cells) fail("B-component array does not match the grid");
}

void require_base(const BaseForm& f) {
  if (!f.cylinder) fail("base form has no cylinder");
  const DiscreteCylinder& c = *f.cylinder;
  if (f.degree < 0) fail("base form degree out of range");
  if (static_cast<long long>(f.components.size()) != tuple_count(c.n, f.degree))
    fail("base-form component count does not match the degree");
  for (const auto& arr : f.components)
    if (arr.size() != static_cast<size_t>(c.x_total())) fail("base-form array does not match the grid");
}

void require_same_grid(const std::shared_ptr<const DiscreteCylinder>& a,
                       const std::shared_ptr<const DiscreteCylinder>& b) {
  if (a.get() != b.get()) fail("forms live on different cylinders");
}

/// Flattened-x stride of an axis; axis 0 is slowest.
long long axis_stride(const DiscreteCylinder& c, int axis) {
  return ipow_ll(c.Nx, c.n - 1 - axis);
}

long long shift_x(const DiscreteCylinder& c, long long xflat, int axis, int delta) {
  const long long stride = axis_stride(c, axis);
  const long long coord = (xflat / stride) % c.Nx;
  long long moved = (coord + delta) % c.Nx;
  if (moved < 0) moved += c.Nx;
  return xflat + (moved - coord) * stride;
}

/// dst += s * (centered periodic x-derivative of src along axis), row by row.
/// rows = Nt for cylinder arrays, 1 for base arrays.
void add_dx_rows(const DiscreteCylinder& c, const std::vector<double>& src, long long rows,
                 int axis, double s, std::vector<double>& dst) {
  const long long X = c.x_total();
  const double inv2dx = s / (2.0 * c.dx());
  for (long long r = 0; r < rows; ++r) {
    const long long off = r * X;
    for (long long x = 0; x < X; ++x) {
      const long long xp = shift_x(c, x, axis, +1);
      const long long xm = shift_x(c, x, axis, -1);
      dst[off + x] += inv2dx * (src[off + xp] - src[off + xm]);
    }
  }
}

/// dst += s * (t-derivative of src): centered inside, one-sided second order
/// at both ends.  Needs Nt >= 3.
void add_dt(const DiscreteCylinder& c, const std::vector<double>& src, double s,
            std::vector<double>& dst) {
  const long long X = c.x_total();
  const double inv2dt = s / (2.0 * c.dt());
  for (long long x = 0; x < X; ++x) {
    dst[x] += inv2dt * (-3.0 * src[x] + 4.0 * src[X + x] - src[2 * X + x]);
    const long long last = (c.Nt - 1) * X;
    dst[last + x] +=
        inv2dt * (3.0 * src[last + x] - 4.0 * src[last - X + x] + src[last - 2 * X + x]);
  }
  for (long long ti = 1; ti + 1 < c.Nt; ++ti)
    for (long long x = 0; x < X; ++x)
      dst[ti * X + x] += inv2dt * (src[(ti + 1) * X + x] - src[(ti - 1) * X + x]);
}

/// dst (arrays over (k+1)-tuples) += s * d_N src (arrays over k-tuples):
/// (d omega)_J = sum_m (-1)^m d/dx_{J[m]} omega_{J minus m}.
void assemble_dN(const DiscreteCylinder& c, long long rows, long long k_src,
                 const std::vector<std::vector<double>>& src,
                 std::vector<std::vector<double>>& dst, double s) {
  if (src.empty()) return;
  const auto src_tuples = increasing_tuples(c.n, k_src);
  const auto dst_tuples = increasing_tuples(c.n, k_src + 1);
  for (size_t j = 0; j < dst_tuples.size(); ++j) {
    const auto& J = dst_tuples[j];
    for (size_t m = 0; m < J.size(); ++m) {
      std::vector<int> I = J;
      I.erase(I.begin() + static_cast<long>(m));
      const long long si = tuple_index(src_tuples, I);
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      add_dx_rows(c, src[si], rows, J[m] - 1, sign * s, dst[j]);
    }
  }
}

/// Node-aligned prefix trapezoids P[ti] = int_{t_0}^{t_i} v, one array per
/// component, same layout as the source arrays.
std::vector<std::vector<double>> prefix_trapezoid(const DiscreteCylinder& c,
                                                  const std::vector<std::vector<double>>& vals) {
  const long long X = c.x_total();
  const double dt = c.dt();
  std::vector<std::vector<double>> P(vals.size());
  for (size_t ci = 0; ci < vals.size(); ++ci) {
    P[ci].assign(vals[ci].size(), 0.0);
    for (long long ti = 1; ti < c.Nt; ++ti)
      for (long long x = 0; x < X; ++x)
        P[ci][ti * X + x] = P[ci][(ti - 1) * X + x] +
                            0.5 * dt * (vals[ci][(ti - 1) * X + x] + vals[ci][ti * X + x]);
  }
  return P;
}

void check_t_range(const DiscreteCylinder& c, double t, const char* what) {
  const double tol = 1e-9 * std::max(1.0, std::abs(c.a) + std::abs(c.T));
  if (t < c.a - tol || t > c.T + tol) fail(std::string(what) + " must lie in the sampled t-range");
}

/// P evaluated at a real s: trapezoid up to the enclosing node plus a
/// linearly interpolated partial cell.  Exact for piecewise-linear data.
std::vector<double> prefix_at(const DiscreteCylinder& c, const std::vector<double>& vals,
                              const std::vector<double>& prefix, double s) {
  const long long X = c.x_total();
  const double dt = c.dt();
  long long j = static_cast<long long>(std::floor((s - c.a) / dt));
  j = std::clamp<long long>(j, 0, c.Nt - 2);
  const double theta = (s - c.t_node(j)) / dt;
  std::vector<double> out(static_cast<size_t>(X));
  for (long long x = 0; x < X; ++x) {
    const double v0 = vals[j * X + x];
    const double v1 = vals[(j + 1) * X + x];
    const double vs = v0 + theta * (v1 - v0);
    out[x] = prefix[j * X + x] + (s - c.t_node(j)) * 0.5 * (v0 + vs);
  }
  return out;
}

/// Trapezoid of per-node scalar samples from c0 to t1 (signed).
double scalar_segment_integral(const DiscreteCylinder& c, const std::vector<double>& node_vals,
                               double c0, double t1) {
  std::vector<double> prefix(node_vals.size(), 0.0);
  for (long long ti = 1; ti < c.Nt; ++ti)
    prefix[ti] = prefix[ti - 1] + 0.5 * c.dt() * (node_vals[ti - 1] + node_vals[ti]);
  auto at = [&](double s) {
    long long j = static_cast<long long>(std::floor((s - c.a) / c.dt()));
    j = std::clamp<long long>(j, 0, c.Nt - 2);
    const double theta = (s - c.t_node(j)) / c.dt();
    const double vs = node_vals[j] + theta * (node_vals[j + 1] - node_vals[j]);
    return prefix[j] + (s - c.t_node(j)) * 0.5 * (node_vals[j] + vs);
  };
  return at(t1) - at(c0);
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<std::vector<int>> increasing_tuples(long long n, long long k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur;
  cur.reserve(static_cast<size_t>(k));
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<long long>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v <= static_cast<int>(n); ++v) {
      cur.push_back(v);
      rec(v + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

long long DiscreteCylinder::x_total() const { return ipow_ll(Nx, n); }

double DiscreteCylinder::dx() const { return 2.0 * kPi / static_cast<double>(Nx); }

long long DiscreteCylinder::t_index(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(a) + std::abs(T));
  const long long idx = std::clamp<long long>(
      static_cast<long long>(std::llround((t - a) / dt())), 0, Nt - 1);
  if (std::abs(t_node(idx) - t) > tol) fail("t is not a grid node (no interpolation)");
  return idx;
}

std::vector<double> DiscreteCylinder::x_point(long long xflat) const {
  std::vector<double> out(static_cast<size_t>(n));
  for (int d = 0; d < n; ++d) {
    const long long stride = axis_stride(*this, d);
    const long long coord = (xflat / stride) % Nx;
    out[static_cast<size_t>(d)] = (static_cast<double>(coord) + 0.5) * dx();
  }
  return out;
}

double DiscreteCylinder::cell_volume() const { return std::pow(dx(), static_cast<double>(n)); }

double DiscreteCylinder::torus_volume() const {
  return std::pow(2.0 * kPi, static_cast<double>(n));
}

double DiscreteCylinder::envelope_min(long long ti, const Rational& alpha) const {
  const long long X = x_total();
  double best = std::numeric_limits<double>::infinity();
  for (long long x = 0; x < X; ++x) best = std::min(best, pow_rational(h(ti, x), alpha));
  return best;
}

double DiscreteCylinder::envelope_max(long long ti, const Rational& alpha) const {
  const long long X = x_total();
  double best = 0.0;
  for (long long x = 0; x < X; ++x) best = std::max(best, pow_rational(h(ti, x), alpha));
  return best;
}

void DiscreteCylinder::validate() const {
  if (!(a < T)) fail("cylinder needs a < T");
  if (Nt < 2) fail("cylinder needs at least 2 t-nodes");
  if (n < 1) fail("torus dimension must be at least 1");
  if (Nx < 3) fail("each torus axis needs at least 3 cells");
  if (h_samples.size() != static_cast<size_t>(Nt * x_total()))
    fail("h_samples does not match the grid");
  for (double v : h_samples)
    if (!(v > 0.0) || !std::isfinite(v)) fail("warping samples must be positive and finite");
}

DiscreteCylinder DiscreteCylinder::build(
    double a, double T, long long Nt, long long n, long long Nx,
    const std::function<double(double, const std::vector<double>&)>& h) {
  DiscreteCylinder c;
  c.a = a;
  c.T = T;
  c.Nt = Nt;
  c.n = n;
  c.Nx = Nx;
  if (!(a < T) || Nt < 2 || n < 1 || Nx < 3) fail("bad cylinder shape");
  if (!h) fail("cylinder needs a warping sampler");
  c.h_samples.resize(static_cast<size_t>(Nt * c.x_total()));
  for (long long ti = 0; ti < Nt; ++ti) {
    const double t = c.t_node(ti);
    for (long long x = 0; x < c.x_total(); ++x)
      c.h_samples[ti * c.x_total() + x] = h(t, c.x_point(x));
  }
  c.validate();
  return c;
}

DiscreteCylinder DiscreteCylinder::constant(double a, double T, long long Nt, long long n,
                                            long long Nx, double h_value) {
  return build(a, T, Nt, n, Nx, [h_value](double, const std::vector<double>&) { return h_value; });
}

BaseForm BaseForm::zero(std::shared_ptr<const DiscreteCylinder> cyl, long long degree) {
  if (!cyl) fail("base form has no cylinder");
  BaseForm f;
  f.cylinder = std::move(cyl);
  f.degree = degree;
  f.components.assign(static_cast<size_t>(tuple_count(f.cylinder->n, degree)),
                      std::vector<double>(static_cast<size_t>(f.cylinder->x_total()), 0.0));
  return f;
}

DiscreteForm DiscreteForm::zero(std::shared_ptr<const DiscreteCylinder> cyl, long long degree) {
  if (!cyl) fail("form has no cylinder");
  DiscreteForm f;
  f.cylinder = std::move(cyl);
  f.degree = degree;
  const size_t cells = static_cast<size_t>(f.cylinder->Nt * f.cylinder->x_total());
  f.A_components.assign(static_cast<size_t>(tuple_count(f.cylinder->n, degree)),
                        std::vector<double>(cells, 0.0));
  f.B_components.assign(static_cast<size_t>(tuple_count(f.cylinder->n, degree - 1)),
                        std::vector<double>(cells, 0.0));
  return f;
}

DiscreteForm form_from(std::shared_ptr<const DiscreteCylinder> cyl, long long degree,
                       const std::function<double(long long, double, const std::vector<double>&)>& fA,
                       const std::function<double(long long, double, const std::vector<double>&)>& fB) {
  DiscreteForm f = DiscreteForm::zero(std::move(cyl), degree);
  const DiscreteCylinder& c = *f.cylinder;
  const long long X = c.x_total();
  std::vector<std::vector<double>> points(static_cast<size_t>(X));
  for (long long x = 0; x < X; ++x) points[static_cast<size_t>(x)] = c.x_point(x);
  auto fill = [&](std::vector<std::vector<double>>& arrays,
                  const std::function<double(long long, double, const std::vector<double>&)>& fn) {
    if (!fn) return;
    for (size_t ci = 0; ci < arrays.size(); ++ci)
      for (long long ti = 0; ti < c.Nt; ++ti) {
        const double t = c.t_node(ti);
        for (long long x = 0; x < X; ++x)
          arrays[ci][ti * X + x] = fn(static_cast<long long>(ci), t, points[static_cast<size_t>(x)]);
      }
  };
  fill(f.A_components, fA);
  fill(f.B_components, fB);
  return f;
}

DiscreteForm random_trig_form(std::shared_ptr<const DiscreteCylinder> cyl, long long degree,
                              std::uint64_t seed) {
  DiscreteForm f = DiscreteForm::zero(std::move(cyl), degree);
  const DiscreteCylinder& c = *f.cylinder;
  const long long X = c.x_total();
  std::mt19937_64 rng(seed);

  // Term descriptors are drawn before any grid evaluation, so the same seed
  // names the same analytic form on every resolution.
  struct Term {
    double coef = 0.0;
    int t_freq = 0;
    double t_phase = 0.0;
    std::vector<int> x_freq;
    std::vector<int> x_sin;
  };
  constexpr int kTermsPerComponent = 3;
  auto draw_terms = [&](size_t arrays) {
    std::vector<std::vector<Term>> all(arrays);
    for (auto& terms : all)
      for (int r = 0; r < kTermsPerComponent; ++r) {
        Term t;
        t.coef = 2.0 * uniform_unit(rng) - 1.0;
        t.t_freq = static_cast<int>(rng() % 3);
        t.t_phase = 2.0 * kPi * uniform_unit(rng);
        t.x_freq.resize(static_cast<size_t>(c.n));
        t.x_sin.resize(static_cast<size_t>(c.n));
        for (long long d = 0; d < c.n; ++d) {
          t.x_freq[static_cast<size_t>(d)] = static_cast<int>(rng() % 5);
          t.x_sin[static_cast<size_t>(d)] = static_cast<int>(rng() % 2);
        }
        terms.push_back(std::move(t));
      }
    return all;
  };
  const auto a_terms = draw_terms(f.A_components.size());
  const auto b_terms = draw_terms(f.B_components.size());

  auto render = [&](const std::vector<std::vector<Term>>& descr,
                    std::vector<std::vector<double>>& arrays) {
    for (size_t ci = 0; ci < arrays.size(); ++ci)
      for (const Term& term : descr[ci]) {
        std::vector<double> tf(static_cast<size_t>(c.Nt));
        for (long long ti = 0; ti < c.Nt; ++ti)
          tf[static_cast<size_t>(ti)] =
              term.t_freq == 0 ? 1.0 : std::sin(term.t_freq * c.t_node(ti) + term.t_phase);
        std::vector<std::vector<double>> xf(static_cast<size_t>(c.n),
                                            std::vector<double>(static_cast<size_t>(c.Nx)));
        for (long long d = 0; d < c.n; ++d)
          for (long long j = 0; j < c.Nx; ++j) {
            const double xv = (static_cast<double>(j) + 0.5) * c.dx();
            const double arg = term.x_freq[static_cast<size_t>(d)] * xv;
            xf[static_cast<size_t>(d)][static_cast<size_t>(j)] =
                term.x_sin[static_cast<size_t>(d)] ? std::sin(arg) : std::cos(arg);
          }
        for (long long x = 0; x < X; ++x) {
          double xprod = 1.0;
          for (int d = 0; d < c.n; ++d) {
            const long long coord = (x / axis_stride(c, d)) % c.Nx;
            xprod *= xf[static_cast<size_t>(d)][static_cast<size_t>(coord)];
          }
          if (xprod == 0.0) continue;
          for (long long ti = 0; ti < c.Nt; ++ti)
            arrays[ci][ti * X + x] += term.coef * tf[static_cast<size_t>(ti)] * xprod;
        }
      }
  };
  render(a_terms, f.A_components);
  render(b_terms, f.B_components);
  return f;
}

namespace {

DiscreteForm combine(const DiscreteForm& f, const DiscreteForm& g, double sg) {
  require_form(f);
  require_form(g);
  require_same_grid(f.cylinder, g.cylinder);
  if (f.degree != g.degree) fail("cannot combine forms of different degree");
  DiscreteForm out = f;
  for (size_t ci = 0; ci < out.A_components.size(); ++ci)
    for (size_t i = 0; i < out.A_components[ci].size(); ++i)
      out.A_components[ci][i] += sg * g.A_components[ci][i];
  for (size_t ci = 0; ci < out.B_components.size(); ++ci)
    for (size_t i = 0; i < out.B_components[ci].size(); ++i)
      out.B_components[ci][i] += sg * g.B_components[ci][i];
  return out;
}

}  // namespace

DiscreteForm operator+(const DiscreteForm& f, const DiscreteForm& g) { return combine(f, g, 1.0); }

DiscreteForm operator-(const DiscreteForm& f, const DiscreteForm& g) { return combine(f, g, -1.0); }

DiscreteForm operator*(double c, const DiscreteForm& f) {
  require_form(f);
  DiscreteForm out = f;
  for (auto& arr : out.A_components)
    for (double& v : arr) v *= c;
  for (auto& arr : out.B_components)
    for (double& v : arr) v *= c;
  return out;
}

BaseForm operator-(const BaseForm& f, const BaseForm& g) {
  require_base(f);
  require_base(g);
  require_same_grid(f.cylinder, g.cylinder);
  if (f.degree != g.degree) fail("cannot combine base forms of different degree");
  BaseForm out = f;
  for (size_t ci = 0; ci < out.components.size(); ++ci)
    for (size_t i = 0; i < out.components[ci].size(); ++i)
      out.components[ci][i] -= g.components[ci][i];
  return out;
}

double pointwise_modulus(const DiscreteForm& form, long long t_idx, long long x_idx) {
  require_form(form);
  const DiscreteCylinder& c = *form.cylinder;
  if (t_idx < 0 || t_idx >= c.Nt || x_idx < 0 || x_idx >= c.x_total())
    fail("grid indices out of range");
  const size_t idx = static_cast<size_t>(t_idx * c.x_total() + x_idx);
  double sa = 0.0, sb = 0.0;
  for (const auto& arr : form.A_components) sa += arr[idx] * arr[idx];
  for (const auto& arr : form.B_components) sb += arr[idx] * arr[idx];
  const double hv = c.h(t_idx, x_idx);
  const Rational k(form.degree);
  const double wa = pow_rational(hv, Rational(-2) * k);
  const double wb = pow_rational(hv, Rational(-2) * (k - Rational(1)));
  return std::sqrt(wa * sa + wb * sb);
}

double lp_norm(const DiscreteForm& form, const Rational& p) {
  require_form(form);
  if (!(p >= Rational(1))) throw std::domain_error("lp_norm needs p >= 1");
  const DiscreteCylinder& c = *form.cylinder;
  const long long X = c.x_total();
  const Rational ea = (Rational(c.n) / p - Rational(form.degree)) * Rational(2);
  const Rational eb = ea + Rational(2);
  const Rational half_p = p / Rational(2);
  double acc = 0.0;
  for (long long ti = 0; ti < c.Nt; ++ti) {
    const double wt = (ti == 0 || ti == c.Nt - 1) ? 0.5 * c.dt() : c.dt();
    double row = 0.0;
    for (long long x = 0; x < X; ++x) {
      const size_t idx = static_cast<size_t>(ti * X + x);
      double sa = 0.0, sb = 0.0;
      for (const auto& arr : form.A_components) sa += arr[idx] * arr[idx];
      for (const auto& arr : form.B_components) sb += arr[idx] * arr[idx];
      if (sa == 0.0 && sb == 0.0) continue;
      const double hv = c.h(ti, x);
      row += pow_rational(pow_rational(hv, ea) * sa + pow_rational(hv, eb) * sb, half_p);
    }
    acc += wt * row;
  }
  acc *= c.cell_volume();
  return pow_rational(acc, Rational(1) / p);
}

double lp_norm_horizontal(const DiscreteForm& form, const Rational& p) {
  require_form(form);
  if (!(p >= Rational(1))) throw std::domain_error("lp_norm needs p >= 1");
  for (const auto& arr : form.B_components)
    for (double v : arr)
      if (v != 0.0) fail("the horizontal norm needs a form with zero dt-part");
  const DiscreteCylinder& c = *form.cylinder;
  const long long X = c.x_total();
  const Rational e = Rational(c.n) - Rational(form.degree) * p;
  const Rational half_p = p / Rational(2);
  double acc = 0.0;
  for (long long ti = 0; ti < c.Nt; ++ti) {
    const double wt = (ti == 0 || ti == c.Nt - 1) ? 0.5 * c.dt() : c.dt();
    double row = 0.0;
    for (long long x = 0; x < X; ++x) {
      const size_t idx = static_cast<size_t>(ti * X + x);
      double sa = 0.0;
      for (const auto& arr : form.A_components) sa += arr[idx] * arr[idx];
      if (sa == 0.0) continue;
      row += pow_rational(c.h(ti, x), e) * pow_rational(sa, half_p);
    }
    acc += wt * row;
  }
  acc *= c.cell_volume();
  return pow_rational(acc, Rational(1) / p);
}

DiscreteForm exterior_derivative(const DiscreteForm& form) {
  require_form(form);
  const DiscreteCylinder& c = *form.cylinder;
  if (form.degree > c.n) fail("exterior derivative input must have degree <= n");
  if (c.Nt < 3) fail("t-derivatives need at least 3 t-nodes");
  DiscreteForm out = DiscreteForm::zero(form.cylinder, form.degree + 1);
  // A' = d_N omega_A.
  assemble_dN(c, c.Nt, form.degree, form.A_components, out.A_components, 1.0);
  // B' = d/dt omega_A - d_N omega_B.  B'-tuples coincide with A-tuples.
  for (size_t ci = 0; ci < form.A_components.size(); ++ci)
    add_dt(c, form.A_components[ci], 1.0, out.B_components[ci]);
  assemble_dN(c, c.Nt, form.degree - 1, form.B_components, out.B_components, -1.0);
  return out;
}

BaseForm base_derivative(const BaseForm& base) {
  require_base(base);
  const DiscreteCylinder& c = *base.cylinder;
  BaseForm out = BaseForm::zero(base.cylinder, base.degree + 1);
  assemble_dN(c, 1, base.degree, base.components, out.components, 1.0);
  return out;
}

double base_lq_norm(const BaseForm& base, const Rational& q) {
  require_base(base);
  if (!(q >= Rational(1))) throw std::domain_error("base_lq_norm needs q >= 1");
  const DiscreteCylinder& c = *base.cylinder;
  const long long X = c.x_total();
  const Rational half_q = q / Rational(2);
  double acc = 0.0;
  for (long long x = 0; x < X; ++x) {
    double s = 0.0;
    for (const auto& arr : base.components) s += arr[static_cast<size_t>(x)] * arr[static_cast<size_t>(x)];
    if (s == 0.0) continue;
    acc += pow_rational(s, half_q);
  }
  acc *= c.cell_volume();
  return pow_rational(acc, Rational(1) / q);
}

BaseForm fiber_integral(const DiscreteForm& form, double c0, double t1) {
  require_form(form);
  if (form.degree < 1) throw std::domain_error("fiber integration needs a dt-part (degree >= 1)");
  const DiscreteCylinder& c = *form.cylinder;
  check_t_range(c, c0, "fiber integral endpoint c");
  check_t_range(c, t1, "fiber integral endpoint t");
  BaseForm out = BaseForm::zero(form.cylinder, form.degree - 1);
  const auto prefix = prefix_trapezoid(c, form.B_components);
  for (size_t ci = 0; ci < out.components.size(); ++ci) {
    const auto hi = prefix_at(c, form.B_components[ci], prefix[ci], t1);
    const auto lo = prefix_at(c, form.B_components[ci], prefix[ci], c0);
    for (long long x = 0; x < c.x_total(); ++x)
      out.components[ci][static_cast<size_t>(x)] =
          hi[static_cast<size_t>(x)] - lo[static_cast<size_t>(x)];
  }
  return out;
}

DiscreteForm homotopy_S(const DiscreteForm& form, double c0) {
  require_form(form);
  if (form.degree < 1) throw std::domain_error("the homotopy needs a dt-part (degree >= 1)");
  const DiscreteCylinder& c = *form.cylinder;
  check_t_range(c, c0, "homotopy base point c");
  DiscreteForm out = DiscreteForm::zero(form.cylinder, form.degree - 1);
  const auto prefix = prefix_trapezoid(c, form.B_components);
  const long long X = c.x_total();
  for (size_t ci = 0; ci < out.A_components.size(); ++ci) {
    const auto at_c = prefix_at(c, form.B_components[ci], prefix[ci], c0);
    for (long long ti = 0; ti < c.Nt; ++ti)
      for (long long x = 0; x < X; ++x)
        out.A_components[ci][ti * X + x] = prefix[ci][ti * X + x] - at_c[static_cast<size_t>(x)];
  }
  return out;
}

BaseForm slice_pullback(const DiscreteForm& form, double t) {
  require_form(form);
  const DiscreteCylinder& c = *form.cylinder;
  const long long ti = c.t_index(t);
  BaseForm out = BaseForm::zero(form.cylinder, form.degree);
  const long long X = c.x_total();
  for (size_t ci = 0; ci < out.components.size(); ++ci)
    for (long long x = 0; x < X; ++x)
      out.components[ci][static_cast<size_t>(x)] = form.A_components[ci][ti * X + x];
  return out;
}

DiscreteForm base_pullback(const BaseForm& base) {
  require_base(base);
  const DiscreteCylinder& c = *base.cylinder;
  DiscreteForm out = DiscreteForm::zero(base.cylinder, base.degree);
  const long long X = c.x_total();
  for (size_t ci = 0; ci < out.A_components.size(); ++ci)
    for (long long ti = 0; ti < c.Nt; ++ti)
      for (long long x = 0; x < X; ++x)
        out.A_components[ci][ti * X + x] = base.components[ci][static_cast<size_t>(x)];
  return out;
}

double check_homotopy_base(const DiscreteForm& form, double c0, double t1) {
  require_form(form);
  const DiscreteCylinder& c = *form.cylinder;
  if (form.degree > c.n) fail("the slice identity needs d(omega): degree <= n");
  const BaseForm dN_int = form.degree >= 1 ? base_derivative(fiber_integral(form, c0, t1))
                                           : BaseForm::zero(form.cylinder, 0);
  const BaseForm int_d = fiber_integral(exterior_derivative(form), c0, t1);
  const BaseForm hi = slice_pullback(form, t1);
  const BaseForm lo = slice_pullback(form, c0);
  double acc = 0.0;
  for (size_t ci = 0; ci < hi.components.size(); ++ci)
    for (size_t x = 0; x < hi.components[ci].size(); ++x) {
      const double d = dN_int.components[ci][x] + int_d.components[ci][x] -
                       (hi.components[ci][x] - lo.components[ci][x]);
      acc += d * d;
    }
  return std::sqrt(acc * c.cell_volume());
}

double check_homotopy_cylinder(const DiscreteForm& form, double c0) {
  require_form(form);
  const DiscreteCylinder& c = *form.cylinder;
  // Degree 0 has no dt-part to integrate: S_c omega is dropped.  Top degree
  // has no d(omega): the S_c d omega term is dropped instead.
  const DiscreteForm dS = form.degree >= 1
                              ? exterior_derivative(homotopy_S(form, c0))
                              : DiscreteForm::zero(form.cylinder, form.degree);
  const DiscreteForm Sd = form.degree <= c.n
                              ? homotopy_S(exterior_derivative(form), c0)
                              : DiscreteForm::zero(form.cylinder, form.degree);
  const DiscreteForm rhs = form - base_pullback(slice_pullback(form, c0));
  return lp_norm((dS + Sd) - rhs, Rational(2));
}

LemmaCheck check_lemma_ineq(const DiscreteForm& form, double c0, double t1, const Rational& p,
                            const Rational& q, double eps_disc) {
  require_form(form);
  if (form.degree < 1)
    throw std::domain_error("the fiber-integration bound needs degree k >= 1");
  if (!(q > Rational(1)) || !(p >= q))
    throw std::domain_error("the fiber-integration bound needs p >= q > 1");
  const DiscreteCylinder& c = *form.cylinder;
  check_t_range(c, c0, "lemma endpoint c");
  check_t_range(c, t1, "lemma endpoint t");

  const double lhs = base_lq_norm(fiber_integral(form, c0, t1), q);

  const Rational pc = conjugate_exponent(p);
  const Rational beta = Rational(c.n) / p - Rational(form.degree - 1);
  std::vector<double> weight(static_cast<size_t>(c.Nt));
  for (long long ti = 0; ti < c.Nt; ++ti)
    weight[static_cast<size_t>(ti)] = pow_rational(c.envelope_min(ti, beta), Rational(-1) * pc);
  const double inner = std::abs(scalar_segment_integral(c, weight, c0, t1));
  const double holder = pow_rational(c.torus_volume(), Rational(1) / q - Rational(1) / p);
  const double rhs = holder * pow_rational(inner, Rational(1) / pc) * lp_norm(form, p);

  LemmaCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.holds = lhs <= rhs * (1.0 + eps_disc);
  return out;
}

std::vector<double> find_asymp_sequence(const DiscreteForm& form,
                                        const std::function<double(double)>& g, long long n,
                                        long long k, const Rational& p) {
  require_form(form);
  if (!(p >= Rational(1))) throw std::domain_error("slice norms need p >= 1");
  if (!g) fail("find_asymp_sequence needs a density g");
  const DiscreteCylinder& c = *form.cylinder;
  const long long X = c.x_total();
  const Rational alpha = Rational(n) / p - Rational(k);
  const Rational half_p = p / Rational(2);

  bool g_nonzero = false;
  std::vector<double> ratio(static_cast<size_t>(c.Nt));
  for (long long ti = 0; ti < c.Nt; ++ti) {
    double acc = 0.0;
    for (long long x = 0; x < X; ++x) {
      double s = 0.0;
      for (const auto& arr : form.A_components) {
        const double v = arr[ti * X + x];
        s += v * v;
      }
      if (s != 0.0) acc += pow_rational(s, half_p);
    }
    const double slice_norm = pow_rational(acc * c.cell_volume(), Rational(1) / p);
    const double fk = c.envelope_min(ti, alpha);
    const double gv = std::abs(g(c.t_node(ti)));
    if (gv != 0.0) g_nonzero = true;
    if (slice_norm * fk == 0.0)
      ratio[static_cast<size_t>(ti)] = 0.0;
    else if (gv == 0.0)
      ratio[static_cast<size_t>(ti)] = std::numeric_limits<double>::infinity();
    else
      ratio[static_cast<size_t>(ti)] = slice_norm * fk * pow_rational(gv, Rational(-1) / p);
  }
  if (!g_nonzero) fail("g vanishes on the whole grid");

  std::vector<double> out;
  double best = std::numeric_limits<double>::infinity();
  for (long long ti = 0; ti < c.Nt; ++ti) {
    const double r = ratio[static_cast<size_t>(ti)];
    if (r == 0.0) {
      out.push_back(c.t_node(ti));
      best = 0.0;
    } else if (r < best) {
      out.push_back(c.t_node(ti));
      best = r;
    }
  }
  return out;
}

}  // namespace lqp
