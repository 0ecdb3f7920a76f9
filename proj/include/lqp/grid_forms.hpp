#pragma once
// Discrete twisted cylinders [a,T] x T^n with forms split as omega_A + dt ^ omega_B.
// Finite-difference exterior calculus plus the fiber-integration estimates, on the
// flat torus with a uniform periodic grid.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lqp/rational.hpp"

namespace lqp {

/// Strictly increasing k-tuples over {1..n}, lexicographic.  k = 0 yields the
/// single empty tuple; k > n yields no tuples.
std::vector<std::vector<int>> increasing_tuples(long long n, long long k);

/// Uniform grid on [a,T] x T^n.  t has Nt nodes including both endpoints;
/// each torus axis has Nx cells sampled at cell centers (midpoint rule).
/// h_samples holds the warping factor at every (t-node, x-cell), t-major,
/// x flattened with axis 0 slowest.
struct DiscreteCylinder {
  double a = 0.0;
  double T = 1.0;
  long long Nt = 2;
  long long n = 1;
  long long Nx = 8;
  std::vector<double> h_samples;

  /// Samples h(t, x) on the grid.  h must be positive everywhere.
  static DiscreteCylinder build(double a, double T, long long Nt, long long n, long long Nx,
                                const std::function<double(double, const std::vector<double>&)>& h);
  /// Constant warping factor.
  static DiscreteCylinder constant(double a, double T, long long Nt, long long n, long long Nx,
                                   double h_value = 1.0);

  long long x_total() const;
  double dt() const { return (T - a) / static_cast<double>(Nt - 1); }
  double dx() const;
  double t_node(long long ti) const { return a + dt() * static_cast<double>(ti); }
  /// Nearest grid node for t; throws std::invalid_argument when t is off-grid.
  long long t_index(double t) const;
  /// Coordinates of the x-cell center for a flattened index.
  std::vector<double> x_point(long long xflat) const;
  double h(long long ti, long long xflat) const { return h_samples[ti * x_total() + xflat]; }
  double cell_volume() const;   // dx^n
  double torus_volume() const;  // (2 pi)^n

  /// min over x of h(t_i, x)^alpha and the matching max.  These are the
  /// discrete envelopes: the exponent applies before taking the extremum.
  double envelope_min(long long ti, const Rational& alpha) const;
  double envelope_max(long long ti, const Rational& alpha) const;

  /// Throws std::invalid_argument on bad shape or nonpositive samples.
  void validate() const;
};

/// A form on N at a fixed t: one array per increasing degree-tuple, on the x-grid.
struct BaseForm {
  std::shared_ptr<const DiscreteCylinder> cylinder;
  long long degree = 0;
  std::vector<std::vector<double>> components;

  static BaseForm zero(std::shared_ptr<const DiscreteCylinder> cyl, long long degree);
};

/// omega = omega_A + dt ^ omega_B on the full cylinder.  A-components are indexed
/// by increasing_tuples(n, degree), B-components by increasing_tuples(n, degree-1);
/// each array has one entry per (t-node, x-cell), t-major.
struct DiscreteForm {
  std::shared_ptr<const DiscreteCylinder> cylinder;
  long long degree = 0;
  std::vector<std::vector<double>> A_components;
  std::vector<std::vector<double>> B_components;

  static DiscreteForm zero(std::shared_ptr<const DiscreteCylinder> cyl, long long degree);
};

/// Samples fA/fB over the grid: fA(component, t, x) fills A, fB fills B.
/// Pass nullptr for a part that should stay zero.
DiscreteForm form_from(std::shared_ptr<const DiscreteCylinder> cyl, long long degree,
                       const std::function<double(long long, double, const std::vector<double>&)>& fA,
                       const std::function<double(long long, double, const std::vector<double>&)>& fB);

/// Trigonometric-polynomial test form: per component a short sum of
/// sin/cos products with x-frequencies <= 4, t-frequencies <= 2 and
/// coefficients in [-1,1].  Fully determined by the seed.
DiscreteForm random_trig_form(std::shared_ptr<const DiscreteCylinder> cyl, long long degree,
                              std::uint64_t seed);

DiscreteForm operator+(const DiscreteForm& f, const DiscreteForm& g);
DiscreteForm operator-(const DiscreteForm& f, const DiscreteForm& g);
DiscreteForm operator*(double c, const DiscreteForm& f);
BaseForm operator-(const BaseForm& f, const BaseForm& g);

/// [h^{-2k}|omega_A|^2 + h^{-2(k-1)}|omega_B|^2]^{1/2} at one grid point.
/// The B-part of a k-form has degree k-1, so its slot carries the k-1 weight.
double pointwise_modulus(const DiscreteForm& form, long long t_idx, long long x_idx);

/// Weighted L^p norm over the cylinder: trapezoid in t, midpoint in x, of
/// [h^{2(n/p-k)}|omega_A|^2 + h^{2(n/p-k+1)}|omega_B|^2]^{p/2}, to the 1/p.
double lp_norm(const DiscreteForm& form, const Rational& p);

/// Horizontal specialization: integrates |omega|^p h^{n-kp} directly.
/// Throws std::invalid_argument when the form has a nonzero dt-part.
double lp_norm_horizontal(const DiscreteForm& form, const Rational& p);

/// d(omega_A + dt^omega_B) = d_N omega_A + dt ^ (d/dt omega_A - d_N omega_B).
/// Centered differences: periodic in x, one-sided second order at the t-ends.
/// Requires degree <= n and at least 3 t-nodes.
DiscreteForm exterior_derivative(const DiscreteForm& form);

/// d_N on a fixed-t form (periodic centered differences).
BaseForm base_derivative(const BaseForm& base);

/// Flat L^q(N) norm of a base form, midpoint rule in x.
double base_lq_norm(const BaseForm& base, const Rational& q);

/// int_c^t omega = int_c^t omega_B(tau) dtau, trapezoid in tau with
/// linear interpolation inside partial end cells; antisymmetric in (c,t).
/// Throws when c or t leaves [a,T] or the degree is 0.
BaseForm fiber_integral(const DiscreteForm& form, double c, double t);

/// (S_c omega)(t) = int_c^t omega as a horizontal family over the grid.
DiscreteForm homotopy_S(const DiscreteForm& form, double c);

/// omega_A(t) as a form on N.  t must sit on the grid: no interpolation.
BaseForm slice_pullback(const DiscreteForm& form, double t);

/// t-constant extension of a base form; the dt-part is zero.
DiscreteForm base_pullback(const BaseForm& base);

/// L^2(N) residual of d_N(int_c^t omega) + int_c^t d omega = i_t^* omega - i_c^* omega.
double check_homotopy_base(const DiscreteForm& form, double c, double t);

/// Weighted-L^2 residual of d S_c omega + S_c d omega = omega - pi^* i_c^* omega.
/// For degree 0 the S_c omega term is dropped (there is no dt-part to integrate).
double check_homotopy_cylinder(const DiscreteForm& form, double c);

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Fiber-integration estimate: L^q(N) norm of int_c^t omega against
/// |N|^{1/q-1/p} |int_c^t f_{k-1,p}^{-p'}|^{1/p'} times the weighted L^p norm
/// of omega.  holds = (lhs <= rhs * (1 + eps_disc)).
LemmaCheck check_lemma_ineq(const DiscreteForm& form, double c, double t, const Rational& p,
                            const Rational& q, double eps_disc = 0.02);

/// Scans grid slices for strict record lows of
/// ||i_t^* omega||_{L^p(N)} f_{k,p}(t) |g(t)|^{-1/p}.  Zero-ratio slices are
/// always included; a singleton result signals no decay on this truncation.
/// Throws std::invalid_argument when g vanishes at every node.
std::vector<double> find_asymp_sequence(const DiscreteForm& form,
                                        const std::function<double(double)>& g, long long n,
                                        long long k, const Rational& p);

}  // namespace lqp
