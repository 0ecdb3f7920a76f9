#include "lqp/warping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lqp {

double pow_rational(double base, const Rational& e) {
  if (e.is_zero()) return 1.0;
  if (e == Rational(1)) return base;
  if (e.is_integer()) {
    long long n = e.num();
    double acc = 1.0, b = base;
    bool neg = n < 0;
    unsigned long long m = neg ? static_cast<unsigned long long>(-n)
                               : static_cast<unsigned long long>(n);
    while (m) {
      if (m & 1ULL) acc *= b;
      b *= b;
      m >>= 1;
    }
    return neg ? 1.0 / acc : acc;
  }
  return std::pow(base, e.to_double());
}

double eval(const SeparableExpr& e, double t) {
  if (const auto* c = std::get_if<ConstantExpr>(&e)) return c->value;
  if (const auto* p = std::get_if<PowerExpr>(&e)) return p->coef * pow_rational(t, p->exponent);
  const auto& x = std::get<ExpExpr>(e);
  return x.coef * std::exp(x.rate.to_double() * t);
}

std::string describe(const SeparableExpr& e) {
  std::ostringstream os;
  if (const auto* c = std::get_if<ConstantExpr>(&e)) {
    os << c->value;
  } else if (const auto* p = std::get_if<PowerExpr>(&e)) {
    os << p->coef << "*t^(" << p->exponent.str() << ")";
  } else {
    const auto& x = std::get<ExpExpr>(e);
    os << x.coef << "*exp(" << x.rate.str() << "*t)";
  }
  return os.str();
}

double GrowthTerm::eval(double t) const {
  double v = coef;
  if (!tpow.is_zero()) v *= pow_rational(t, tpow);
  if (!rate.is_zero()) v *= std::exp(rate.to_double() * t);
  return v;
}

GrowthTerm GrowthTerm::pow(const Rational& e) const {
  GrowthTerm out;
  out.coef = pow_rational(coef, e);
  out.tpow = tpow * e;
  out.rate = rate * e;
  return out;
}

std::string GrowthTerm::describe() const {
  std::ostringstream os;
  os << coef;
  if (!tpow.is_zero()) os << "*t^(" << tpow.str() << ")";
  if (!rate.is_zero()) os << "*exp(" << rate.str() << "*t)";
  return os.str();
}

// ---------------------------------------------------------------------------
// WarpingModel
// ---------------------------------------------------------------------------

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

WarpingModel WarpingModel::separable(SeparableExpr expr, Interval iv) {
  require(iv.a < iv.b, "warping interval needs a < b");
  if (const auto* p = std::get_if<PowerExpr>(&expr)) {
    require(p->coef > 0.0, "power profile needs a positive coefficient");
    require(iv.a > 0.0, "power profile needs a > 0");
  } else if (const auto* c = std::get_if<ConstantExpr>(&expr)) {
    require(c->value > 0.0, "constant profile must be positive");
  } else {
    require(std::get<ExpExpr>(expr).coef > 0.0, "exp profile needs a positive coefficient");
  }
  WarpingModel m;
  m.kind_ = Kind::Separable;
  m.interval_ = iv;
  m.expr_ = std::move(expr);
  return m;
}

WarpingModel WarpingModel::exp_bounded(double c1, Rational s1, double c2, Rational s2,
                                       Interval iv) {
  require(iv.a < iv.b, "warping interval needs a < b");
  require(c1 > 0.0 && c1 <= c2, "exp-bounded needs 0 < c1 <= c2");
  require(Rational(0) <= s1 && s1 <= s2, "exp-bounded needs 0 <= s1 <= s2");
  WarpingModel m;
  m.kind_ = Kind::ExpBounded;
  m.interval_ = iv;
  m.c1_ = c1;
  m.c2_ = c2;
  m.s1_ = s1;
  m.s2_ = s2;
  return m;
}

WarpingModel WarpingModel::power_bounded(double c1, Rational s1, double c2, Rational s2,
                                         Interval iv) {
  require(iv.a > 0.0, "power-bounded needs a > 0");
  require(iv.a < iv.b, "warping interval needs a < b");
  require(c1 > 0.0 && c1 <= c2, "power-bounded needs 0 < c1 <= c2");
  require(Rational(0) <= s1 && s1 <= s2, "power-bounded needs 0 <= s1 <= s2");
  WarpingModel m;
  m.kind_ = Kind::PowerBounded;
  m.interval_ = iv;
  m.c1_ = c1;
  m.c2_ = c2;
  m.s1_ = s1;
  m.s2_ = s2;
  return m;
}

WarpingModel WarpingModel::grid_sampled(std::vector<double> t_nodes,
                                        std::vector<std::vector<double>> values) {
  require(t_nodes.size() >= 2, "grid model needs at least two t-samples");
  require(values.size() == t_nodes.size(), "grid model needs one value row per t-sample");
  for (std::size_t i = 1; i < t_nodes.size(); ++i)
    require(t_nodes[i] > t_nodes[i - 1], "grid t-samples must be strictly increasing");
  WarpingModel m;
  m.kind_ = Kind::GridSampled;
  m.interval_ = Interval{t_nodes.front(), t_nodes.back()};
  m.row_min_.reserve(values.size());
  m.row_max_.reserve(values.size());
  const std::size_t width = values.front().size();
  require(width >= 1, "grid model needs at least one x-sample per slice");
  for (const auto& row : values) {
    require(row.size() == width, "grid value rows must have equal length");
    double lo = row.front(), hi = row.front();
    for (double v : row) {
      require(v > 0.0 && std::isfinite(v), "warping samples must be positive and finite");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    m.row_min_.push_back(lo);
    m.row_max_.push_back(hi);
  }
  m.t_nodes_ = std::move(t_nodes);
  m.values_ = std::move(values);
  return m;
}

const SeparableExpr& WarpingModel::expr() const {
  if (kind_ != Kind::Separable)
    throw std::logic_error("expr() is only available on separable models");
  return expr_;
}

std::pair<double, double> WarpingModel::h_range(double t) const {
  switch (kind_) {
    case Kind::Separable: {
      double v = lqp::eval(expr_, t);
      return {v, v};
    }
    case Kind::ExpBounded:
      return {c1_ * std::exp(s1_.to_double() * t), c2_ * std::exp(s2_.to_double() * t)};
    case Kind::PowerBounded:
      return {c1_ * pow_rational(t, s1_), c2_ * pow_rational(t, s2_)};
    case Kind::GridSampled: {
      const double eps = 1e-12 * (1.0 + std::abs(t));
      if (t < t_nodes_.front() - eps || t > t_nodes_.back() + eps)
        throw std::domain_error("t outside the sampled range; grid models do not extrapolate");
      double tc = std::clamp(t, t_nodes_.front(), t_nodes_.back());
      auto it = std::upper_bound(t_nodes_.begin(), t_nodes_.end(), tc);
      std::size_t i = it == t_nodes_.begin()
                          ? 0
                          : static_cast<std::size_t>(it - t_nodes_.begin()) - 1;
      if (i + 1 >= t_nodes_.size()) i = t_nodes_.size() - 2;
      double w = (tc - t_nodes_[i]) / (t_nodes_[i + 1] - t_nodes_[i]);
      return {row_min_[i] + w * (row_min_[i + 1] - row_min_[i]),
              row_max_[i] + w * (row_max_[i + 1] - row_max_[i])};
    }
  }
  throw std::logic_error("unreachable");
}

std::pair<GrowthTerm, GrowthTerm> WarpingModel::envelope_bracket(const Rational& alpha) const {
  GrowthTerm lo, hi;
  switch (kind_) {
    case Kind::Separable: {
      if (const auto* c = std::get_if<ConstantExpr>(&expr_)) {
        lo.coef = pow_rational(c->value, alpha);
      } else if (const auto* p = std::get_if<PowerExpr>(&expr_)) {
        lo.coef = pow_rational(p->coef, alpha);
        lo.tpow = p->exponent * alpha;
      } else {
        const auto& x = std::get<ExpExpr>(expr_);
        lo.coef = pow_rational(x.coef, alpha);
        lo.rate = x.rate * alpha;
      }
      return {lo, lo};
    }
    case Kind::ExpBounded: {
      GrowthTerm b1{c1_, Rational(0), s1_}, b2{c2_, Rational(0), s2_};
      lo = (alpha >= Rational(0)) ? b1.pow(alpha) : b2.pow(alpha);
      hi = (alpha >= Rational(0)) ? b2.pow(alpha) : b1.pow(alpha);
      return {lo, hi};
    }
    case Kind::PowerBounded: {
      GrowthTerm b1{c1_, s1_, Rational(0)}, b2{c2_, s2_, Rational(0)};
      lo = (alpha >= Rational(0)) ? b1.pow(alpha) : b2.pow(alpha);
      hi = (alpha >= Rational(0)) ? b2.pow(alpha) : b1.pow(alpha);
      return {lo, hi};
    }
    case Kind::GridSampled:
      throw std::logic_error("grid-sampled models have no symbolic envelope bracket");
  }
  throw std::logic_error("unreachable");
}

std::string WarpingModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Separable:
      os << "separable h(t)=" << lqp::describe(expr_);
      break;
    case Kind::ExpBounded:
      os << "exp-bounded " << c1_ << "*e^(" << s1_.str() << " t) <= h <= " << c2_ << "*e^("
         << s2_.str() << " t)";
      break;
    case Kind::PowerBounded:
      os << "power-bounded " << c1_ << "*t^(" << s1_.str() << ") <= h <= " << c2_ << "*t^("
         << s2_.str() << ")";
      break;
    case Kind::GridSampled:
      os << "grid-sampled h, " << t_nodes_.size() << " t-samples on [" << interval_.a << ", "
         << interval_.b << "]";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Envelopes
// ---------------------------------------------------------------------------

Rational envelope_exponent(long long n, long long k, const Rational& p) {
  if (n < 1) throw std::domain_error("envelope exponent needs n >= 1");
  if (k < 0) throw std::domain_error("envelope exponent needs k >= 0");
  if (!(p > Rational(1))) throw std::domain_error("envelope exponent needs p > 1");
  return Rational(n) / p - Rational(k);
}

namespace {

double envelope(const WarpingModel& h, const Rational& alpha, double t, bool lower) {
  // alpha == 0 collapses both envelopes to the constant 1: h^0 = 1 for
  // every positive h, so no evaluation (and no grid lookup) happens.
  if (alpha.is_zero()) return 1.0;
  auto [mn, mx] = h.h_range(t);
  const bool positive = alpha > Rational(0);
  // min_x h^alpha sits at min h for alpha > 0 and at max h for alpha < 0;
  // max_x h^alpha is the mirror image.
  double base = (lower == positive) ? mn : mx;
  return pow_rational(base, alpha);
}

}  // namespace

double lower_envelope(const WarpingModel& h, const Rational& alpha, double t) {
  return envelope(h, alpha, t, /*lower=*/true);
}

double upper_envelope(const WarpingModel& h, const Rational& alpha, double t) {
  return envelope(h, alpha, t, /*lower=*/false);
}

bool is_middle_dimension(long long n, long long k, const Rational& p) {
  if (n < 1 || !(p > Rational(1))) return false;
  return Rational(n) / p == Rational(k);
}

}  // namespace lqp
