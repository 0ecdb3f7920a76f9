#pragma once

#include "lqp/integrals.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lqp {

enum class Flavor { Absolute, RelativeToBase, Interior };

std::string to_string(Flavor f);

/// Geometric context of a query.  The warping model itself lives on the
/// query (shared by the cylinder contexts); CartanHadamard needs none.
struct PureCylinder {};

struct AsymptoticCylinder {
  // de Rham Betti numbers b_0..b_n of the compact piece X.  Degrees above n
  // are treated as zero (X has nonempty boundary, so its top cohomology
  // vanishes).  Empty means "not supplied".
  std::vector<long long> betti;
};

struct CartanHadamard {
  long long m = 2;  // dim M; the cylinder end is over an (m-1)-sphere
};

using GeometricContext = std::variant<PureCylinder, AsymptoticCylinder, CartanHadamard>;

struct CohomologyQuery {
  long long n = 1;  // dim N (or dim of the boundary of X)
  long long k = 0;  // cohomology degree, an integer in 0..n+1
  Rational p{2};
  Rational q{2};
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  Flavor flavor = Flavor::Absolute;
  GeometricContext context = PureCylinder{};
  std::optional<WarpingModel> model;  // required except for CartanHadamard
};

/// One checked condition in a justification chain.  `citation` is set only
/// on the entry that states the applied theorem's conclusion verbatim; a
/// Vanishes verdict carries exactly one such entry.
struct TraceEntry {
  std::string theorem;    // e.g. "Theorem 5.1"
  std::string condition;  // the hypothesis or conclusion being recorded
  bool satisfied = false;
  std::string detail;     // classification outcome, numbers, notes
  std::optional<double> value;        // integral value when one converged
  std::optional<double> error_bound;
  std::string citation;
};

enum class Outcome { Vanishes, Inconclusive, Unsupported };

std::string to_string(Outcome o);

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  std::vector<TraceEntry> trace;

  // The theorem id of the citation entry; empty unless outcome == Vanishes.
  std::string theorem() const;
};

/// Tuning shared by every decision op: classifier knobs plus the optional
/// delta0 override for the J and A integrals.
struct DecisionConfig {
  ClassifierConfig classifier;
  std::optional<double> delta0;
};

/// Exponent-ordering and standing-assumption checks.  Returns an
/// Unsupported verdict naming the violated condition, or nullopt when the
/// query is admissible.
std::optional<Verdict> check_preconditions(const CohomologyQuery& query);

// Decision ops.  Each validates its own preconditions (returning
// Unsupported as a value, never throwing) and emits a full trace.  All
// theorems here are sufficient conditions only, so the negative outcome is
// always Inconclusive, never "does not vanish".
Verdict decide_absolute(const CohomologyQuery& query, const DecisionConfig& cfg = {});
Verdict decide_relative(const CohomologyQuery& query, const DecisionConfig& cfg = {});
Verdict decide_asymptotic_absolute(const CohomologyQuery& query, const DecisionConfig& cfg = {});
Verdict decide_asymptotic_relative(const CohomologyQuery& query, const DecisionConfig& cfg = {});
Verdict decide_interior(const CohomologyQuery& query, const DecisionConfig& cfg = {});

/// Cartan-Hadamard manifolds of dimension m with pinched curvature: the
/// regime is fully arithmetic in (m, p, q, k).
Verdict decide_cartan_hadamard(long long m, const Rational& p, const Rational& q, long long k);

/// Symbolic regime tables for the bounded families on [a, infinity).
/// The undeclared rate s in the exp table's case (2b) is read as
/// s = s1 = s2, the only reading its derivation supports.
Verdict decide_exp_regime(long long n, long long k, const Rational& p, const Rational& q,
                          const Rational& s1, const Rational& s2, Flavor flavor);
Verdict decide_power_regime(long long n, long long k, const Rational& p, const Rational& q,
                            const Rational& s1, const Rational& s2, Flavor flavor);

/// Dispatcher: preconditions, then the context/flavor-appropriate decision
/// chain.  ExpBounded/PowerBounded pure-cylinder queries on [a, infinity)
/// route to the regime tables; everything else goes through the theorem
/// fast paths and the integral classifiers.
Verdict analyze(const CohomologyQuery& query, const DecisionConfig& cfg = {});

}  // namespace lqp
