#include "lqp/criteria.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lqp {

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::Absolute: return "absolute";
    case Flavor::RelativeToBase: return "relative";
    case Flavor::Interior: return "interior";
  }
  return "absolute";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Vanishes: return "Vanishes";
    case Outcome::Inconclusive: return "Inconclusive";
    case Outcome::Unsupported: return "Unsupported";
  }
  return "Inconclusive";
}

std::string Verdict::theorem() const {
  for (const auto& e : trace)
    if (!e.citation.empty()) return e.theorem;
  return "";
}

namespace {

// Conclusion strings, quoted verbatim.  They are product data: reports and
// golden files carry them, so they must stay byte-stable.
const char* kCite51 = "$\\overline{H}_{q,p}^{k}(C_{a,b}^h N)=0$";
const char* kCite54 = "$\\overline{H}_{q,p}^{\\frac{n}{p}}([0,\\infty)\\times_h N)=0$";
const char* kCite56 = "$\\overline{H}_{q,p}^k(C_{a,b}^h N, N_a)=0$";
const char* kCite57 = "$\\overline{H}_{q,p}^{\\frac{n}{p}+1}(C_{a,b}^{h}N,N_{a})=0$";
const char* kCite62 = "$\\overline{H}_{q,p}^{k}(M,X)=0$";
const char* kCite66 = "$\\overline{H}_{q,p}^{k}(M)=0$";
const char* kCite67 =
    "$H^{\\frac{n}{p}}(X)=H^{\\frac{n}{p}+1}(X)=0$ then "
    "$\\overline{H}_{q,p}^{\\frac{n}{p}+1}(M)=0$";
const char* kCite68 = "$\\overline{H}_{p,q;0}^{\\frac{n}{p}}(M)=0$";
const char* kCite69 =
    "$\\overline{H}_{p}^{\\frac{n}{p}+1}(M)=\\overline{H}_{p'}^{\\frac{n}{p'}}(M)=0$";
const char* kCite610 = "$\\overline{H}_{q,p}^{\\frac{m-1}{p}+1}(M,g)=0$";
const char* kCite610Dual =
    "$\\overline{H}_{p}^{\\frac{m-1}{p}+1}(M,g)=\\overline{H}_{p'}^{\\frac{m-1}{p'}}(M,g)=0$";
const char* kCiteRegimeAbs = "$\\overline{H}_{q,p}^{k}(C_{a,\\infty}^{h}N)=0$";
const char* kCiteRegimeRel = "$\\overline{H}_{q,p}^{k}(C_{a,\\infty}^{h}N,N_{a})=0$";

TraceEntry entry(std::string thm, std::string cond, bool sat, std::string detail = {}) {
  TraceEntry e;
  e.theorem = std::move(thm);
  e.condition = std::move(cond);
  e.satisfied = sat;
  e.detail = std::move(detail);
  return e;
}

TraceEntry cite(std::string thm, const char* citation) {
  TraceEntry e;
  e.theorem = std::move(thm);
  e.condition = "conclusion";
  e.satisfied = true;
  e.citation = citation;
  return e;
}

std::string verdict_detail(const IntegralVerdict& v) {
  std::ostringstream os;
  os << to_string(v.status);
  if (v.status == IntegralStatus::Converges)
    os << " (value " << v.value << ", error bound " << v.error_bound << ")";
  for (const auto& note : v.notes) os << "; " << note;
  return os.str();
}

TraceEntry integral_entry(std::string thm, std::string cond, const IntegralVerdict& v,
                          bool want_divergent) {
  const bool sat =
      v.status == (want_divergent ? IntegralStatus::Diverges : IntegralStatus::Converges);
  TraceEntry e = entry(std::move(thm), std::move(cond), sat, verdict_detail(v));
  if (v.status == IntegralStatus::Converges) {
    e.value = v.value;
    e.error_bound = v.error_bound;
  }
  return e;
}

Verdict make(Outcome o, std::vector<TraceEntry> t) {
  Verdict v;
  v.outcome = o;
  v.trace = std::move(t);
  return v;
}

Verdict unsupported(std::string cond, std::string detail = {}) {
  return make(Outcome::Unsupported,
              {entry("precondition", std::move(cond), false, std::move(detail))});
}

long long betti_at(const std::vector<long long>& betti, long long j) {
  // Degrees above the listed range are zero: the compact piece has nonempty
  // boundary, so its top-degree cohomology vanishes.
  if (j < 0 || j >= static_cast<long long>(betti.size())) return 0;
  return betti[j];
}

std::string exponent_summary(const CohomologyQuery& q) {
  return "n = " + std::to_string(q.n) + ", k = " + std::to_string(q.k) + ", p = " + q.p.str() +
         ", q = " + q.q.str();
}

const AsymptoticCylinder* asymptotic(const CohomologyQuery& q) {
  return std::get_if<AsymptoticCylinder>(&q.context);
}

}  // namespace

std::optional<Verdict> check_preconditions(const CohomologyQuery& query) {
  if (query.n < 1) return unsupported("n >= 1", "n = " + std::to_string(query.n));
  if (!(query.p > Rational(1)) || !(query.q > Rational(1)))
    return unsupported("p > 1 and q > 1", "p = " + query.p.str() + ", q = " + query.q.str());
  if (query.flavor == Flavor::Interior) {
    if (!(query.q >= query.p))
      return unsupported("q >= p > 1 for interior cohomology",
                         "p = " + query.p.str() + ", q = " + query.q.str());
  } else if (!(query.p >= query.q)) {
    return unsupported("p >= q > 1 (only the case q <= p is considered)",
                       "p = " + query.p.str() + ", q = " + query.q.str());
  }
  // 1/p - 1/q <= 1/(n+1), cleared of denominators (automatic when p >= q).
  if (!((query.q - query.p) * Rational(query.n + 1) <= query.p * query.q))
    return unsupported("1/p - 1/q <= 1/(n+1)",
                       "p = " + query.p.str() + ", q = " + query.q.str() +
                           ", n+1 = " + std::to_string(query.n + 1));
  if (query.k < 0 || query.k > query.n + 1)
    return unsupported("0 <= k <= n+1 (form degrees on an (n+1)-manifold)",
                       "k = " + std::to_string(query.k));
  if (!(query.a < query.b)) return unsupported("a < b");
  if (const auto* ac = asymptotic(query)) {
    if (!ac->betti.empty() && static_cast<long long>(ac->betti.size()) != query.n + 1)
      return unsupported("betti list has length n+1",
                         "got " + std::to_string(ac->betti.size()) + ", n+1 = " +
                             std::to_string(query.n + 1));
    for (long long bj : ac->betti)
      if (bj < 0) return unsupported("betti numbers are nonnegative");
  }
  if (const auto* ch = std::get_if<CartanHadamard>(&query.context)) {
    if (ch->m < 2) return unsupported("m >= 2", "m = " + std::to_string(ch->m));
    if (query.flavor != Flavor::Absolute)
      return unsupported("the Cartan-Hadamard regime covers absolute cohomology only",
                         "flavor = " + to_string(query.flavor));
    if (query.n != ch->m - 1)
      return unsupported("Cartan-Hadamard context fixes n = m - 1",
                         "n = " + std::to_string(query.n) + ", m = " + std::to_string(ch->m));
  } else if (!query.model) {
    return unsupported("cylinder contexts need a warping model");
  }
  return std::nullopt;
}

Verdict decide_absolute(const CohomologyQuery& query, const DecisionConfig& cfg) {
  if (auto bad = check_preconditions(query)) return *bad;
  if (query.flavor != Flavor::Absolute)
    return unsupported("decide_absolute covers flavor = absolute",
                       "flavor = " + to_string(query.flavor));
  if (!std::holds_alternative<PureCylinder>(query.context))
    return unsupported("decide_absolute covers the pure-cylinder context");

  const WarpingModel& h = *query.model;
  const Rational np = Rational(query.n) / query.p;
  const bool middle = is_middle_dimension(query.n, query.k, query.p);
  const bool binf = std::isinf(query.b);
  std::vector<TraceEntry> t;

  t.push_back(entry("Theorem 5.4", "n/p is an integer, k = n/p, b = infinity", middle && binf,
                    "n/p = " + np.str() + ", k = " + std::to_string(query.k) +
                        (binf ? ", b = infinity" : ", b finite")));
  if (middle && binf) {
    t.push_back(cite("Theorem 5.4", kCite54));
    return make(Outcome::Vanishes, std::move(t));
  }

  try {
    auto I = classify_I(h, query.n, query.k, query.p, query.a, query.b, cfg.classifier);
    auto J = classify_J(h, query.n, query.k, query.p, query.a, query.b, cfg.delta0,
                        cfg.classifier);
    t.push_back(integral_entry("Theorem 5.1", "I_{a,b} = infinity", I, true));
    t.push_back(integral_entry("Theorem 5.1", "J_{delta0,b} = infinity", J, true));
    if (I.status == IntegralStatus::Diverges && J.status == IntegralStatus::Diverges) {
      t.push_back(cite("Theorem 5.1", kCite51));
      return make(Outcome::Vanishes, std::move(t));
    }
  } catch (const std::exception& e) {
    t.push_back(entry("Theorem 5.1", "criterion integrals evaluable", false, e.what()));
  }
  return make(Outcome::Inconclusive, std::move(t));
}

namespace {

/// Shared by the pure-cylinder and asymptotic relative deciders: the
/// integral conditions are identical, only the cited theorem differs.
Verdict decide_relative_core(const CohomologyQuery& query, const DecisionConfig& cfg,
                             const std::string& thm, const char* citation,
                             std::vector<TraceEntry> t) {
  const WarpingModel& h = *query.model;
  try {
    auto It = classify_I_tilde(h, query.n, query.k, query.p, query.a, query.b, cfg.classifier);
    auto A = classify_A(h, query.n, query.k, query.p, query.a, query.b, cfg.delta0,
                        cfg.classifier);
    t.push_back(integral_entry(thm, "I~_{a,b} = infinity", It, true));
    t.push_back(integral_entry(thm, "A_{delta0,b} < infinity", A, false));
    if (It.status == IntegralStatus::Diverges && A.status == IntegralStatus::Converges) {
      t.push_back(cite(thm, citation));
      return make(Outcome::Vanishes, std::move(t));
    }
  } catch (const std::exception& e) {
    t.push_back(entry(thm, "criterion integrals evaluable", false, e.what()));
  }
  return make(Outcome::Inconclusive, std::move(t));
}

}  // namespace

Verdict decide_relative(const CohomologyQuery& query, const DecisionConfig& cfg) {
  if (auto bad = check_preconditions(query)) return *bad;
  if (query.flavor != Flavor::RelativeToBase)
    return unsupported("decide_relative covers flavor = relative",
                       "flavor = " + to_string(query.flavor));
  if (!std::holds_alternative<PureCylinder>(query.context))
    return unsupported("decide_relative covers the pure-cylinder context");
  if (query.k < 1)
    return unsupported("the relative criteria need k >= 1", "k = " + std::to_string(query.k));

  const Rational np = Rational(query.n) / query.p;
  const bool deg = np.is_integer() && Rational(query.k) == np + Rational(1);
  const bool binf = std::isinf(query.b);
  std::vector<TraceEntry> t;

  t.push_back(entry("Theorem 5.7", "n/p is an integer, k = n/p + 1, b = infinity", deg && binf,
                    "n/p = " + np.str() + ", k = " + std::to_string(query.k) +
                        (binf ? ", b = infinity" : ", b finite")));
  if (deg && binf) {
    t.push_back(cite("Theorem 5.7", kCite57));
    return make(Outcome::Vanishes, std::move(t));
  }
  return decide_relative_core(query, cfg, "Theorem 5.6", kCite56, std::move(t));
}

Verdict decide_asymptotic_relative(const CohomologyQuery& query, const DecisionConfig& cfg) {
  if (auto bad = check_preconditions(query)) return *bad;
  if (query.flavor != Flavor::RelativeToBase)
    return unsupported("decide_asymptotic_relative covers flavor = relative",
                       "flavor = " + to_string(query.flavor));
  if (!asymptotic(query))
    return unsupported("decide_asymptotic_relative covers the asymptotic-cylinder context");
  if (query.k < 1)
    return unsupported("the relative criteria need k >= 1", "k = " + std::to_string(query.k));

  std::vector<TraceEntry> t;
  t.push_back(entry("Theorem 6.2", "envelope dimension n = dim(boundary of X)", true,
                    exponent_summary(query)));
  return decide_relative_core(query, cfg, "Theorem 6.2", kCite62, std::move(t));
}

Verdict decide_asymptotic_absolute(const CohomologyQuery& query, const DecisionConfig& cfg) {
  if (auto bad = check_preconditions(query)) return *bad;
  if (query.flavor != Flavor::Absolute)
    return unsupported("decide_asymptotic_absolute covers flavor = absolute",
                       "flavor = " + to_string(query.flavor));
  const auto* ac = asymptotic(query);
  if (!ac)
    return unsupported("decide_asymptotic_absolute covers the asymptotic-cylinder context");
  if (ac->betti.empty())
    return unsupported("Betti numbers of the compact piece are required",
                       "supply b_0..b_n of X");

  const Rational np = Rational(query.n) / query.p;
  const bool deg = np.is_integer() && Rational(query.k) == np + Rational(1);
  const bool binf = std::isinf(query.b);
  std::vector<TraceEntry> t;

  // Special case first: purely arithmetic, no integrals.
  long long b_np = 0, b_np1 = 0;
  bool topo67 = false;
  if (np.is_integer()) {
    long long np_int = static_cast<long long>(np.to_double());
    b_np = betti_at(ac->betti, np_int);
    b_np1 = betti_at(ac->betti, np_int + 1);
    topo67 = b_np == 0 && b_np1 == 0;
  }
  t.push_back(entry("Theorem 6.7", "n/p is an integer, k = n/p + 1, b = infinity", deg && binf,
                    "n/p = " + np.str() + ", k = " + std::to_string(query.k) +
                        (binf ? ", b = infinity" : ", b finite")));
  t.push_back(entry("Theorem 6.7", "H^{n/p}(X) = H^{n/p+1}(X) = 0", np.is_integer() && topo67,
                    np.is_integer() ? "betti[n/p] = " + std::to_string(b_np) +
                                          ", betti[n/p+1] = " + std::to_string(b_np1)
                                    : "n/p is not an integer"));
  if (deg && binf && topo67) {
    t.push_back(cite("Theorem 6.7", kCite67));
    return make(Outcome::Vanishes, std::move(t));
  }

  const long long bk = betti_at(ac->betti, query.k);
  t.push_back(entry("Theorem 6.6", "H^k(X) = 0", bk == 0,
                    "betti[" + std::to_string(query.k) + "] = " + std::to_string(bk)));
  if (query.k < 1) {
    t.push_back(entry("Theorem 6.6", "k >= 1 (the criterion integrals involve degree k - 1)",
                      false, "k = 0"));
    return make(Outcome::Inconclusive, std::move(t));
  }
  if (bk != 0) {
    // The integral conditions cannot rescue a nonzero H^k(X); record them
    // as unevaluated only through the topology failure.
    return make(Outcome::Inconclusive, std::move(t));
  }
  return decide_relative_core(query, cfg, "Theorem 6.6", kCite66, std::move(t));
}

Verdict decide_interior(const CohomologyQuery& query, const DecisionConfig& cfg) {
  (void)cfg;  // purely arithmetic: no integrals in the duality chain
  if (auto bad = check_preconditions(query)) return *bad;
  if (query.flavor != Flavor::Interior)
    return unsupported("decide_interior covers flavor = interior",
                       "flavor = " + to_string(query.flavor));
  const auto* ac = asymptotic(query);
  if (!ac)
    return unsupported("interior duality is stated for asymptotic twisted cylinders");
  if (ac->betti.empty())
    return unsupported("Betti numbers of the compact piece are required",
                       "supply b_0..b_n of X");

  const Rational np = Rational(query.n) / query.p;
  const Rational pc = conjugate_exponent(query.p);
  const Rational qc = conjugate_exponent(query.q);
  const bool binf = std::isinf(query.b);
  std::vector<TraceEntry> t;

  t.push_back(entry("Theorem 6.8", "dual exponents p' >= q' > 1", true,
                    "p' = " + pc.str() + ", q' = " + qc.str()));
  t.push_back(entry("Theorem 6.8", "n/p is an integer", np.is_integer(), "n/p = " + np.str()));
  t.push_back(entry("Theorem 6.8", "b = infinity", binf));
  if (np.is_integer()) {
    const long long np_int = static_cast<long long>(np.to_double());
    const bool deg = query.k == np_int;
    const long long b_lo = betti_at(ac->betti, np_int - 1);
    const long long b_mid = betti_at(ac->betti, np_int);
    t.push_back(entry("Theorem 6.8", "k = n/p", deg, "k = " + std::to_string(query.k) +
                                                         ", n/p = " + np.str()));
    t.push_back(entry("Theorem 6.8", "H^{n/p-1}(X) = H^{n/p}(X) = 0", b_lo == 0 && b_mid == 0,
                      "betti[n/p-1] = " + std::to_string(b_lo) +
                          ", betti[n/p] = " + std::to_string(b_mid)));
    if (deg && binf && b_lo == 0 && b_mid == 0) {
      t.push_back(cite("Theorem 6.8", kCite68));
      return make(Outcome::Vanishes, std::move(t));
    }

    if (query.p == query.q) {
      const long long b_hi = betti_at(ac->betti, np_int + 1);
      const bool deg9 = query.k == np_int || query.k == np_int + 1;
      t.push_back(entry("Corollary 6.9", "p = q and M complete (input assumption)", true,
                        "p = q = " + query.p.str()));
      t.push_back(entry("Corollary 6.9", "k = n/p or k = n/p + 1", deg9,
                        "k = " + std::to_string(query.k)));
      t.push_back(entry("Corollary 6.9", "H^{n/p}(X) = H^{n/p+1}(X) = 0",
                        b_mid == 0 && b_hi == 0,
                        "betti[n/p] = " + std::to_string(b_mid) +
                            ", betti[n/p+1] = " + std::to_string(b_hi)));
      if (deg9 && binf && b_mid == 0 && b_hi == 0) {
        t.push_back(cite("Corollary 6.9", kCite69));
        return make(Outcome::Vanishes, std::move(t));
      }
    }
  }
  return make(Outcome::Inconclusive, std::move(t));
}

Verdict decide_cartan_hadamard(long long m, const Rational& p, const Rational& q, long long k) {
  if (m < 2) return unsupported("m >= 2", "m = " + std::to_string(m));
  if (!(q > Rational(1)) || !(p >= q))
    return unsupported("p >= q > 1 (only the case q <= p is considered)",
                       "p = " + p.str() + ", q = " + q.str());

  const Rational mp = Rational(m - 1) / p;
  std::vector<TraceEntry> t;
  const bool main_clause = mp.is_integer() && Rational(k) == mp + Rational(1);
  t.push_back(entry("Proposition 6.10", "(m-1)/p is an integer and k = (m-1)/p + 1",
                    main_clause,
                    "(m-1)/p = " + mp.str() + ", k = " + std::to_string(k)));
  if (main_clause) {
    t.push_back(cite("Proposition 6.10", kCite610));
    return make(Outcome::Vanishes, std::move(t));
  }

  if (p == q) {
    const Rational pc = conjugate_exponent(p);
    const Rational mpc = Rational(m - 1) / pc;
    const bool dual = mpc.is_integer() && Rational(k) == mp;
    t.push_back(entry("Proposition 6.10",
                      "p = q, (m-1)/p' is an integer and k = (m-1)/p",
                      dual,
                      "(m-1)/p' = " + mpc.str() + ", (m-1)/p = " + mp.str() +
                          ", k = " + std::to_string(k)));
    if (dual) {
      t.push_back(cite("Proposition 6.10", kCite610Dual));
      return make(Outcome::Vanishes, std::move(t));
    }
  }
  return make(Outcome::Inconclusive, std::move(t));
}

namespace {

Verdict regime_preamble_error(long long n, long long k, const Rational& p, const Rational& q,
                              const Rational& s1, const Rational& s2, Flavor flavor,
                              bool* ok) {
  *ok = false;
  if (n < 1) return unsupported("n >= 1", "n = " + std::to_string(n));
  if (!(q > Rational(1)) || !(p >= q))
    return unsupported("p >= q > 1 (only the case q <= p is considered)",
                       "p = " + p.str() + ", q = " + q.str());
  if (s1 < Rational(0) || s2 < s1)
    return unsupported("s2 >= s1 >= 0", "s1 = " + s1.str() + ", s2 = " + s2.str());
  if (k < 0 || k > n + 1)
    return unsupported("0 <= k <= n+1 (form degrees on an (n+1)-manifold)",
                       "k = " + std::to_string(k));
  if (flavor == Flavor::Interior)
    return unsupported("regime tables cover the absolute and relative flavors");
  *ok = true;
  return {};
}

}  // namespace

Verdict decide_exp_regime(long long n, long long k, const Rational& p, const Rational& q,
                          const Rational& s1, const Rational& s2, Flavor flavor) {
  bool ok = false;
  Verdict bad = regime_preamble_error(n, k, p, q, s1, s2, flavor, &ok);
  if (!ok) return bad;

  const Rational np = Rational(n) / p;
  const Rational kr(k);
  const std::string rates = "s1 = " + s1.str() + ", s2 = " + s2.str();
  std::vector<TraceEntry> t;

  if (flavor == Flavor::Absolute) {
    const bool c1a = kr == np;
    t.push_back(entry("Proposition 7.1", "(1a) k = n/p", c1a,
                      "n/p = " + np.str() + ", k = " + std::to_string(k)));
    if (c1a) {
      t.push_back(cite("Proposition 7.1", kCiteRegimeAbs));
      return make(Outcome::Vanishes, std::move(t));
    }
    const bool c1b = s1 == s2 && kr < np;
    t.push_back(entry("Proposition 7.1", "(1b) s1 = s2 and k < n/p", c1b, rates));
    if (c1b) {
      t.push_back(cite("Proposition 7.1", kCiteRegimeAbs));
      return make(Outcome::Vanishes, std::move(t));
    }
  } else {
    const bool c2a = kr == np + Rational(1);
    t.push_back(entry("Proposition 7.1", "(2a) k = n/p + 1", c2a,
                      "n/p + 1 = " + (np + Rational(1)).str() + ", k = " + std::to_string(k)));
    if (c2a) {
      t.push_back(cite("Proposition 7.1", kCiteRegimeRel));
      return make(Outcome::Vanishes, std::move(t));
    }
    bool c2b = false;
    std::string detail = rates;
    if (s1 == s2 && s1 > Rational(0)) {
      const Rational threshold = np + Rational(1) + Rational(1) / (p * conjugate_exponent(p) * s1);
      c2b = kr > threshold;
      detail += ", n/p + 1 + 1/(p p' s) = " + threshold.str();
    }
    t.push_back(entry("Proposition 7.1", "(2b) s1 = s2 = s > 0 and k > n/p + 1 + 1/(p p' s)",
                      c2b, detail));
    if (c2b) {
      t.push_back(cite("Proposition 7.1", kCiteRegimeRel));
      return make(Outcome::Vanishes, std::move(t));
    }
  }
  return make(Outcome::Inconclusive, std::move(t));
}

Verdict decide_power_regime(long long n, long long k, const Rational& p, const Rational& q,
                            const Rational& s1, const Rational& s2, Flavor flavor) {
  bool ok = false;
  Verdict bad = regime_preamble_error(n, k, p, q, s1, s2, flavor, &ok);
  if (!ok) return bad;

  const Rational np = Rational(n) / p;
  const Rational kr(k);
  const std::string rates = "s1 = " + s1.str() + ", s2 = " + s2.str();
  std::vector<TraceEntry> t;

  if (flavor == Flavor::Absolute) {
    const bool c1a = kr == np;
    t.push_back(entry("Proposition 7.2", "(1a) k = n/p", c1a,
                      "n/p = " + np.str() + ", k = " + std::to_string(k)));
    if (c1a) {
      t.push_back(cite("Proposition 7.2", kCiteRegimeAbs));
      return make(Outcome::Vanishes, std::move(t));
    }
    const bool c1b = s1 == s2 && kr < np;
    t.push_back(entry("Proposition 7.2", "(1b) s1 = s2 and k < n/p", c1b, rates));
    if (c1b) {
      t.push_back(cite("Proposition 7.2", kCiteRegimeAbs));
      return make(Outcome::Vanishes, std::move(t));
    }
    bool c1c = false;
    std::string detail = rates;
    if (s1 == s2 && s1 > Rational(0)) {
      const Rational hi = np + Rational(1) / (p * s1);
      c1c = np < kr && kr <= hi;
      detail += ", n/p + 1/(p s1) = " + hi.str();
    }
    t.push_back(entry("Proposition 7.2", "(1c) s1 = s2 > 0 and n/p < k <= n/p + 1/(p s1)",
                      c1c, detail));
    if (c1c) {
      t.push_back(cite("Proposition 7.2", kCiteRegimeAbs));
      return make(Outcome::Vanishes, std::move(t));
    }
  } else {
    bool c2a = false;
    std::string detail = rates;
    if (s1 == s2 && s1 > Rational(0)) {
      const Rational lo = np + Rational(1) - Rational(1) / (conjugate_exponent(p) * s1);
      c2a = lo <= kr && kr <= np + Rational(1);
      detail += ", n/p + 1 - 1/(p' s1) = " + lo.str();
    }
    t.push_back(entry("Proposition 7.2",
                      "(2a) s1 = s2 > 0 and n/p + 1 - 1/(p' s1) <= k <= n/p + 1", c2a, detail));
    if (c2a) {
      t.push_back(cite("Proposition 7.2", kCiteRegimeRel));
      return make(Outcome::Vanishes, std::move(t));
    }
    const bool c2b = kr == np + Rational(1);
    t.push_back(entry("Proposition 7.2", "(2b) k = n/p + 1", c2b,
                      "n/p + 1 = " + (np + Rational(1)).str() + ", k = " + std::to_string(k)));
    if (c2b) {
      t.push_back(cite("Proposition 7.2", kCiteRegimeRel));
      return make(Outcome::Vanishes, std::move(t));
    }
  }
  return make(Outcome::Inconclusive, std::move(t));
}

Verdict analyze(const CohomologyQuery& query, const DecisionConfig& cfg) {
  if (auto bad = check_preconditions(query)) return *bad;

  if (const auto* ch = std::get_if<CartanHadamard>(&query.context))
    return decide_cartan_hadamard(ch->m, query.p, query.q, query.k);

  if (query.flavor == Flavor::Interior) return decide_interior(query, cfg);

  if (std::holds_alternative<PureCylinder>(query.context)) {
    const WarpingModel& h = *query.model;
    const bool binf = std::isinf(query.b);
    if (h.kind() == WarpingModel::Kind::ExpBounded && binf && query.a >= 0.0)
      return decide_exp_regime(query.n, query.k, query.p, query.q, h.s1(), h.s2(),
                               query.flavor);
    if (h.kind() == WarpingModel::Kind::PowerBounded && binf && query.a >= 1.0)
      return decide_power_regime(query.n, query.k, query.p, query.q, h.s1(), h.s2(),
                                 query.flavor);
    return query.flavor == Flavor::Absolute ? decide_absolute(query, cfg)
                                            : decide_relative(query, cfg);
  }
  return query.flavor == Flavor::Absolute ? decide_asymptotic_absolute(query, cfg)
                                          : decide_asymptotic_relative(query, cfg);
}

}  // namespace lqp
