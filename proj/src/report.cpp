#include "lqp/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "lqp/grid_forms.hpp"
#include "lqp/integrals.hpp"
#include "lqp/warping.hpp"

namespace lqp {
namespace {

constexpr const char* kToolName = "lqpc";
constexpr const char* kToolVersion = "1.0.0";
constexpr double kInf = std::numeric_limits<double>::infinity();

// Lab defaults; every value here is surfaced by defaults_json().
constexpr long long kHomotopyCount = 5;
constexpr long long kIneqCount = 1000;
constexpr long long kNormsCount = 100;
constexpr long long kDdzeroCount = 100;
constexpr double kOrderMin = 1.8;
constexpr double kResidualMax = 1e-3;
constexpr double kDdTol = 1e-10;
constexpr double kNormRelTol = 1e-12;

[[noreturn]] void bad_config(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

// ---------------------------------------------------------------------------
// Worker pool: items are identified by index and write only their own slot,
// so scheduling order never shows in the output.
// ---------------------------------------------------------------------------

long long thread_count() {
  if (const char* env = std::getenv("LQP_THREADS")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0' && v >= 1) return std::min<long long>(v, 256);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<long long>(hc);
}

void parallel_for(long long count, const std::function<void(long long)>& fn) {
  const long long workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (long long w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const long long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

void check_keys(const OrderedJson& obj, const std::vector<std::string>& allowed,
                const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad_config(path + "." + it.key(), "unknown field");
  }
}

Rational parse_rational(const OrderedJson& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const std::exception& e) {
      bad_config(path, std::string("not a rational: ") + e.what());
    }
  }
  bad_config(path, "expected an integer or a \"num/den\" string");
}

double parse_bound(const OrderedJson& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    bad_config(path, "expected a number or \"inf\"");
  }
  bad_config(path, "expected a number or \"inf\"");
}

Interval parse_interval(const OrderedJson& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) bad_config(path, "expected [start, end]");
  Interval iv;
  iv.a = parse_bound(j[0], path + "[0]");
  iv.b = parse_bound(j[1], path + "[1]");
  if (!(iv.a < iv.b)) bad_config(path, "needs start < end");
  return iv;
}

OrderedJson bound_json(double v) {
  if (std::isinf(v)) return OrderedJson("inf");
  return OrderedJson(v);
}

/// Builds the model and a normalized echo of its declaration.
std::pair<WarpingModel, OrderedJson> parse_model(const OrderedJson& j, const std::string& path) {
  if (!j.is_object()) bad_config(path, "expected an object");
  if (!j.contains("kind")) bad_config(path + ".kind", "missing");
  const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  OrderedJson echo;
  echo["kind"] = kind;
  try {
    if (kind == "separable") {
      check_keys(j, {"kind", "family", "value", "coef", "exponent", "rate", "interval"}, path);
      if (!j.contains("family")) bad_config(path + ".family", "missing");
      const std::string family = j["family"].get<std::string>();
      echo["family"] = family;
      const Interval iv = j.contains("interval")
                              ? parse_interval(j["interval"], path + ".interval")
                              : Interval{};
      SeparableExpr expr;
      if (family == "constant") {
        const double v = j.contains("value") ? j["value"].get<double>() : 1.0;
        expr = ConstantExpr{v};
        echo["value"] = v;
      } else if (family == "power") {
        const double c = j.contains("coef") ? j["coef"].get<double>() : 1.0;
        if (!j.contains("exponent")) bad_config(path + ".exponent", "missing");
        const Rational e = parse_rational(j["exponent"], path + ".exponent");
        expr = PowerExpr{c, e};
        echo["coef"] = c;
        echo["exponent"] = e.str();
      } else if (family == "exp") {
        const double c = j.contains("coef") ? j["coef"].get<double>() : 1.0;
        if (!j.contains("rate")) bad_config(path + ".rate", "missing");
        const Rational r = parse_rational(j["rate"], path + ".rate");
        expr = ExpExpr{c, r};
        echo["coef"] = c;
        echo["rate"] = r.str();
      } else {
        bad_config(path + ".family", "expected constant, power or exp");
      }
      echo["interval"] = OrderedJson::array({bound_json(iv.a), bound_json(iv.b)});
      return {WarpingModel::separable(expr, iv), echo};
    }
    if (kind == "exp_bounded" || kind == "power_bounded") {
      check_keys(j, {"kind", "c1", "s1", "c2", "s2", "interval"}, path);
      const double c1 = j.contains("c1") ? j["c1"].get<double>() : 1.0;
      const double c2 = j.contains("c2") ? j["c2"].get<double>() : 1.0;
      if (!j.contains("s1")) bad_config(path + ".s1", "missing");
      if (!j.contains("s2")) bad_config(path + ".s2", "missing");
      const Rational s1 = parse_rational(j["s1"], path + ".s1");
      const Rational s2 = parse_rational(j["s2"], path + ".s2");
      const Interval iv = j.contains("interval")
                              ? parse_interval(j["interval"], path + ".interval")
                              : Interval{kind == "power_bounded" ? 1.0 : 0.0, kInf};
      echo["c1"] = c1;
      echo["s1"] = s1.str();
      echo["c2"] = c2;
      echo["s2"] = s2.str();
      echo["interval"] = OrderedJson::array({bound_json(iv.a), bound_json(iv.b)});
      return {kind == "exp_bounded" ? WarpingModel::exp_bounded(c1, s1, c2, s2, iv)
                                    : WarpingModel::power_bounded(c1, s1, c2, s2, iv),
              echo};
    }
    if (kind == "grid_sampled") {
      check_keys(j, {"kind", "t_nodes", "values"}, path);
      if (!j.contains("t_nodes") || !j["t_nodes"].is_array())
        bad_config(path + ".t_nodes", "expected an array of numbers");
      if (!j.contains("values") || !j["values"].is_array())
        bad_config(path + ".values", "expected an array of per-node sample arrays");
      std::vector<double> tn;
      for (const auto& v : j["t_nodes"]) tn.push_back(v.get<double>());
      std::vector<std::vector<double>> vals;
      for (const auto& row : j["values"]) {
        if (!row.is_array()) bad_config(path + ".values", "expected arrays of samples");
        std::vector<double> r;
        for (const auto& v : row) r.push_back(v.get<double>());
        vals.push_back(std::move(r));
      }
      echo["t_nodes"] = j["t_nodes"];
      echo["values"] = j["values"];
      return {WarpingModel::grid_sampled(std::move(tn), std::move(vals)), echo};
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    bad_config(path, e.what());
  }
  bad_config(path + ".kind", "expected separable, exp_bounded, power_bounded or grid_sampled");
}

Flavor parse_flavor(const OrderedJson& j, const std::string& path) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "absolute") return Flavor::Absolute;
  if (s == "relative") return Flavor::RelativeToBase;
  if (s == "interior") return Flavor::Interior;
  bad_config(path, "expected absolute, relative or interior");
}

struct ParsedQuery {
  CohomologyQuery query;
  OrderedJson echo;
};

ParsedQuery parse_query(const OrderedJson& j, const std::string& path,
                        const std::map<std::string, WarpingModel>& models) {
  if (!j.is_object()) bad_config(path, "expected an object");
  check_keys(j, {"n", "k", "p", "q", "a", "b", "flavor", "context", "model"}, path);
  CohomologyQuery q;

  // Context first: Cartan-Hadamard queries take no model and fix n = m - 1.
  std::string context_kind = "pure";
  if (j.contains("context")) {
    const auto& c = j["context"];
    if (c.is_string()) {
      if (c.get<std::string>() != "pure") bad_config(path + ".context", "unknown context");
    } else if (c.is_object()) {
      if (!c.contains("type")) bad_config(path + ".context.type", "missing");
      const std::string type = c["type"].get<std::string>();
      if (type == "asymptotic") {
        check_keys(c, {"type", "betti"}, path + ".context");
        AsymptoticCylinder ac;
        if (c.contains("betti")) {
          if (!c["betti"].is_array()) bad_config(path + ".context.betti", "expected an array");
          for (const auto& b : c["betti"]) ac.betti.push_back(b.get<long long>());
        }
        q.context = std::move(ac);
        context_kind = "asymptotic";
      } else if (type == "cartan-hadamard" || type == "cartan_hadamard") {
        check_keys(c, {"type", "m"}, path + ".context");
        if (!c.contains("m")) bad_config(path + ".context.m", "missing");
        q.context = CartanHadamard{c["m"].get<long long>()};
        context_kind = "cartan-hadamard";
      } else {
        bad_config(path + ".context.type", "expected asymptotic or cartan-hadamard");
      }
    } else {
      bad_config(path + ".context", "expected \"pure\" or an object");
    }
  }

  const auto* ch = std::get_if<CartanHadamard>(&q.context);
  if (j.contains("n"))
    q.n = j["n"].get<long long>();
  else if (ch)
    q.n = ch->m - 1;
  else
    bad_config(path + ".n", "missing");
  if (!j.contains("k")) bad_config(path + ".k", "missing");
  q.k = j["k"].get<long long>();
  if (!j.contains("p")) bad_config(path + ".p", "missing");
  q.p = parse_rational(j["p"], path + ".p");
  q.q = j.contains("q") ? parse_rational(j["q"], path + ".q") : q.p;
  if (j.contains("flavor")) q.flavor = parse_flavor(j["flavor"], path + ".flavor");

  std::string model_name;
  if (!ch) {
    if (!j.contains("model")) bad_config(path + ".model", "cylinder queries need a model name");
    if (!j["model"].is_string()) bad_config(path + ".model", "expected a model name");
    model_name = j["model"].get<std::string>();
    const auto it = models.find(model_name);
    if (it == models.end()) bad_config(path + ".model", "undeclared model '" + model_name + "'");
    q.model = it->second;
    q.a = j.contains("a") ? parse_bound(j["a"], path + ".a") : q.model->interval().a;
    q.b = j.contains("b") ? parse_bound(j["b"], path + ".b") : q.model->interval().b;
  } else {
    q.a = j.contains("a") ? parse_bound(j["a"], path + ".a") : 0.0;
    q.b = j.contains("b") ? parse_bound(j["b"], path + ".b") : kInf;
  }

  OrderedJson echo;
  echo["flavor"] = to_string(q.flavor);
  echo["n"] = q.n;
  echo["k"] = q.k;
  echo["p"] = q.p.str();
  echo["q"] = q.q.str();
  echo["a"] = bound_json(q.a);
  echo["b"] = bound_json(q.b);
  if (context_kind == "pure") {
    echo["context"] = "pure";
  } else if (context_kind == "asymptotic") {
    OrderedJson c;
    c["type"] = "asymptotic";
    c["betti"] = std::get<AsymptoticCylinder>(q.context).betti;
    echo["context"] = c;
  } else {
    OrderedJson c;
    c["type"] = "cartan-hadamard";
    c["m"] = std::get<CartanHadamard>(q.context).m;
    echo["context"] = c;
  }
  if (!model_name.empty()) echo["model"] = model_name;
  return {std::move(q), std::move(echo)};
}

struct ParsedConfig {
  std::map<std::string, WarpingModel> models;
  std::vector<ParsedQuery> queries;
  DecisionConfig decision;
  OrderedJson echo;
};

ParsedConfig parse_config(const OrderedJson& j) {
  if (!j.is_object()) throw ConfigError("config error: top level must be an object");
  check_keys(j, {"models", "classifier", "queries", "lab"}, "config");
  ParsedConfig out;
  OrderedJson models_echo = OrderedJson::object();
  if (j.contains("models")) {
    if (!j["models"].is_object()) bad_config("config.models", "expected an object");
    for (auto it = j["models"].begin(); it != j["models"].end(); ++it) {
      auto [model, echo] = parse_model(it.value(), "config.models." + it.key());
      out.models.emplace(it.key(), std::move(model));
      models_echo[it.key()] = std::move(echo);
    }
  }
  ClassifierConfig cc;
  std::optional<double> delta0;
  if (j.contains("classifier")) {
    const auto& c = j["classifier"];
    if (!c.is_object()) bad_config("config.classifier", "expected an object");
    check_keys(c,
               {"divergence_ceiling", "epsilon_tail", "max_cutoffs", "initial_step",
                "panel_rel_tol", "delta0"},
               "config.classifier");
    if (c.contains("divergence_ceiling")) cc.divergence_ceiling = c["divergence_ceiling"].get<double>();
    if (c.contains("epsilon_tail")) cc.epsilon_tail = c["epsilon_tail"].get<double>();
    if (c.contains("max_cutoffs")) cc.max_cutoffs = c["max_cutoffs"].get<long long>();
    if (c.contains("initial_step")) cc.initial_step = c["initial_step"].get<double>();
    if (c.contains("panel_rel_tol")) cc.panel_rel_tol = c["panel_rel_tol"].get<double>();
    if (c.contains("delta0") && !c["delta0"].is_null()) delta0 = c["delta0"].get<double>();
    if (!(cc.divergence_ceiling > 0.0)) bad_config("config.classifier.divergence_ceiling", "must be positive");
    if (!(cc.epsilon_tail > 0.0)) bad_config("config.classifier.epsilon_tail", "must be positive");
    if (cc.max_cutoffs < 4) bad_config("config.classifier.max_cutoffs", "must be at least 4");
    if (!(cc.initial_step > 0.0)) bad_config("config.classifier.initial_step", "must be positive");
    if (!(cc.panel_rel_tol > 0.0)) bad_config("config.classifier.panel_rel_tol", "must be positive");
    if (delta0 && !std::isfinite(*delta0)) bad_config("config.classifier.delta0", "must be finite");
  }
  out.decision.classifier = cc;
  out.decision.delta0 = delta0;

  if (j.contains("queries")) {
    if (!j["queries"].is_array()) bad_config("config.queries", "expected an array");
    long long i = 0;
    for (const auto& qj : j["queries"]) {
      out.queries.push_back(parse_query(qj, "config.queries[" + std::to_string(i) + "]", out.models));
      ++i;
    }
  }

  OrderedJson classifier_echo;
  classifier_echo["divergence_ceiling"] = cc.divergence_ceiling;
  classifier_echo["epsilon_tail"] = cc.epsilon_tail;
  classifier_echo["max_cutoffs"] = cc.max_cutoffs;
  classifier_echo["initial_step"] = cc.initial_step;
  classifier_echo["panel_rel_tol"] = cc.panel_rel_tol;
  classifier_echo["delta0"] = delta0 ? OrderedJson(*delta0) : OrderedJson(nullptr);

  out.echo["models"] = std::move(models_echo);
  out.echo["classifier"] = std::move(classifier_echo);
  OrderedJson queries_echo = OrderedJson::array();
  for (const auto& pq : out.queries) queries_echo.push_back(pq.echo);
  out.echo["queries"] = std::move(queries_echo);
  if (j.contains("lab")) out.echo["lab"] = j["lab"];
  return out;
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

OrderedJson report_header(const std::string& mode) {
  OrderedJson r;
  r["tool"] = OrderedJson{{"name", kToolName}, {"version", kToolVersion}};
  r["mode"] = mode;
  r["defaults"] = defaults_json();
  return r;
}

OrderedJson trace_entry_json(const TraceEntry& e) {
  OrderedJson o;
  o["theorem"] = e.theorem;
  o["condition"] = e.condition;
  o["satisfied"] = e.satisfied;
  o["detail"] = e.detail;
  if (e.value) o["value"] = *e.value;
  if (e.error_bound) o["error_bound"] = *e.error_bound;
  if (!e.citation.empty()) o["citation"] = e.citation;
  return o;
}

OrderedJson verdict_json(const Verdict& v) {
  OrderedJson o;
  o["outcome"] = to_string(v.outcome);
  const std::string thm = v.theorem();
  o["theorem"] = thm.empty() ? OrderedJson(nullptr) : OrderedJson(thm);
  OrderedJson t = OrderedJson::array();
  for (const auto& e : v.trace) t.push_back(trace_entry_json(e));
  o["trace"] = std::move(t);
  return o;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

/// The short "(1a)"-style tag of the case a regime verdict fired on.
std::string fired_case(const Verdict& v) {
  if (v.outcome != Outcome::Vanishes) return "";
  for (const auto& e : v.trace) {
    if (!e.satisfied || e.condition.empty() || e.condition[0] != '(') continue;
    const auto sp = e.condition.find(' ');
    return sp == std::string::npos ? e.condition : e.condition.substr(0, sp);
  }
  return "";
}

// ---------------------------------------------------------------------------
// Regime-table self check: the case lists, transliterated directly.
// ---------------------------------------------------------------------------

struct ExpectedCase {
  Outcome outcome = Outcome::Inconclusive;
  std::string label;
};

ExpectedCase expected_exp(long long n, long long k, const Rational& p, const Rational& s1,
                          const Rational& s2, Flavor flavor) {
  const Rational np = Rational(n) / p;
  const Rational kr(k);
  if (flavor == Flavor::Absolute) {
    if (kr == np) return {Outcome::Vanishes, "(1a)"};
    if (s1 == s2 && kr < np) return {Outcome::Vanishes, "(1b)"};
  } else {
    if (kr == np + Rational(1)) return {Outcome::Vanishes, "(2a)"};
    if (s1 == s2 && s1 > Rational(0) &&
        kr > np + Rational(1) + Rational(1) / (p * conjugate_exponent(p) * s1))
      return {Outcome::Vanishes, "(2b)"};
  }
  return {};
}

ExpectedCase expected_power(long long n, long long k, const Rational& p, const Rational& s1,
                            const Rational& s2, Flavor flavor) {
  const Rational np = Rational(n) / p;
  const Rational kr(k);
  if (flavor == Flavor::Absolute) {
    if (kr == np) return {Outcome::Vanishes, "(1a)"};
    if (s1 == s2 && kr < np) return {Outcome::Vanishes, "(1b)"};
    if (s1 == s2 && s1 > Rational(0) && np < kr && kr <= np + Rational(1) / (p * s1))
      return {Outcome::Vanishes, "(1c)"};
  } else {
    if (s1 == s2 && s1 > Rational(0) &&
        np + Rational(1) - Rational(1) / (conjugate_exponent(p) * s1) <= kr &&
        kr <= np + Rational(1))
      return {Outcome::Vanishes, "(2a)"};
    if (kr == np + Rational(1)) return {Outcome::Vanishes, "(2b)"};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Lab cylinders and fits
// ---------------------------------------------------------------------------

std::shared_ptr<const DiscreteCylinder> lab_cylinder(long long n, long long Nt, long long Nx,
                                                     int shape) {
  auto h = [shape](double t, const std::vector<double>& x) {
    if (shape == 0) return 1.0 + 0.25 * std::sin(x[0]) + 0.1 * t;
    return std::exp(0.2 * t) * (1.0 + 0.2 * std::cos(x[0]));
  };
  return std::make_shared<DiscreteCylinder>(
      DiscreteCylinder::build(0.0, 1.0 + (shape == 1 ? 1.0 : 0.0), Nt, n, Nx, h));
}

/// Least-squares slope of log2(residual) against log2(grid); the order is
/// its negative.
double fitted_order(const std::vector<long long>& grids, const std::vector<double>& residuals) {
  const size_t m = grids.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    const double x = std::log2(static_cast<double>(grids[i]));
    const double y = std::log2(std::max(residuals[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return -(m * sxy - sx * sy) / denom;
}

}  // namespace

OrderedJson defaults_json() {
  OrderedJson d;
  ClassifierConfig cc;
  OrderedJson classifier;
  classifier["divergence_ceiling"] = cc.divergence_ceiling;
  classifier["epsilon_tail"] = cc.epsilon_tail;
  classifier["max_cutoffs"] = cc.max_cutoffs;
  classifier["initial_step"] = cc.initial_step;
  classifier["panel_rel_tol"] = cc.panel_rel_tol;
  classifier["delta0"] = nullptr;
  d["classifier"] = classifier;

  OrderedJson query;
  query["q"] = "p";
  query["a"] = "model interval start";
  query["b"] = "model interval end";
  query["flavor"] = "absolute";
  query["context"] = "pure";
  d["query"] = query;

  OrderedJson table;
  table["nmax"] = 6;
  table["p_values"] = OrderedJson::array({"3/2", "2", "3"});
  table["rates"] = OrderedJson::array({"1", "2", "3"});
  d["table"] = table;

  OrderedJson lab;
  lab["grids"] = OrderedJson::array({32, 64, 128});
  lab["seed"] = 1;
  lab["eps_disc"] = 0.02;
  lab["count"] = OrderedJson{{"homotopy", kHomotopyCount},
                             {"ineq", kIneqCount},
                             {"norms", kNormsCount},
                             {"ddzero", kDdzeroCount}};
  lab["order_min"] = kOrderMin;
  lab["residual_max"] = kResidualMax;
  lab["dd_tol"] = kDdTol;
  lab["norm_rel_tol"] = kNormRelTol;
  d["lab"] = lab;

  OrderedJson threads;
  threads["env"] = "LQP_THREADS";
  threads["default"] = "hardware concurrency";
  d["threads"] = threads;
  return d;
}

RunResult run_analyze(const OrderedJson& config) {
  const ParsedConfig parsed = parse_config(config);
  const long long count = static_cast<long long>(parsed.queries.size());
  std::vector<Verdict> verdicts(static_cast<size_t>(count));
  parallel_for(count, [&](long long i) {
    verdicts[static_cast<size_t>(i)] =
        analyze(parsed.queries[static_cast<size_t>(i)].query, parsed.decision);
  });

  OrderedJson report = report_header("analyze");
  report["config"] = parsed.echo;
  OrderedJson rows = OrderedJson::array();
  long long vanish = 0, inconclusive = 0, unsupported = 0;
  std::ostringstream text;
  for (long long i = 0; i < count; ++i) {
    const auto& pq = parsed.queries[static_cast<size_t>(i)];
    const auto& v = verdicts[static_cast<size_t>(i)];
    OrderedJson row;
    row["index"] = i;
    row["query"] = pq.echo;
    row["verdict"] = verdict_json(v);
    rows.push_back(std::move(row));
    switch (v.outcome) {
      case Outcome::Vanishes: ++vanish; break;
      case Outcome::Inconclusive: ++inconclusive; break;
      case Outcome::Unsupported: ++unsupported; break;
    }
    text << "query " << i << ": " << pq.echo["flavor"].get<std::string>() << " n="
         << pq.query.n << " k=" << pq.query.k << " p=" << pq.query.p.str() << " q="
         << pq.query.q.str() << " -> " << to_string(v.outcome);
    if (!v.theorem().empty()) text << " (" << v.theorem() << ")";
    text << "\n";
  }
  report["queries"] = std::move(rows);
  report["summary"] = OrderedJson{
      {"vanishes", vanish}, {"inconclusive", inconclusive}, {"unsupported", unsupported}};
  text << "summary: vanishes=" << vanish << " inconclusive=" << inconclusive
       << " unsupported=" << unsupported << "\n";

  RunResult out;
  out.report = std::move(report);
  out.text = text.str();
  out.exit_code = unsupported > 0 ? 2 : 0;
  return out;
}

RunResult run_analyze_text(const std::string& config_text) {
  OrderedJson config;
  try {
    config = OrderedJson::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return run_analyze(config);
}

RunResult run_table(const std::string& family, long long nmax,
                    const std::vector<Rational>& rates) {
  if (family != "exp" && family != "power")
    throw ConfigError("config error at table.family: expected exp or power");
  const bool exp_family = family == "exp";
  const std::vector<Rational> ps = {Rational(3, 2), Rational(2), Rational(3)};
  const Flavor flavors[2] = {Flavor::Absolute, Flavor::RelativeToBase};

  OrderedJson rows = OrderedJson::array();
  std::ostringstream text;
  long long mismatches = 0, row_count = 0;
  for (long long n = 1; n <= nmax; ++n)
    for (const Rational& p : ps)
      for (long long k = 0; k <= n + 1; ++k)
        for (size_t i = 0; i < rates.size(); ++i)
          for (size_t jj = i; jj < rates.size(); ++jj)
            for (const Flavor flavor : flavors) {
              const Rational& s1 = rates[i];
              const Rational& s2 = rates[jj];
              const Verdict v = exp_family
                                    ? decide_exp_regime(n, k, p, p, s1, s2, flavor)
                                    : decide_power_regime(n, k, p, p, s1, s2, flavor);
              const ExpectedCase expect = exp_family ? expected_exp(n, k, p, s1, s2, flavor)
                                                     : expected_power(n, k, p, s1, s2, flavor);
              const std::string label = fired_case(v);
              const bool match = v.outcome == expect.outcome && label == expect.label;
              if (!match) ++mismatches;
              ++row_count;
              OrderedJson row;
              row["n"] = n;
              row["k"] = k;
              row["p"] = p.str();
              row["s1"] = s1.str();
              row["s2"] = s2.str();
              row["flavor"] = to_string(flavor);
              row["outcome"] = to_string(v.outcome);
              row["case"] = label;
              row["match"] = match;
              rows.push_back(std::move(row));
              text << "n=" << n << " k=" << k << " p=" << p.str() << " s1=" << s1.str()
                   << " s2=" << s2.str() << " flavor=" << to_string(flavor)
                   << " outcome=" << to_string(v.outcome)
                   << " case=" << (label.empty() ? "-" : label) << "\n";
            }
  text << "self-check: rows=" << row_count << " mismatches=" << mismatches << "\n";

  OrderedJson report = report_header("table");
  report["family"] = family;
  report["sweep"] = OrderedJson{{"nmax", nmax}, {"p_values", OrderedJson::array({"3/2", "2", "3"})}};
  OrderedJson rates_echo = OrderedJson::array();
  for (const auto& r : rates) rates_echo.push_back(r.str());
  report["sweep"]["rates"] = std::move(rates_echo);
  report["rows"] = std::move(rows);
  report["self_check"] = OrderedJson{{"rows", row_count}, {"mismatches", mismatches}};

  RunResult out;
  out.report = std::move(report);
  out.text = text.str();
  out.exit_code = mismatches > 0 ? 3 : 0;
  return out;
}

namespace {

RunResult lab_homotopy(const LabSettings& s) {
  const long long count = s.count > 0 ? s.count : kHomotopyCount;
  std::vector<double> base_res(s.grids.size(), 0.0), cyl_res(s.grids.size(), 0.0);
  for (size_t gi = 0; gi < s.grids.size(); ++gi) {
    const long long g = s.grids[gi];
    auto cyl = lab_cylinder(1, g, g, 0);
    for (long long i = 0; i < count; ++i) {
      const DiscreteForm f = random_trig_form(cyl, 1, s.seed + static_cast<std::uint64_t>(i));
      base_res[gi] = std::max(base_res[gi], check_homotopy_base(f, cyl->a, cyl->T));
      cyl_res[gi] = std::max(cyl_res[gi], check_homotopy_cylinder(f, cyl->a));
    }
  }
  const double order_base = fitted_order(s.grids, base_res);
  const double order_cyl = fitted_order(s.grids, cyl_res);
  const bool pass = order_base >= kOrderMin && order_cyl >= kOrderMin &&
                    base_res.back() < kResidualMax && cyl_res.back() < kResidualMax;

  OrderedJson report = report_header("lab");
  report["check"] = "homotopy";
  report["settings"] = OrderedJson{{"grids", s.grids}, {"count", count}, {"seed", s.seed}};
  OrderedJson rows = OrderedJson::array();
  std::ostringstream text;
  text << "lab homotopy: seed=" << s.seed << " count=" << count << "\n";
  for (size_t gi = 0; gi < s.grids.size(); ++gi) {
    rows.push_back(OrderedJson{
        {"grid", s.grids[gi]}, {"base", base_res[gi]}, {"cylinder", cyl_res[gi]}});
    text << "grid=" << s.grids[gi] << " base=" << fmt("%.3e", base_res[gi])
         << " cylinder=" << fmt("%.3e", cyl_res[gi]) << "\n";
  }
  report["residuals"] = std::move(rows);
  report["fit"] = OrderedJson{{"base_order", order_base}, {"cylinder_order", order_cyl}};
  report["thresholds"] = OrderedJson{{"order_min", kOrderMin}, {"residual_max", kResidualMax}};
  report["pass"] = pass;
  text << "fit: base_order=" << fmt("%.2f", order_base)
       << " cylinder_order=" << fmt("%.2f", order_cyl) << "\n";
  text << "pass: " << (pass ? "yes" : "no") << "\n";
  return {std::move(report), text.str(), pass ? 0 : 3};
}

RunResult lab_ineq(const LabSettings& s) {
  const long long count = s.count > 0 ? s.count : kIneqCount;
  // Two torus dimensions, two warping shapes, three exponent pairs, degrees
  // cycling over 1..n+1 and three endpoint windows.
  std::vector<std::shared_ptr<const DiscreteCylinder>> cyls = {
      lab_cylinder(1, 128, 64, 0), lab_cylinder(1, 128, 64, 1),
      lab_cylinder(2, 128, 12, 0), lab_cylinder(2, 128, 12, 1)};
  const std::pair<Rational, Rational> pq[3] = {{Rational(2), Rational(2)},
                                               {Rational(3), Rational(2)},
                                               {Rational(2), Rational(3, 2)}};
  std::vector<int> holds(static_cast<size_t>(count), 0);
  std::vector<double> margin(static_cast<size_t>(count), 0.0);
  parallel_for(count, [&](long long i) {
    const auto& cyl = cyls[static_cast<size_t>(i % 4)];
    const auto& [p, q] = pq[static_cast<size_t>(i % 3)];
    const long long k = 1 + (i % (cyl->n + 1));
    const DiscreteForm f = random_trig_form(cyl, k, s.seed + static_cast<std::uint64_t>(i));
    const double len = cyl->T - cyl->a;
    double c0 = cyl->a, t1 = cyl->T;
    if (i % 5 == 1) {
      c0 = cyl->a + 0.25 * len;
      t1 = cyl->a + 0.75 * len;
    } else if (i % 5 == 3) {
      std::swap(c0, t1);
    }
    const LemmaCheck r = check_lemma_ineq(f, c0, t1, p, q, s.eps_disc);
    holds[static_cast<size_t>(i)] = r.holds ? 1 : 0;
    margin[static_cast<size_t>(i)] =
        r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs == 0.0 ? 0.0 : kInf);
  });
  long long ok = 0;
  double worst = 0.0;
  for (long long i = 0; i < count; ++i) {
    ok += holds[static_cast<size_t>(i)];
    worst = std::max(worst, margin[static_cast<size_t>(i)]);
  }
  const bool pass = ok == count;

  OrderedJson report = report_header("lab");
  report["check"] = "ineq";
  report["settings"] = OrderedJson{{"count", count}, {"seed", s.seed}, {"eps_disc", s.eps_disc}};
  report["holds"] = ok;
  report["max_lhs_over_rhs"] = worst;
  report["pass"] = pass;
  std::ostringstream text;
  text << "lab ineq: seed=" << s.seed << " count=" << count << "\n";
  text << "holds: " << ok << "/" << count << " (max lhs/rhs = " << fmt("%.3f", worst) << ")\n";
  text << "pass: " << (pass ? "yes" : "no") << "\n";
  return {std::move(report), text.str(), pass ? 0 : 3};
}

RunResult lab_norms(const LabSettings& s) {
  const long long count = s.count > 0 ? s.count : kNormsCount;
  std::vector<std::shared_ptr<const DiscreteCylinder>> cyls = {
      lab_cylinder(1, 48, 32, 0), lab_cylinder(1, 48, 32, 1),
      lab_cylinder(2, 32, 12, 0), lab_cylinder(2, 32, 12, 1)};
  const Rational ps[3] = {Rational(3, 2), Rational(2), Rational(3)};
  std::vector<double> gaps(static_cast<size_t>(count), 0.0);
  parallel_for(count, [&](long long i) {
    const auto& cyl = cyls[static_cast<size_t>(i % 4)];
    const long long degree = i % (cyl->n + 1);  // 0..n: horizontal degrees
    DiscreteForm f = random_trig_form(cyl, degree, s.seed + static_cast<std::uint64_t>(i));
    for (auto& arr : f.B_components)
      for (double& v : arr) v = 0.0;
    const Rational p = ps[static_cast<size_t>(i % 3)];
    const double general = lp_norm(f, p);
    const double horizontal = lp_norm_horizontal(f, p);
    gaps[static_cast<size_t>(i)] =
        horizontal > 0.0 ? std::abs(general - horizontal) / horizontal : std::abs(general);
  });
  double worst = 0.0;
  for (double g : gaps) worst = std::max(worst, g);
  const bool pass = worst <= kNormRelTol;

  OrderedJson report = report_header("lab");
  report["check"] = "norms";
  report["settings"] = OrderedJson{{"count", count}, {"seed", s.seed}};
  report["max_relative_gap"] = worst;
  report["tolerance"] = kNormRelTol;
  report["pass"] = pass;
  std::ostringstream text;
  text << "lab norms: seed=" << s.seed << " count=" << count << "\n";
  text << "max relative gap = " << fmt("%.3e", worst) << " (tolerance " << fmt("%.0e", kNormRelTol)
       << ")\n";
  text << "pass: " << (pass ? "yes" : "no") << "\n";
  return {std::move(report), text.str(), pass ? 0 : 3};
}

RunResult lab_ddzero(const LabSettings& s) {
  const long long count = s.count > 0 ? s.count : kDdzeroCount;
  auto cyl = lab_cylinder(1, 64, 64, 0);
  std::vector<double> ratios(static_cast<size_t>(count), 0.0);
  parallel_for(count, [&](long long i) {
    const DiscreteForm f = random_trig_form(cyl, 0, s.seed + static_cast<std::uint64_t>(i));
    const DiscreteForm dd = exterior_derivative(exterior_derivative(f));
    double scale = 0.0, worst = 0.0;
    for (const auto& arr : f.A_components)
      for (double v : arr) scale = std::max(scale, std::abs(v));
    for (const auto& arr : dd.A_components)
      for (double v : arr) worst = std::max(worst, std::abs(v));
    for (const auto& arr : dd.B_components)
      for (double v : arr) worst = std::max(worst, std::abs(v));
    ratios[static_cast<size_t>(i)] = scale > 0.0 ? worst / scale : worst;
  });
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, r);
  const bool pass = worst <= kDdTol;

  OrderedJson report = report_header("lab");
  report["check"] = "ddzero";
  report["settings"] = OrderedJson{{"count", count}, {"seed", s.seed}, {"grid", 64}};
  report["max_dd_over_scale"] = worst;
  report["tolerance"] = kDdTol;
  report["pass"] = pass;
  std::ostringstream text;
  text << "lab ddzero: seed=" << s.seed << " count=" << count << " grid=64\n";
  text << "max |dd| / scale = " << fmt("%.3e", worst) << " (tolerance " << fmt("%.0e", kDdTol)
       << ")\n";
  text << "pass: " << (pass ? "yes" : "no") << "\n";
  return {std::move(report), text.str(), pass ? 0 : 3};
}

}  // namespace

RunResult run_lab(const LabSettings& settings) {
  for (long long g : settings.grids)
    if (g < 8) throw ConfigError("config error at lab.grids: grid sizes must be at least 8");
  if (settings.grids.empty()) throw ConfigError("config error at lab.grids: empty grid list");
  if (settings.count < 0) throw ConfigError("config error at lab.count: must be nonnegative");
  if (!(settings.eps_disc >= 0.0))
    throw ConfigError("config error at lab.eps_disc: must be nonnegative");
  if (settings.check == "homotopy") return lab_homotopy(settings);
  if (settings.check == "ineq") return lab_ineq(settings);
  if (settings.check == "norms") return lab_norms(settings);
  if (settings.check == "ddzero") return lab_ddzero(settings);
  throw ConfigError("config error at lab.check: expected homotopy, ineq, norms or ddzero");
}

RunResult run_preset_cartan_hadamard(long long m, const Rational& p, const Rational& q) {
  OrderedJson report = report_header("presets");
  report["preset"] = "cartan-hadamard";
  report["m"] = m;
  report["p"] = p.str();
  report["q"] = q.str();
  OrderedJson rows = OrderedJson::array();
  std::ostringstream text;
  text << "cartan-hadamard m=" << m << " p=" << p.str() << " q=" << q.str() << "\n";
  long long unsupported = 0;
  std::vector<long long> vanishing;
  for (long long k = 0; k <= m; ++k) {
    const Verdict v = decide_cartan_hadamard(m, p, q, k);
    OrderedJson row;
    row["k"] = k;
    row["verdict"] = verdict_json(v);
    rows.push_back(std::move(row));
    if (v.outcome == Outcome::Unsupported) ++unsupported;
    if (v.outcome == Outcome::Vanishes) vanishing.push_back(k);
    text << "k=" << k << ": " << to_string(v.outcome);
    if (!v.theorem().empty()) text << " (" << v.theorem() << ")";
    text << "\n";
  }
  report["degrees"] = std::move(rows);
  report["vanishing_degrees"] = vanishing;
  RunResult out;
  out.report = std::move(report);
  out.text = text.str();
  out.exit_code = unsupported > 0 ? 2 : 0;
  return out;
}

std::string render_report(const OrderedJson& report) { return report.dump(2) + "\n"; }

}  // namespace lqp
