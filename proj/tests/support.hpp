#pragma once
// Tiny check harness shared by the test binaries: every CHECK prints its
// location on failure and execution keeps going, so one run reports every
// broken case.  main() ends with test_summary(), whose return value is the
// process exit status.

#include <cmath>
#include <cstdio>
#include <string>

namespace testlib {

inline int checks = 0;
inline int failures = 0;

inline bool report(bool ok, const char* file, int line, const std::string& what) {
  ++checks;
  if (!ok) {
    ++failures;
    std::printf("FAIL %s:%d  %s\n", file, line, what.c_str());
  }
  return ok;
}

inline bool report_close(double got, double want, double tol, const char* file, int line,
                         const char* expr) {
  const bool ok = std::abs(got - want) <= tol;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s  got %.17g want %.17g (tol %.3g)", expr, got, want, tol);
  return report(ok, file, line, buf);
}

inline bool report_rel(double got, double want, double tol, const char* file, int line,
                       const char* expr) {
  const double scale = std::max(std::abs(want), 1e-300);
  const bool ok = std::abs(got - want) <= tol * scale;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s  got %.17g want %.17g (rel tol %.3g)", expr, got, want,
                tol);
  return report(ok, file, line, buf);
}

inline int summary(const char* name) {
  std::printf("%s: %d checks, %d failures\n", name, checks, failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace testlib

#define CHECK(cond) ::testlib::report(static_cast<bool>(cond), __FILE__, __LINE__, #cond)
#define CHECK_CLOSE(got, want, tol) \
  ::testlib::report_close((got), (want), (tol), __FILE__, __LINE__, #got)
#define CHECK_REL(got, want, tol) \
  ::testlib::report_rel((got), (want), (tol), __FILE__, __LINE__, #got)
#define CHECK_THROWS(stmt, exception_type)                                          \
  do {                                                                              \
    bool thrown_ = false;                                                           \
    try {                                                                           \
      stmt;                                                                         \
    } catch (const exception_type&) {                                               \
      thrown_ = true;                                                               \
    } catch (...) {                                                                 \
    }                                                                               \
    ::testlib::report(thrown_, __FILE__, __LINE__, "throws " #exception_type ": " #stmt); \
  } while (0)
