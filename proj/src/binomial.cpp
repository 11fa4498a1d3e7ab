#include "qkt/binomial.hpp"

#include <cmath>

#include "qkt/errors.hpp"

namespace qkt {

long double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial: negative argument");
  if (n < 2) return 0.0L;
  int sign = 0;
  // reentrant variant: lgammal() writes the global signgam
  return ::lgammal_r(static_cast<long double>(n) + 1.0L, &sign);
}

long double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw DomainError("log_binomial: k outside [0, n]");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

} // namespace qkt
