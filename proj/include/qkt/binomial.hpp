#pragma once

namespace qkt {

/// log(n!) in extended precision.
long double log_factorial(int n);

/// log C(n, k); requires 0 <= k <= n.
long double log_binomial(int n, int k);

} // namespace qkt
