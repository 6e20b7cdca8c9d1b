#pragma once

namespace bose_ldp {

// Real branches of the Lambert W function.
// principal (W_0) lives on [-1/e, inf) with W >= -1,
// lower (W_-1) lives on [-1/e, 0) with W <= -1.
enum class Branch { principal, lower };

// g(n, t) = sum_{k>=1} k^{-n} e^{-t k}, i.e. Li_n(e^{-t}).
// Requires t > 0, or t == 0 with n > 1 (then returns zeta(n)).
// Throws DomainError for t < 0 and DivergenceError for t == 0, n <= 1.
double bose_g(double n, double t);

// Riemann zeta for real n > 1.
double riemann_zeta(double n);

// Analytic continuation of zeta to all real s != 1.
double riemann_zeta_continued(double s);

double lambert_w(Branch branch, double x);

// W'(x) = W / (x (1 + W)); returns 1 for the principal branch at x == 0.
// Throws SingularityError at x == -1/e.
double lambert_w_prime(Branch branch, double x);

}  // namespace bose_ldp
