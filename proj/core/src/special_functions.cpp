#include "bose_ldp/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bose_ldp/errors.hpp"

namespace bose_ldp {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr double kPi = std::numbers::pi;

// B_2, B_4, ..., B_24
constexpr std::array<double, 12> kBernoulli = {
    1.0 / 6.0,         -1.0 / 30.0,         1.0 / 42.0,
    -1.0 / 30.0,       5.0 / 66.0,          -691.0 / 2730.0,
    7.0 / 6.0,         -3617.0 / 510.0,     43867.0 / 798.0,
    -174611.0 / 330.0, 854513.0 / 138.0,    -236364091.0 / 2730.0};

// Euler-Maclaurin with N = 16 terms summed explicitly. Valid for s > 0.5 - eps
// and s below ~30 where the rising factorials stay tame.
double zeta_euler_maclaurin(double s) {
  constexpr int N = 16;
  double sum = 0.0;
  for (int k = N - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  const double n = N;
  const double n_pow = std::pow(n, -s);
  sum += n * n_pow / (s - 1.0) + 0.5 * n_pow;
  // rising factorial (s)_{2j-1} / (2j)! times N^{-s-2j+1}
  double coeff = s / 2.0;
  double npow = n_pow / n;
  for (std::size_t j = 0; j < kBernoulli.size(); ++j) {
    const double term = kBernoulli[j] * coeff * npow;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    const double m = 2.0 * static_cast<double>(j + 1);
    coeff *= (s + m - 1.0) * (s + m) / ((m + 1.0) * (m + 2.0));
    npow /= n * n;
  }
  return sum;
}

double zeta_direct(double s) {
  double sum = 1.0;
  for (int k = 2; k < 64; ++k) {
    const double term = std::pow(static_cast<double>(k), -s);
    sum += term;
    if (term < 1e-18) break;
  }
  return sum;
}

double harmonic(int m) {
  double h = 0.0;
  for (int i = 1; i <= m; ++i) h += 1.0 / i;
  return h;
}

double bose_g_series(double n, double t) {
  const double r = std::exp(-t);
  const double peak = n < 0.0 ? -n / t : 1.0;
  double sum = 0.0;
  double e = 1.0;
  for (int k = 1; k < 100000; ++k) {
    e *= r;
    if ((k & 31) == 0) e = std::exp(-t * k);
    const double term = std::pow(static_cast<double>(k), -n) * e;
    sum += term;
    if (k > peak && term < 1e-17 * sum) break;
  }
  return sum;
}

// Expansion about t = 0 in powers of t; singular part explicit.
double bose_g_small_t(double n, double t) {
  const bool integer_order = n >= 1.0 && n == std::floor(n) && n < 64.0;
  const int m = integer_order ? static_cast<int>(n) - 1 : -1;
  double sum = 0.0;
  if (!integer_order) sum = std::tgamma(1.0 - n) * std::pow(t, n - 1.0);
  double power = 1.0;  // (-t)^k / k!
  for (int k = 0; k < 120; ++k) {
    double term;
    if (k == m) {
      term = power * (harmonic(m) - std::log(t));
    } else {
      term = riemann_zeta_continued(n - k) * power;
    }
    sum += term;
    // zeta vanishes at negative even integers, so a zero term is not convergence
    if (k > m + 1 && k > 2 && term != 0.0 && std::abs(term) < 1e-17 * std::abs(sum)) break;
    power *= -t / (k + 1);
  }
  return sum;
}

double branch_point_series(double p) {
  constexpr std::array<double, 10> c = {
      -1.0,
      1.0,
      -1.0 / 3.0,
      11.0 / 72.0,
      -43.0 / 540.0,
      769.0 / 17280.0,
      -221.0 / 8505.0,
      680863.0 / 43545600.0,
      -1963.0 / 204120.0,
      226287557.0 / 37623398400.0};
  double w = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) w = w * p + *it;
  return w;
}

// sum_{n=1}^{8} (-n)^{n-1}/n! x^n
double w0_taylor(double x) {
  constexpr std::array<double, 8> c = {
      1.0, -1.0, 1.5, -8.0 / 3.0, 125.0 / 24.0, -54.0 / 5.0, 16807.0 / 720.0,
      -16384.0 / 315.0};
  double w = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) w = w * x + *it;
  return w * x;
}

double halley(double x, double w) {
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

}  // namespace

double riemann_zeta_continued(double s) {
  if (std::isnan(s)) throw DomainError("zeta: NaN argument");
  if (s == 1.0) throw DivergenceError("zeta: pole at s = 1");
  if (s > 30.0) return zeta_direct(s);
  if (s >= 0.5) return zeta_euler_maclaurin(s);
  if (s == 0.0) return -0.5;
  if (s < 0.0 && std::fmod(s, 2.0) == 0.0) return 0.0;
  // reflection: zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
  const double reflected = riemann_zeta_continued(1.0 - s);
  return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(kPi * s / 2.0) *
         std::tgamma(1.0 - s) * reflected;
}

double riemann_zeta(double n) {
  if (!(n > 1.0)) {
    throw DomainError("riemann_zeta requires n > 1, got " + message_number(n));
  }
  return riemann_zeta_continued(n);
}

double bose_g(double n, double t) {
  if (std::isnan(n) || std::isnan(t)) throw DomainError("bose_g: NaN argument");
  if (t < 0.0) throw DomainError("bose_g requires t >= 0");
  if (t == 0.0) {
    if (n <= 1.0) throw DivergenceError("bose_g diverges at t = 0 for n <= 1");
    return riemann_zeta(n);
  }
  if (std::isinf(t)) return 0.0;
  if (t >= 0.5) return bose_g_series(n, t);
  return bose_g_small_t(n, t);
}

double lambert_w(Branch branch, double x) {
  if (std::isnan(x)) throw DomainError("lambert_w: NaN argument");
  if (x < -kInvE) {
    if (x >= -kInvE * (1.0 + 4.0 * kEps)) return -1.0;
    throw DomainError("lambert_w: argument below -1/e");
  }
  if (branch == Branch::lower && x >= 0.0) {
    throw DomainError("lambert_w: lower branch requires x < 0");
  }
  const double p2 = 2.0 * (std::numbers::e * x + 1.0);
  const double p = std::sqrt(std::max(p2, 0.0));
  if (branch == Branch::principal) {
    if (x == 0.0) return 0.0;
    if (std::abs(x) < 2e-3) return w0_taylor(x);
    if (p < 1e-3) return branch_point_series(p);
    double w0;
    if (x < -0.25) {
      w0 = branch_point_series(p);
    } else if (x <= 3.0) {
      const double l = std::log1p(x);
      w0 = l * (1.0 - std::log1p(l) / (2.0 + l));
    } else {
      const double l1 = std::log(x);
      const double l2 = std::log(l1);
      w0 = l1 - l2 + l2 / l1;
    }
    return halley(x, w0);
  }
  if (p < 1e-3) return branch_point_series(-p);
  double w0;
  if (x < -0.25) {
    w0 = branch_point_series(-p);
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w0 = l1 - l2 + l2 / l1;
  }
  return halley(x, w0);
}

double lambert_w_prime(Branch branch, double x) {
  if (branch == Branch::principal && x == 0.0) return 1.0;
  if (x <= -kInvE * (1.0 - 4.0 * kEps) && x >= -kInvE * (1.0 + 4.0 * kEps)) {
    throw SingularityError("lambert_w_prime: derivative diverges at -1/e");
  }
  const double w = lambert_w(branch, x);
  return w / (x * (1.0 + w));
}

}  // namespace bose_ldp
