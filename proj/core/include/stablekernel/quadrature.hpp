#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace stablekernel::quad {

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Supported orders: 4, 6, 8, 10, 12, 16, 20, 24, 32.
const Rule& gauss_legendre(int n);

/// Apply a rule on [a, b].
template <class F>
auto panel(F&& f, double a, double b, const Rule& rule) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    decltype(f(c)) s{};
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
    return s * h;
}

/// Double-exponential quadrature on a finite interval; tolerates algebraic endpoint
/// singularities. `err` receives the integrator's error estimate.
double finite(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
              double* err = nullptr);

/// Double-exponential quadrature on [a, inf).
double semi_infinite(const std::function<double(double)>& f, double a, double tol = 1e-12,
                     double* err = nullptr);

/// Adaptive Gauss-Kronrod (15 point) on [a, b].
double adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                double* err = nullptr);

/// I = int_R^inf e^{i kappa r} r^{-1-beta} dr for beta > 0, R > 0.
std::complex<double> power_tail(double kappa, double beta, double R);

}  // namespace stablekernel::quad
