#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace stablekernel::spectral {

/// Unnormalised DFT along each column of a column-major matrix; sign -1 forward, +1 backward.
void fft_columns(Eigen::MatrixXcd& m, int sign);
/// Unnormalised 2D DFT of an n x n row-major array.
void fft2d(std::vector<std::complex<double>>& a, int n, int sign);

/// Coefficients c_k = sum_j f_j e^{-i u_k x_j} of lattice data on x_j = -L/2 + j L/N (FFT order).
Eigen::VectorXcd coefficients(std::span<const double> f);
/// Inverse of `coefficients` (real part).
Eigen::VectorXd synthesize(const Eigen::VectorXcd& c);

/// Spectral derivative of order `order` of periodic lattice data; Nyquist mode dropped for odd orders.
Eigen::VectorXd derivative(std::span<const double> f, double extent, int order = 1);
/// Column-wise spectral derivative.
Eigen::MatrixXd derivative_columns(const Eigen::MatrixXd& f, double extent, int order = 1);

/// Trigonometric interpolant of lattice data evaluated at arbitrary points.
std::vector<double> interpolate(std::span<const double> f, double extent, std::span<const double> xs);

/// Cumulative integral from -L/2 of the trigonometric interpolant, tabulated on the lattice
/// refined by `upsample`; entry i sits at -L/2 + i L/(N upsample), plus a final entry at L/2.
std::vector<double> cumulative(std::span<const double> f, double extent, int upsample = 8);

}  // namespace stablekernel::spectral
