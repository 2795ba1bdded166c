#include "stablekernel/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace stablekernel::spectral {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread safe; execution with the new-array interface is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }
    fftw_plan get(int rank, int n, int howmany, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(rank, n, howmany, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        const std::size_t len = static_cast<std::size_t>(rank == 1 ? n : n * n) * howmany;
        auto* buf = fftw_alloc_complex(len);
        fftw_plan p;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (rank == 1) {
            int dims[1] = {n};
            p = fftw_plan_many_dft(1, dims, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, sign, flags);
        } else {
            p = fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
        }
        fftw_free(buf);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

void run(int rank, int n, int howmany, int sign, cplx* data) {
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(PlanCache::instance().get(rank, n, howmany, sign), d, d);
}

double wavenumber(int k, int n, double extent) {
    const int kk = k < n / 2 ? k : k - n;
    return 2.0 * std::numbers::pi * kk / extent;
}

}  // namespace

void fft_columns(Eigen::MatrixXcd& m, int sign) {
    if (m.size() == 0) return;
    run(1, static_cast<int>(m.rows()), static_cast<int>(m.cols()), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, m.data());
}

void fft2d(std::vector<cplx>& a, int n, int sign) { run(2, n, 1, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, a.data()); }

Eigen::VectorXcd coefficients(std::span<const double> f) {
    const int n = static_cast<int>(f.size());
    Eigen::MatrixXcd c(n, 1);
    for (int j = 0; j < n; ++j) c(j, 0) = f[j];
    fft_columns(c, -1);
    for (int k = 1; k < n; k += 2) c(k, 0) = -c(k, 0);
    return c.col(0);
}

Eigen::VectorXd synthesize(const Eigen::VectorXcd& c) {
    const int n = static_cast<int>(c.size());
    Eigen::MatrixXcd m = c;
    for (int k = 1; k < n; k += 2) m(k, 0) = -m(k, 0);
    fft_columns(m, +1);
    return m.col(0).real() / n;
}

Eigen::VectorXd derivative(std::span<const double> f, double extent, int order) {
    const int n = static_cast<int>(f.size());
    Eigen::VectorXcd c = coefficients(f);
    for (int k = 0; k < n; ++k) {
        const cplx iu(0.0, wavenumber(k, n, extent));
        c(k) *= std::pow(iu, order);
    }
    if (order % 2 == 1) c(n / 2) = 0.0;
    return synthesize(c);
}

Eigen::MatrixXd derivative_columns(const Eigen::MatrixXd& f, double extent, int order) {
    const int n = static_cast<int>(f.rows());
    Eigen::MatrixXcd c = f.cast<cplx>();
    fft_columns(c, -1);
    for (int k = 0; k < n; ++k) {
        cplx factor = std::pow(cplx(0.0, wavenumber(k, n, extent)), order);
        if (order % 2 == 1 && k == n / 2) factor = 0.0;
        c.row(k) *= factor;
    }
    fft_columns(c, +1);
    return c.real() / n;
}

std::vector<double> interpolate(std::span<const double> f, double extent, std::span<const double> xs) {
    const int n = static_cast<int>(f.size());
    const Eigen::VectorXcd c = coefficients(f);
    const double dx = extent / n;
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        double s = c(0).real();
        for (int k = 1; k < n / 2; ++k) {
            const double u = wavenumber(k, n, extent);
            s += 2.0 * (c(k) * std::polar(1.0, u * x)).real();
        }
        s += c(n / 2).real() * std::cos(std::numbers::pi * x / dx);
        out.push_back(s / n);
    }
    return out;
}

std::vector<double> cumulative(std::span<const double> f, double extent, int upsample) {
    const int n = static_cast<int>(f.size());
    const int m = n * upsample;
    const Eigen::VectorXcd c = coefficients(f);
    // antiderivative of the zero-mean part, synthesised on the fine lattice
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, 1);
    for (int k = 1; k < n / 2; ++k) {
        const double u = wavenumber(k, n, extent);
        g(k, 0) = c(k) / cplx(0.0, u);
        g(m - k, 0) = std::conj(c(k)) / cplx(0.0, -u);
    }
    const double un = std::numbers::pi * n / extent;
    // Nyquist term c cos(un x) integrates to c sin(un x)/un, split over +-un
    g(n / 2, 0) += c(n / 2).real() / cplx(0.0, 2.0 * un);
    g(m - n / 2, 0) += c(n / 2).real() / cplx(0.0, -2.0 * un);
    // fine lattice x_i = -L/2 + i L/m shares the phase convention (-1)^k of the coarse one
    for (int k = 1; k < m; k += 2) g(k, 0) = -g(k, 0);
    fft_columns(g, +1);
    const double mass_rate = c(0).real() / n;
    std::vector<double> out(m + 1);
    const double g0 = g(0, 0).real() / n;
    for (int i = 0; i < m; ++i) out[i] = mass_rate * (static_cast<double>(i) * extent / m) + g(i, 0).real() / n - g0;
    out[m] = mass_rate * extent;
    return out;
}

}  // namespace stablekernel::spectral
