#include "inflection/numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace inflection {

double trapezoid(std::span<const double> y, double h) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
    return s * h;
}

double trapezoid_norm(std::span<const cplx> v, double h) {
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (std::norm(v.front()) + std::norm(v.back()));
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += std::norm(v[i]);
    return std::sqrt(s * h);
}

cplx trapezoid_inner(std::span<const cplx> a, std::span<const cplx> b, double h) {
    if (a.size() != b.size()) throw std::invalid_argument("trapezoid_inner: length mismatch");
    if (a.size() < 2) return 0.0;
    const std::size_t n = a.size();
    cplx s = 0.5 * (std::conj(a[0]) * b[0] + std::conj(a[n - 1]) * b[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) s += std::conj(a[i]) * b[i];
    return s * h;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("trapezoid: length mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

bool solve_tridiagonal(std::span<const cplx> sub, std::span<const cplx> diag,
                       std::span<const cplx> super, std::span<cplx> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return true;
    std::vector<cplx> c(n);
    cplx b = diag[0];
    if (b == cplx{}) return false;
    c[0] = super[0] / b;
    rhs[0] /= b;
    for (std::size_t i = 1; i < n; ++i) {
        b = diag[i] - sub[i] * c[i - 1];
        if (b == cplx{}) return false;
        if (i + 1 < n) c[i] = super[i] / b;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / b;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return true;
}

cvec first_difference(std::span<const cplx> v, double h) {
    const std::size_t n = v.size();
    cvec d(n);
    if (n < 3) return d;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    return d;
}

cvec second_difference(std::span<const cplx> v, double h) {
    const std::size_t n = v.size();
    cvec d(n);
    if (n < 3) return d;
    const double h2 = h * h;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    if (n >= 4) {
        d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    } else {
        d[0] = d[1];
        d[n - 1] = d[n - 2];
    }
    return d;
}

cplx cubic_sample(std::span<const cplx> v, double x0, double h, double x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    if (n == 0) return 0.0;
    const double u = (x - x0) / h;
    // tolerate roundoff right at the ends
    if (u < -1e-9 || u > static_cast<double>(n - 1) + 1e-9) return 0.0;
    if (n < 4) {
        std::ptrdiff_t i = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(u)), 0, n - 2);
        if (n == 1) return v[0];
        const double w = u - static_cast<double>(i);
        return (1.0 - w) * v[i] + w * v[i + 1];
    }
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, n - 4);
    const double s = u - static_cast<double>(i);  // nodes at 0,1,2,3
    const double l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    const double l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    const double l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    const double l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    return l0 * v[i] + l1 * v[i + 1] + l2 * v[i + 2] + l3 * v[i + 3];
}

namespace {
// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

cvec free_flow(std::span<const cplx> u, double h, double s, int pad_factor) {
    const std::size_t n = u.size();
    if (n == 0) return {};
    const std::size_t m = n * static_cast<std::size_t>(std::max(pad_factor, 1));
    fftw_complex* buf = fftw_alloc_complex(m);
    fftw_plan fwd, bwd;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < m; ++i) {
        buf[i][0] = i < n ? u[i].real() : 0.0;
        buf[i][1] = i < n ? u[i].imag() : 0.0;
    }
    fftw_execute(fwd);
    const double dk = 2.0 * kPi / (static_cast<double>(m) * h);
    for (std::size_t i = 0; i < m; ++i) {
        const double k = dk * (i <= m / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(m));
        const cplx w = std::polar(1.0 / static_cast<double>(m), 0.5 * s * k * k);
        const cplx z = cplx{buf[i][0], buf[i][1]} * w;
        buf[i][0] = z.real();
        buf[i][1] = z.imag();
    }
    fftw_execute(bwd);
    cvec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {buf[i][0], buf[i][1]};
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(buf);
    return out;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_slope: need matching samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace inflection
