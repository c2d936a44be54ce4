#include "inflection/airy.hpp"

#include "inflection/errors.hpp"
#include "inflection/modes.hpp"
#include "inflection/numerics.hpp"

#include <array>
#include <cmath>
#include <string>

namespace inflection::airy {

namespace {

constexpr double kSqrtPi = 1.77245385090551602730;
constexpr double kC1 = 0.355028053887817239260;  // Ai(0)
constexpr double kC2 = 0.258819403792806798405;  // -Ai'(0)

constexpr double kNodeStep = 0.25;
constexpr int kNodeCount = 65;  // -8, -7.75, ..., 8

AirySample maclaurin(double z) {
    const double z3 = z * z * z;
    // f = Σ t_k, g = Σ u_k and their derivatives, standard series
    double t = 1.0, f = 1.0;
    double u = z, g = z;
    double v = 0.5 * z * z, fp = v;
    double w = 1.0, gp = 1.0;
    for (int k = 0; k < 200; ++k) {
        const double k3 = 3.0 * k;
        t *= z3 / ((k3 + 2.0) * (k3 + 3.0));
        u *= z3 / ((k3 + 3.0) * (k3 + 4.0));
        w *= z3 / ((k3 + 3.0) * (k3 + 1.0));
        if (k >= 1) v *= z3 / (k3 * (k3 + 2.0));
        f += t;
        g += u;
        gp += w;
        if (k >= 1) fp += v;
        if (std::abs(t) + std::abs(u) + std::abs(v) + std::abs(w) < 1e-19 * (std::abs(f) + std::abs(g) + 1e-300))
            break;
    }
    return {z, kC1 * f - kC2 * g, kC1 * fp - kC2 * gp, false};
}

// u_k and v_k of the large-argument expansions, truncated where terms stop shrinking.
struct AsymptoticCoefficients {
    std::array<double, 40> u{}, v{};
    AsymptoticCoefficients() {
        u[0] = v[0] = 1.0;
        for (int k = 1; k < 40; ++k) {
            u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
            v[k] = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u[k];
        }
    }
};

const AsymptoticCoefficients& coefficients() {
    static const AsymptoticCoefficients c;
    return c;
}

AirySample decaying(double z) {
    const auto& c = coefficients();
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    double su = 0.0, sv = 0.0, pw = 1.0, last = INFINITY;
    for (int k = 0; k < 40; ++k) {
        const double term = std::abs(c.u[k] * pw);
        if (term > last) break;
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        su += sgn * c.u[k] * pw;
        sv += sgn * c.v[k] * pw;
        if (term < 1e-18 * std::abs(su)) break;
        last = term;
        pw /= zeta;
    }
    const double e = std::exp(-zeta) / (2.0 * kSqrtPi);
    const double q = std::sqrt(std::sqrt(z));
    return {z, e / q * su, -e * q * sv, false};
}

AirySample oscillatory(double z) {
    const auto& c = coefficients();
    const double x = -z;
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    // even and odd partial sums with alternating signs in pairs
    double ue = 0, uo = 0, ve = 0, vo = 0, pw = 1.0, last = INFINITY;
    for (int k = 0; k < 40; ++k) {
        const double term = std::abs(c.u[k] * pw);
        if (term > last) break;
        const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            ue += sgn * c.u[k] * pw;
            ve += sgn * c.v[k] * pw;
        } else {
            uo += sgn * c.u[k] * pw;
            vo += sgn * c.v[k] * pw;
        }
        if (term < 1e-18) break;
        last = term;
        pw /= zeta;
    }
    const double s = std::sin(zeta), co = std::cos(zeta);
    const double cm = (co + s) / std::sqrt(2.0);  // cos(ζ - π/4)
    const double sm = (s - co) / std::sqrt(2.0);  // sin(ζ - π/4)
    const double q = std::sqrt(std::sqrt(x));
    return {z, (cm * ue + sm * uo) / (kSqrtPi * q), q * (sm * ve - cm * vo) / kSqrtPi, z < -100.0};
}

// Taylor continuation of a solution of y'' = z y from (z0, y, y') to z0 + d.
AirySample taylor(double z0, double y, double yp, double d) {
    // c_{k+2} = (z0 c_k + c_{k-1}) / ((k+2)(k+1))
    double ckm1 = 0.0, ck = y, ck1 = yp;
    double val = y + yp * d, der = yp;
    double p = d;  // d^(k+1)
    for (int k = 0; k < 80; ++k) {
        const double next = (z0 * ck + ckm1) / ((k + 2.0) * (k + 1.0));
        der += (k + 2.0) * next * p;
        p *= d;
        val += next * p;
        ckm1 = ck;
        ck = ck1;
        ck1 = next;
        if (k > 4 && std::abs(next * p) < 1e-20 * (std::abs(val) + 1e-300)) break;
    }
    return {z0 + d, val, der, false};
}

struct NodeTable {
    std::array<double, kNodeCount> ai{}, aip{};
    NodeTable() {
        const int mid = kNodeCount / 2;  // node at z = 0
        const int series_reach = static_cast<int>(kSeriesRadius / kNodeStep);
        for (int m = mid - series_reach; m <= mid + series_reach; ++m) {
            const auto s = maclaurin(node(m));
            ai[m] = s.ai;
            aip[m] = s.aip;
        }
        // Ai is recessive for z > 0: integrate from the far end towards the origin.
        const auto far = decaying(kAsymptoticRadius);
        ai[kNodeCount - 1] = far.ai;
        aip[kNodeCount - 1] = far.aip;
        for (int m = kNodeCount - 2; m > mid + series_reach; --m) {
            const auto s = taylor(node(m + 1), ai[m + 1], aip[m + 1], -kNodeStep);
            ai[m] = s.ai;
            aip[m] = s.aip;
        }
        // Oscillatory side is neutrally stable: march outwards from the series region.
        for (int m = mid - series_reach - 1; m >= 0; --m) {
            const auto s = taylor(node(m + 1), ai[m + 1], aip[m + 1], -kNodeStep);
            ai[m] = s.ai;
            aip[m] = s.aip;
        }
    }
    static double node(int m) { return -kAsymptoticRadius + kNodeStep * m; }
};

const NodeTable& nodes() {
    static const NodeTable t;
    return t;
}

}  // namespace

AirySample eval_ai(double z) {
    if (!std::isfinite(z)) throw NonFinite("eval_ai: argument is not finite");
    if (std::abs(z) <= kSeriesRadius) return maclaurin(z);
    if (z > kAsymptoticRadius) return decaying(z);
    if (z < -kAsymptoticRadius) return oscillatory(z);
    const auto& t = nodes();
    const int m = static_cast<int>(std::lround((z + kAsymptoticRadius) / kNodeStep));
    const double z0 = NodeTable::node(m);
    auto s = taylor(z0, t.ai[m], t.aip[m], z - z0);
    s.z = z;
    return s;
}

double zero(int j) {
    if (j < 1 || j > 50) throw OutOfRange("zero: j must lie in [1, 50], got " + std::to_string(j));
    const double t = 3.0 * kPi * (4.0 * j - 1.0) / 8.0;
    const double t2 = 1.0 / (t * t);
    double z = -std::pow(t, 2.0 / 3.0) *
               (1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * (77125.0 / 82944.0))));
    for (int it = 0; it < 50; ++it) {
        const auto s = eval_ai(z);
        const double step = s.ai / s.aip;
        z -= step;
        if (std::abs(step) < 1e-15 * std::abs(z)) break;
    }
    return -z;
}

AiryMode mode(int j) {
    return {j, zero(j), modes::normalize(j)};
}

}  // namespace inflection::airy
