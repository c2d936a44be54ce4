#include "inflection/modes.hpp"

#include "inflection/errors.hpp"

#include <cmath>
#include <tuple>
#include <string>

namespace inflection::modes {

double normalize(int j) {
    const double nu = airy::zero(j);
    return 1.0 / std::abs(airy::eval_ai(-nu).aip);
}

cplx incoming(const airy::AiryMode& mode, double x, double t) {
    if (!(t < 0.0)) throw DomainError("incoming: requires t < 0");
    if (x < 0.0) throw DomainError("incoming: requires x >= 0");
    const double s = -2.0 * t;
    const double s13 = std::cbrt(s);
    const double phase = mode.nu * 0.15 * s13 * s13 * s13 * s13 * s13;
    const double ai = airy::eval_ai(x * s13 - mode.nu).ai;
    return mode.d * std::pow(s, 1.0 / 6.0) * ai * std::polar(1.0, phase);
}

namespace {

using Poly = cvec;  // ascending coefficients

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return Poly(1, 0.0);
    Poly d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<double>(k) * p[k];
    return d;
}

Poly integral(const Poly& p) {
    Poly r(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) r[k + 1] = p[k] / static_cast<double>(k + 1);
    return r;
}

Poly shift_up(const Poly& p) {  // ξ·p
    Poly r(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) r[k + 1] = p[k];
    return r;
}

Poly axpy(cplx a, const Poly& x, const Poly& y) {  // a·x + y
    Poly r(std::max(x.size(), y.size()), 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) r[k] += a * x[k];
    for (std::size_t k = 0; k < y.size(); ++k) r[k] += y[k];
    return r;
}

// Given w_n = P Ai(ξ-ν) + Q Ai'(ξ-ν), solve
//   (-∂² + ξ - ν) w_{n+1} = i[(1/10 - n) w_n + (ξ/5) w_n']
// for polynomial (P_{n+1}, Q_{n+1}). This is (PopEq-) matched at order τ^{-(n+1)}.
// P_{n+1} is returned with zero constant term; its constant is fixed one step later.
std::pair<Poly, Poly> next_order(const Poly& P, const Poly& Q, int n, double nu) {
    const double a = 0.1 - n;
    // (ξ - ν) Q
    const Poly zQ = axpy(-nu, Q, shift_up(Q));
    // w' = (P' + (ξ-ν) Q) Ai + (P + Q') Ai'
    const Poly dA = axpy(1.0, derivative(P), zQ);
    const Poly dB = axpy(1.0, P, derivative(Q));
    const Poly RA = axpy(kI * a, P, axpy(kI / 5.0, shift_up(dA), Poly{}));
    const Poly RB = axpy(kI * a, Q, axpy(kI / 5.0, shift_up(dB), Poly{}));
    // A0 (p Ai + q Ai') = -(p'' + q + 2 z q') Ai - (2 p' + q'') Ai'
    // Eliminating p: -q'''/2 + q + 2 (ξ-ν) q' = -RA + RB'/2, solved top-down.
    const Poly rhs = axpy(-1.0, RA, axpy(0.5, derivative(RB), Poly{}));
    const std::size_t d = rhs.size() - 1;
    Poly q(d + 4, 0.0);
    for (std::size_t kk = d + 1; kk-- > 0;) {
        const double k = static_cast<double>(kk);
        q[kk] = (rhs[kk] + (k + 3.0) * (k + 2.0) * (k + 1.0) * q[kk + 3] / 2.0 + 2.0 * nu * (k + 1.0) * q[kk + 1]) /
                (1.0 + 2.0 * k);
    }
    q.resize(d + 1);
    // 2 p' = -RB - q''
    const Poly dp = axpy(-0.5, RB, axpy(-0.5, derivative(derivative(q)), Poly{}));
    return {integral(dp), q};
}

std::vector<double> strip_phase(const Poly& p, int n, std::size_t keep, const char* what) {
    // divide by i^n; what remains must be real
    cplx unit = 1.0;
    for (int k = 0; k < n; ++k) unit *= kI;
    std::vector<double> r(keep, 0.0);
    double scale = 0.0;
    for (const auto& c : p) scale = std::max(scale, std::abs(c));
    for (std::size_t k = 0; k < p.size(); ++k) {
        const cplx c = p[k] / unit;
        if (std::abs(c.imag()) > 1e-9 * (1.0 + scale))
            throw SolverFailure(std::string("derive_expansion: ") + what + " coefficient not of the expected phase");
        if (k < keep) {
            r[k] = c.real();
        } else if (std::abs(c.real()) > 1e-9 * (1.0 + scale)) {
            throw SolverFailure(std::string("derive_expansion: ") + what + " degree exceeds expectation");
        }
    }
    return r;
}

}  // namespace

ModalExpansion derive_expansion(const airy::AiryMode& mode, int order) {
    if (order < 0) throw OutOfRange("derive_expansion: negative order");
    if (order > kMaxExpansionOrder)
        throw OrderTooHigh("derive_expansion: order " + std::to_string(order) + " exceeds 6");
    const double nu = mode.nu;
    std::vector<Poly> Ps{Poly{1.0}}, Qs{Poly{0.0}};
    // one order beyond the requested one, needed to pin the constant in P_order
    for (int n = 0; n <= order; ++n) {
        auto [p, q] = next_order(Ps[n], Qs[n], n, nu);
        if (n >= 1) {
            // adding c·w_0 to w_n shifts q_{n+1}(0) by i n c; choose c so Q(0) = 0
            const cplx c = -q[0] / (kI * static_cast<double>(n));
            Ps[n][0] += c;
            std::tie(p, q) = next_order(Ps[n], Qs[n], n, nu);
        }
        Ps.push_back(p);
        Qs.push_back(q);
    }
    ModalExpansion e;
    e.mode = mode;
    e.order = order;
    for (int n = 0; n <= order; ++n) {
        e.p_coeffs.push_back(strip_phase(Ps[n], n, 2 * n + 1, "P"));
        if (n == 0) {
            e.q_coeffs.emplace_back();
        } else {
            auto q = strip_phase(Qs[n], n, 2 * n, "Q");
            q[0] = 0.0;
            e.q_coeffs.push_back(std::move(q));
        }
    }
    return e;
}

namespace {
double horner(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
    return r;
}
}  // namespace

cplx eval_expansion(const ModalExpansion& exp, double x, double t) {
    if (t > -1.0) throw DomainError("eval_expansion: requires t <= -1");
    if (x < 0.0) throw DomainError("eval_expansion: requires x >= 0");
    const double s = -2.0 * t;
    const double s13 = std::cbrt(s);
    const double xi = s13 * x;
    const double tau = -0.15 * s13 * s13 * s13 * s13 * s13;
    const auto a = airy::eval_ai(xi - exp.mode.nu);
    cplx sum = 0.0;
    cplx w = 1.0;  // (i/τ)^n
    for (int n = 0; n <= exp.order; ++n) {
        sum += w * (horner(exp.p_coeffs[n], xi) * a.ai + horner(exp.q_coeffs[n], xi) * a.aip);
        w *= kI / tau;
    }
    return exp.mode.d * std::pow(s, 1.0 / 6.0) * std::polar(1.0, -exp.mode.nu * tau) * sum;
}

nlohmann::json to_json(const ModalExpansion& e) {
    return {{"j", e.mode.j},
            {"nu", e.mode.nu},
            {"d", e.mode.d},
            {"order", e.order},
            {"phase_convention", "order n coefficients multiply i^n"},
            {"p_coeffs", e.p_coeffs},
            {"q_coeffs", e.q_coeffs}};
}

ModalExpansion expansion_from_json(const nlohmann::json& j) {
    try {
        ModalExpansion e;
        e.mode.j = j.at("j").get<int>();
        e.mode.nu = j.at("nu").get<double>();
        e.mode.d = j.at("d").get<double>();
        e.order = j.at("order").get<int>();
        e.p_coeffs = j.at("p_coeffs").get<std::vector<std::vector<double>>>();
        e.q_coeffs = j.at("q_coeffs").get<std::vector<std::vector<double>>>();
        if (e.order < 0 || e.p_coeffs.size() != static_cast<std::size_t>(e.order + 1) ||
            e.q_coeffs.size() != e.p_coeffs.size())
            throw FormatError("expansion_from_json: coefficient table does not match order");
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("expansion_from_json: ") + ex.what());
    }
}

}  // namespace inflection::modes
