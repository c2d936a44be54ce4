#pragma once

#include "inflection/evolve.hpp"
#include "inflection/numerics.hpp"

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace inflection::searchlight {

// G(η, t) on the η-grid induced by the x-grid: η_i = x_i/t - t²/6.
struct SearchlightFrame {
    double t = 0.0;
    evolve::Grid1D source;  // x-grid the frame came from
    double eta0 = 0.0;      // = -t²/6, the image of x = 0
    double deta = 0.0;      // = dx / t
    cvec g;
    static constexpr const char* phase_convention =
        "psi = t^(-1/2) exp{i(7/120)t^5 + (i/2)eta t^3 + (i/2)eta^2 t} G";

    double tau() const { return 1.0 / t; }
    double eta(std::size_t i) const { return eta0 + deta * static_cast<double>(i); }
    double norm() const { return trapezoid_norm(g, deta); }
};

struct ModalFrame {
    double t = 0.0;
    double tau_modal = 0.0;  // -(3/20)(-2t)^{5/3}
    double dxi = 0.0;        // xi_i = i·dxi
    cvec psi_tilde;
    double norm() const { return trapezoid_norm(psi_tilde, dxi); }
};

struct ParabolicFrame {
    double t = 0.0;
    double zeta0 = 0.0;  // -t³/6
    double dzeta = 0.0;  // = dx
    cvec phi;
    double norm() const { return trapezoid_norm(phi, dzeta); }
};

SearchlightFrame to_searchlight(const evolve::WaveField& field);
evolve::WaveField from_searchlight(const SearchlightFrame& frame);
ModalFrame to_modal_frame(const evolve::WaveField& field);
ParabolicFrame to_parabolic_frame(const evolve::WaveField& field);
// η = ζ/t, G = t^{1/2} e^{-iη²t/2} φ
SearchlightFrame pseudoconformal(const ParabolicFrame& frame, const evolve::Grid1D& source);

struct AmplitudeSeries {
    std::vector<double> eta;  // uniform
    cvec g0;
    cvec g1;  // empty if absent
    double fit_residual = 0.0;
    std::vector<double> extraction_times;

    // diagnostics of the extraction
    cvec g0_two_term;                         // g0 of the plain two-term fit
    cvec last_frame;                          // G at the latest time, resampled
    std::vector<double> pairwise_differences;  // ‖G(t_k) - G(t_{k+1})‖
    double resummed_residual = 0.0;           // two-term residual after free back-propagation
    std::vector<double> scaled_errors;        // t_k ‖G(t_k) - g0‖

    double deta() const { return eta.size() > 1 ? eta[1] - eta[0] : 0.0; }
    bool has_g1() const { return !g1.empty(); }
};

struct ExtractOptions {
    double deta = 0.01;
    // NaN: lower end -t_last²/6, upper end the smallest frame upper end
    double eta_lo = std::numeric_limits<double>::quiet_NaN();
    double eta_hi = std::numeric_limits<double>::quiet_NaN();
    // Propagate each frame back to τ = 0 with the free flow before the fit.
    bool resum = true;
    int pad_factor = 4;
};

// G(η, t_k) ≈ g0 + g1/t_k. With resum set, g0 comes from the fit of the
// back-propagated frames and g1 from the fit of the raw frames.
AmplitudeSeries extract_g0(std::span<const SearchlightFrame> frames, const ExtractOptions& opt = {});

// -i/(2m+2) · gm''. Throws GridTooCoarse if the h and 2h second differences disagree by > 5%.
cvec recur_amplitude(std::span<const cplx> gm, double h, int m);

inline constexpr int kMaxOutgoingOrder = 4;

// Outgoing asymptotic solution built from a (numerically) compactly supported G₀.
class OutgoingAsymptotic {
public:
    OutgoingAsymptotic(std::vector<double> eta, cvec g0, int order);

    double support_radius() const { return lambda_; }  // Λ
    double t_star() const;                             // sqrt(6Λ) + 1
    int order() const { return order_; }
    const cvec& amplitude(int m) const { return g_.at(m); }

    cplx operator()(double x, double t) const;
    // ‖L ψ^(N)‖ over x, evaluated in the η frame
    double residual_norm(double t) const;

private:
    void check_time(double t) const;
    std::vector<double> eta_;
    std::vector<cvec> g_;
    int order_;
    double lambda_ = 0.0;
};

cplx outgoing_asymptotic(std::span<const double> eta, std::span<const cplx> g0, int order, double x, double t);

// Λ such that the mass of g0 outside [-Λ, Λ] is at most rel·‖g0‖².
double support_radius(std::span<const double> eta, std::span<const cplx> g0, double rel = 1e-8);

void write_amplitudes_csv(const AmplitudeSeries& a, const std::filesystem::path& path);
AmplitudeSeries read_amplitudes_csv(const std::filesystem::path& path);

}  // namespace inflection::searchlight
