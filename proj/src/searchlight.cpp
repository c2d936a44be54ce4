#include "inflection/searchlight.hpp"

#include "inflection/errors.hpp"
#include "inflection/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace inflection::searchlight {

namespace {

// 7/120 t⁵ + ½ η t³ + ½ η² t
double searchlight_phase(double eta, double t) {
    const double t2 = t * t;
    return 7.0 / 120.0 * t2 * t2 * t + 0.5 * eta * t2 * t + 0.5 * eta * eta * t;
}

double eta_of(double x, double t) { return x / t - t * t / 6.0; }

}  // namespace

SearchlightFrame to_searchlight(const evolve::WaveField& field) {
    const double t = field.time;
    if (!(t >= 0.5)) throw DomainError(fmt::format("to_searchlight: t = {} < 0.5", t));
    SearchlightFrame f;
    f.t = t;
    f.source = field.grid;
    f.eta0 = -t * t / 6.0;
    f.deta = field.grid.dx / t;
    f.g.resize(field.values.size());
    const double st = std::sqrt(t);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const double eta = eta_of(field.grid.x(static_cast<int>(i)), t);
        f.g[i] = st * std::polar(1.0, -searchlight_phase(eta, t)) * field.values[i];
    }
    return f;
}

evolve::WaveField from_searchlight(const SearchlightFrame& frame) {
    const double t = frame.t;
    if (!(t >= 0.5)) throw DomainError("from_searchlight: t < 0.5");
    evolve::WaveField w{frame.source, t, cvec(frame.g.size())};
    const double st = 1.0 / std::sqrt(t);
    for (std::size_t i = 0; i < frame.g.size(); ++i) {
        const double eta = eta_of(frame.source.x(static_cast<int>(i)), t);
        w.values[i] = st * std::polar(1.0, searchlight_phase(eta, t)) * frame.g[i];
    }
    return w;
}

ModalFrame to_modal_frame(const evolve::WaveField& field) {
    const double t = field.time;
    if (t > -1.0) throw DomainError(fmt::format("to_modal_frame: t = {} > -1", t));
    const double s = -2.0 * t;
    const double s13 = std::cbrt(s);
    ModalFrame m;
    m.t = t;
    m.tau_modal = -0.15 * s13 * s13 * s13 * s13 * s13;
    m.dxi = s13 * field.grid.dx;
    const double scale = std::pow(s, -1.0 / 6.0);
    m.psi_tilde.resize(field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i) m.psi_tilde[i] = scale * field.values[i];
    return m;
}

ParabolicFrame to_parabolic_frame(const evolve::WaveField& field) {
    const double t = field.time;
    const double t2 = t * t;
    ParabolicFrame p;
    p.t = t;
    p.zeta0 = -t2 * t / 6.0;
    p.dzeta = field.grid.dx;
    p.phi.resize(field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const double zeta = field.grid.x(static_cast<int>(i)) - t2 * t / 6.0;
        p.phi[i] = std::polar(1.0, -0.5 * zeta * t2 - 7.0 / 120.0 * t2 * t2 * t) * field.values[i];
        if (!std::isfinite(p.phi[i].real()) || !std::isfinite(p.phi[i].imag()))
            throw NonFinite("to_parabolic_frame: non-finite sample");
    }
    return p;
}

SearchlightFrame pseudoconformal(const ParabolicFrame& pf, const evolve::Grid1D& source) {
    const double t = pf.t;
    if (!(t >= 0.5)) throw DomainError("pseudoconformal: t < 0.5");
    if (static_cast<int>(pf.phi.size()) != source.n + 1) throw GridMismatch("pseudoconformal: grid mismatch");
    SearchlightFrame f;
    f.t = t;
    f.source = source;
    f.eta0 = -t * t / 6.0;
    f.deta = source.dx / t;
    f.g.resize(pf.phi.size());
    const double st = std::sqrt(t);
    for (std::size_t i = 0; i < pf.phi.size(); ++i) {
        const double zeta = source.x(static_cast<int>(i)) - t * t * t / 6.0;
        const double eta = zeta / t;
        f.g[i] = st * std::polar(1.0, -0.5 * eta * eta * t) * pf.phi[i];
    }
    return f;
}

AmplitudeSeries extract_g0(std::span<const SearchlightFrame> frames, const ExtractOptions& opt) {
    if (frames.size() < 3) throw InsufficientFrames(fmt::format("extract_g0: need >= 3 frames, got {}", frames.size()));
    for (std::size_t k = 1; k < frames.size(); ++k)
        if (!(frames[k].t > frames[k - 1].t)) throw InsufficientFrames("extract_g0: frame times must increase");
    if (!(opt.deta > 0.0)) throw InterpolationError("extract_g0: deta must be positive");

    const double t_last = frames.back().t;
    double lo = std::isnan(opt.eta_lo) ? -t_last * t_last / 6.0 : opt.eta_lo;
    double hi = opt.eta_hi;
    if (std::isnan(hi)) {
        hi = INFINITY;
        for (const auto& f : frames) hi = std::min(hi, f.eta(f.g.size() - 1));
    }
    if (!(hi - lo >= 4.0 * opt.deta)) throw InterpolationError("extract_g0: common eta support is empty");
    const auto npts = static_cast<std::size_t>(std::floor((hi - lo) / opt.deta + 1e-9)) + 1;

    AmplitudeSeries a;
    a.eta.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) a.eta[i] = lo + opt.deta * static_cast<double>(i);
    const std::size_t K = frames.size();
    std::vector<cvec> G(K, cvec(npts));
    for (std::size_t k = 0; k < K; ++k) {
        const auto& f = frames[k];
        a.extraction_times.push_back(f.t);
        for (std::size_t i = 0; i < npts; ++i)
            G[k][i] = a.eta[i] < f.eta0 ? cplx{} : cubic_sample(f.g, f.eta0, f.deta, a.eta[i]);
    }

    // per-point least squares in the basis {1, 1/t}
    double S0 = static_cast<double>(K), S1 = 0, S2 = 0;
    for (double t : a.extraction_times) {
        S1 += 1.0 / t;
        S2 += 1.0 / (t * t);
    }
    const double det = S0 * S2 - S1 * S1;
    auto fit = [&](const std::vector<cvec>& Y, cvec& c0, cvec& c1) {
        c0.assign(npts, 0.0);
        c1.assign(npts, 0.0);
        for (std::size_t i = 0; i < npts; ++i) {
            cplx b0 = 0, b1 = 0;
            for (std::size_t k = 0; k < K; ++k) {
                b0 += Y[k][i];
                b1 += Y[k][i] / a.extraction_times[k];
            }
            c0[i] = (S2 * b0 - S1 * b1) / det;
            c1[i] = (S0 * b1 - S1 * b0) / det;
        }
        double worst = 0.0;
        cvec r(npts);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t i = 0; i < npts; ++i) r[i] = Y[k][i] - c0[i] - c1[i] / a.extraction_times[k];
            worst = std::max(worst, trapezoid_norm(r, opt.deta));
        }
        return worst;
    };

    cvec g1_raw;
    a.fit_residual = fit(G, a.g0_two_term, g1_raw);
    a.g1 = g1_raw;
    if (opt.resum) {
        std::vector<cvec> B(K);
        for (std::size_t k = 0; k < K; ++k) B[k] = free_flow(G[k], opt.deta, -1.0 / a.extraction_times[k], opt.pad_factor);
        cvec d1;
        a.resummed_residual = fit(B, a.g0, d1);
    } else {
        a.g0 = a.g0_two_term;
        a.resummed_residual = a.fit_residual;
    }
    a.last_frame = G.back();
    cvec diff(npts);
    for (std::size_t k = 0; k + 1 < K; ++k) {
        for (std::size_t i = 0; i < npts; ++i) diff[i] = G[k][i] - G[k + 1][i];
        a.pairwise_differences.push_back(trapezoid_norm(diff, opt.deta));
    }
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < npts; ++i) diff[i] = G[k][i] - a.g0[i];
        a.scaled_errors.push_back(a.extraction_times[k] * trapezoid_norm(diff, opt.deta));
    }
    return a;
}

cvec recur_amplitude(std::span<const cplx> gm, double h, int m) {
    if (m < 0) throw DomainError("recur_amplitude: negative index");
    cvec d = second_difference(gm, h);
    // grid-halving check: compare with the stencil of spacing 2h at even points
    double num = 0.0, den = 0.0;
    for (std::size_t i = 2; i + 2 < gm.size(); i += 2) {
        const cplx d2 = (gm[i + 2] - 2.0 * gm[i] + gm[i - 2]) / (4.0 * h * h);
        num += std::norm(d[i] - d2);
        den += std::norm(d[i]);
    }
    double scale = 0.0;
    for (const auto& v : gm) scale = std::max(scale, std::abs(v));
    if (den > 1e-24 * scale * scale / (h * h * h * h) && std::sqrt(num) > 0.05 * std::sqrt(den))
        throw GridTooCoarse(fmt::format("recur_amplitude: h and 2h second differences differ by {:.3g}",
                                        std::sqrt(num / den)));
    const cplx f = -kI / (2.0 * m + 2.0);
    for (auto& v : d) v *= f;
    return d;
}

double support_radius(std::span<const double> eta, std::span<const cplx> g0, double rel) {
    if (eta.size() != g0.size()) throw GridMismatch("support_radius: length mismatch");
    std::vector<std::size_t> idx(eta.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return std::abs(eta[a]) > std::abs(eta[b]); });
    double total = 0.0;
    for (const auto& v : g0) total += std::norm(v);
    double outside = 0.0;
    for (auto i : idx) {
        outside += std::norm(g0[i]);
        if (outside > rel * total) return std::abs(eta[i]);
    }
    return 0.0;
}

OutgoingAsymptotic::OutgoingAsymptotic(std::vector<double> eta, cvec g0, int order)
    : eta_(std::move(eta)), order_(order) {
    if (order < 0) throw DomainError("outgoing_asymptotic: negative order");
    if (order > kMaxOutgoingOrder) throw OrderTooHigh(fmt::format("outgoing_asymptotic: N = {} > 4", order));
    if (eta_.size() != g0.size() || eta_.size() < 8) throw GridMismatch("outgoing_asymptotic: bad grid");
    lambda_ = searchlight::support_radius(eta_, g0);
    const double h = eta_[1] - eta_[0];
    g_.push_back(std::move(g0));
    for (int m = 0; m < order; ++m) g_.push_back(recur_amplitude(g_.back(), h, m));
}

double OutgoingAsymptotic::t_star() const { return std::sqrt(6.0 * lambda_) + 1.0; }

void OutgoingAsymptotic::check_time(double t) const {
    if (!(t >= t_star() + 1.0))
        throw DomainError(fmt::format("outgoing_asymptotic: t = {} below t_* + 1 = {}", t, t_star() + 1.0));
}

cplx OutgoingAsymptotic::operator()(double x, double t) const {
    check_time(t);
    const double eta = eta_of(x, t);
    if (eta < -lambda_ || eta > lambda_) return 0.0;
    const double h = eta_[1] - eta_[0];
    cplx G = 0.0;
    double w = 1.0;
    for (int m = 0; m <= order_; ++m) {
        G += w * cubic_sample(g_[m], eta_.front(), h, eta);
        w /= t;
    }
    return std::polar(1.0 / std::sqrt(t), searchlight_phase(eta, t)) * G;
}

double OutgoingAsymptotic::residual_norm(double t) const {
    check_time(t);
    // L ψ = t^{-5/2} e^{iΦ} [i t² G_t + ½ G_ηη]  ⇒  ‖Lψ‖_x = t^{-2} ‖i t² G_t + ½ G_ηη‖_η
    const double h = eta_[1] - eta_[0];
    const std::size_t n = eta_.size();
    cvec G(n, 0.0), Gt(n, 0.0);
    for (int m = 0; m <= order_; ++m) {
        const double tm = std::pow(t, -m);
        const double dtm = -m * std::pow(t, -m - 1);
        for (std::size_t i = 0; i < n; ++i) {
            G[i] += tm * g_[m][i];
            Gt[i] += dtm * g_[m][i];
        }
    }
    const cvec Gxx = second_difference(G, h);
    cvec R(n);
    for (std::size_t i = 0; i < n; ++i) R[i] = kI * t * t * Gt[i] + 0.5 * Gxx[i];
    return trapezoid_norm(R, h) / (t * t);
}

cplx outgoing_asymptotic(std::span<const double> eta, std::span<const cplx> g0, int order, double x, double t) {
    return OutgoingAsymptotic({eta.begin(), eta.end()}, {g0.begin(), g0.end()}, order)(x, t);
}

void write_amplitudes_csv(const AmplitudeSeries& a, const std::filesystem::path& path) {
    io::Table t;
    t.header = {"eta", "re_g0", "im_g0", "re_g1", "im_g1"};
    t.rows.reserve(a.eta.size());
    for (std::size_t i = 0; i < a.eta.size(); ++i) {
        const cplx g1 = a.has_g1() ? a.g1[i] : cplx{};
        t.rows.push_back({a.eta[i], a.g0[i].real(), a.g0[i].imag(), g1.real(), g1.imag()});
    }
    io::write_csv(path, t);
}

AmplitudeSeries read_amplitudes_csv(const std::filesystem::path& path) {
    const auto t = io::read_csv(path);
    const std::vector<std::string> want{"eta", "re_g0", "im_g0", "re_g1", "im_g1"};
    if (t.header != want) throw FormatError(path.string() + ": unexpected amplitude columns");
    AmplitudeSeries a;
    bool any_g1 = false;
    for (const auto& r : t.rows) {
        a.eta.push_back(r[0]);
        a.g0.emplace_back(r[1], r[2]);
        a.g1.emplace_back(r[3], r[4]);
        any_g1 = any_g1 || r[3] != 0.0 || r[4] != 0.0;
    }
    if (!any_g1) a.g1.clear();
    return a;
}

}  // namespace inflection::searchlight
