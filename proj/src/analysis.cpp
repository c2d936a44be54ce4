#include "inflection/analysis.hpp"

#include "inflection/errors.hpp"
#include "inflection/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

namespace inflection::analysis {

using searchlight::SearchlightFrame;

double gradient_norm(const SearchlightFrame& f) {
    return trapezoid_norm(first_difference(f.g, f.deta), f.deta);
}

double weighted_norm(const SearchlightFrame& f) {
    cvec w(f.g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = f.eta(i) * f.g[i];
    return trapezoid_norm(w, f.deta);
}

Lemma1Scan lemma1_scan(std::span<const SearchlightFrame> frames, double slope_from) {
    if (frames.size() < 5) throw InsufficientFrames(fmt::format("lemma1_scan: need >= 5 frames, got {}", frames.size()));
    Lemma1Scan s;
    s.slope_from = slope_from;
    for (const auto& f : frames) {
        s.times.push_back(f.t);
        s.norms.push_back(f.norm());
        s.gradient_norms.push_back(gradient_norm(f));
        s.weighted_norms.push_back(weighted_norm(f));
    }
    double sum = 0.0;
    for (double v : s.norms) sum += v;
    s.c0 = sum / static_cast<double>(s.norms.size());
    for (double v : s.norms) s.c0_spread = std::max(s.c0_spread, std::abs(v - s.c0) / s.c0);
    s.c1 = *std::max_element(s.gradient_norms.begin(), s.gradient_norms.end());
    s.c2 = *std::max_element(s.weighted_norms.begin(), s.weighted_norms.end());
    std::vector<double> tt, a, b;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        if (s.times[k] < slope_from) continue;
        tt.push_back(s.times[k]);
        a.push_back(s.gradient_norms[k]);
        b.push_back(s.weighted_norms[k]);
    }
    if (tt.size() >= 2) {
        s.c1_slope = fit_slope(tt, a);
        s.c2_slope = fit_slope(tt, b);
    }
    return s;
}

namespace {

// ∫_a^b of the piecewise-linear interpolant through (t_k, y_k).
double integrate_samples(std::span<const double> t, std::span<const double> y, double a, double b) {
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double l = std::max(a, t[k - 1]), r = std::min(b, t[k]);
        if (!(r > l)) continue;
        const double h = t[k] - t[k - 1];
        auto at = [&](double x) { return y[k - 1] + (y[k] - y[k - 1]) * (x - t[k - 1]) / h; };
        s += 0.5 * (r - l) * (at(l) + at(r));
    }
    return s;
}

}  // namespace

FluxIdentity flux_identity(const SearchlightFrame& early, const SearchlightFrame& late, const evolve::FluxTrace& trace) {
    if (!(early.t >= 2.0 - 1e-12) || !(late.t > early.t))
        throw DomainError("flux_identity: need 2 <= t_early < t_late (tau in (0, 1/2])");
    if (early.g.size() < 5 || late.g.size() < 5)
        throw BoundaryExtractionError("flux_identity: frame too short for a one-sided stencil");
    if (trace.times.empty() || trace.times.front() > early.t + 1e-12 || trace.times.back() < late.t - 1e-12)
        throw BoundaryExtractionError("flux_identity: flux trace does not cover the interval");
    FluxIdentity r;
    r.t_early = early.t;
    r.t_late = late.t;
    std::vector<double> y(trace.times.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double t = trace.times[k];
        y[k] = t * t * t * t * std::norm(trace.flux[k]);
    }
    r.integral = integrate_samples(trace.times, y, early.t, late.t);
    const double ge = gradient_norm(early), gl = gradient_norm(late);
    r.grad_sq_early = ge * ge;
    r.grad_sq_late = gl * gl;
    r.defect = std::abs(r.integral + 3.0 * r.grad_sq_late - 3.0 * r.grad_sq_early) / (3.0 * r.grad_sq_early);
    return r;
}

FluxIntegrals flux_integrals(const evolve::FluxTrace& trace, double t_end) {
    if (trace.times.size() < 2 || trace.times.size() != trace.flux.size())
        throw RangeError("flux_integrals: trace too short");
    const double T = t_end > 0.0 ? t_end : trace.times.back();
    if (trace.times.front() > 1.0 || trace.times.back() < T - 1e-12)
        throw RangeError(fmt::format("flux_integrals: trace [{}, {}] does not cover [1, {}]", trace.times.front(),
                                     trace.times.back(), T));
    if (T < 4.0) throw RangeError("flux_integrals: t_end must be >= 4");
    FluxIntegrals r;
    r.t_end = T;
    const auto& t = trace.times;
    std::vector<double> y(t.size());
    auto saturated = [](double last, double total) { return total == 0.0 || last < 0.05 * total; };

    for (std::size_t k = 0; k < t.size(); ++k) y[k] = std::norm(trace.flux[k]) * t[k] * t[k];
    r.s91 = integrate_samples(t, y, 1.0, T);
    r.s91_saturated = saturated(integrate_samples(t, y, T - 1.0, T), r.s91);
    for (double a = 1.0; a + 1.0 <= T + 1e-12; a += 1.0) r.s91_unit_increments.push_back(integrate_samples(t, y, a, a + 1.0));

    for (int p = 1; p <= 4; ++p) {
        for (std::size_t k = 0; k < t.size(); ++k) y[k] = std::abs(trace.flux[k]) * std::pow(t[k], p);
        r.popov[p - 1] = integrate_samples(t, y, 1.0, T);
        r.popov_saturated[p - 1] = saturated(integrate_samples(t, y, T - 1.0, T), r.popov[p - 1]);
    }
    return r;
}

double seminorm(const evolve::WaveField& field, int alpha, int gamma) {
    if (alpha < 0 || gamma < 0) throw DomainError("seminorm: negative index");
    if (alpha > 3 || gamma > 2) throw OrderTooHigh(fmt::format("seminorm: alpha = {}, gamma = {}", alpha, gamma));
    const double dx = field.grid.dx;
    cvec d;
    if (gamma == 0)
        d = field.values;
    else if (gamma == 1)
        d = first_difference(field.values, dx);
    else
        d = second_difference(field.values, dx);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= std::pow(field.grid.x(static_cast<int>(i)), alpha);
    return trapezoid_norm(d, dx);
}

nlohmann::json to_json(const Lemma1Scan& s) {
    return {{"times", s.times},
            {"norms", s.norms},
            {"gradient_norms", s.gradient_norms},
            {"weighted_norms", s.weighted_norms},
            {"c0", s.c0},
            {"c0_spread", s.c0_spread},
            {"c1", s.c1},
            {"c2", s.c2},
            {"c1_slope", s.c1_slope},
            {"c2_slope", s.c2_slope},
            {"slope_from", s.slope_from}};
}

nlohmann::json to_json(const FluxIntegrals& f) {
    return {{"t_end", f.t_end},
            {"s91_integral", f.s91},
            {"s91_saturated", f.s91_saturated},
            {"s91_unit_increments", f.s91_unit_increments},
            {"popov_integrals", f.popov},
            {"popov_saturated", f.popov_saturated}};
}

nlohmann::json to_json(const DiagnosticsReport& r) {
    auto j = to_json(r.lemma1);
    j["flux_identity_gap"] = r.flux_identity_gap;
    j["flux"] = to_json(r.flux);
    j["s91_integral"] = r.flux.s91;
    j["popov_integrals"] = r.flux.popov;
    j["norm_drift"] = r.norm_drift;
    return j;
}

std::pair<double, double> common_eta_range(const ScatterSetup& setup) {
    if (setup.extraction_times.empty()) throw InsufficientFrames("no extraction times");
    const auto& p = setup.run;
    const double x_max = p.x_max > 0.0 ? p.x_max : evolve::auto_x_max(p.t_end, p.eta_margin);
    const double t_last = *std::max_element(setup.extraction_times.begin(), setup.extraction_times.end());
    double lo = std::isnan(setup.extract.eta_lo) ? -t_last * t_last / 6.0 : setup.extract.eta_lo;
    double hi = setup.extract.eta_hi;
    if (std::isnan(hi)) {
        hi = INFINITY;
        for (double t : setup.extraction_times) hi = std::min(hi, x_max / t - t * t / 6.0);
    }
    return {lo, hi};
}

ModeResult run_mode(int j, const ScatterSetup& setup) {
    auto params = setup.run;
    params.snapshot_times = setup.extraction_times;
    const auto mode = airy::mode(j);
    const auto res = evolve::run(mode, params);
    std::vector<SearchlightFrame> frames;
    for (const auto& s : res.snapshots) frames.push_back(searchlight::to_searchlight(s));
    auto opt = setup.extract;
    std::tie(opt.eta_lo, opt.eta_hi) = common_eta_range(setup);
    return {j, searchlight::extract_g0(frames, opt), res.norm_drift};
}

ScatteringReport scattering_matrix(const std::vector<int>& j_list, const ScatterSetup& setup) {
    for (std::size_t a = 0; a < j_list.size(); ++a)
        for (std::size_t b = a + 1; b < j_list.size(); ++b)
            if (j_list[a] == j_list[b]) throw ConfigError(fmt::format("duplicate mode {} in j_list", j_list[a]));

    std::vector<std::optional<ModeResult>> results(j_list.size());
    std::vector<std::string> errors(j_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < j_list.size();) {
            try {
                results[k] = run_mode(j_list[k], setup);
            } catch (const std::exception& e) {
                errors[k] = ModeFailure(j_list[k], e.what()).what();
            }
        }
    };
    const int nt = std::clamp(setup.threads, 1, static_cast<int>(std::max<std::size_t>(j_list.size(), 1)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ScatteringReport r;
    for (std::size_t k = 0; k < j_list.size(); ++k) {
        if (results[k]) {
            r.modes.push_back(j_list[k]);
            r.amplitudes.push_back(std::move(results[k]->amplitudes));
            r.norm_drifts.push_back(results[k]->norm_drift);
        } else {
            r.failures[j_list[k]] = errors[k];
        }
    }
    const std::size_t J = r.modes.size();
    r.gram.assign(J, std::vector<cplx>(J));
    for (std::size_t a = 0; a < J; ++a) {
        const double h = r.amplitudes[a].deta();
        r.gram[a][a] = trapezoid_norm(r.amplitudes[a].g0, h) * trapezoid_norm(r.amplitudes[a].g0, h);
        for (std::size_t b = a + 1; b < J; ++b) {
            r.gram[a][b] = trapezoid_inner(r.amplitudes[a].g0, r.amplitudes[b].g0, h);
            r.gram[b][a] = std::conj(r.gram[a][b]);
        }
    }
    for (std::size_t a = 0; a < J; ++a)
        for (std::size_t b = 0; b < J; ++b)
            r.unitarity_defect = std::max(r.unitarity_defect, std::abs(r.gram[a][b] - (a == b ? 1.0 : 0.0)));
    return r;
}

nlohmann::json to_json(const ScatteringReport& r) {
    nlohmann::json j;
    j["modes"] = r.modes;
    j["unitarity_defect"] = r.unitarity_defect;
    nlohmann::json gram = nlohmann::json::array();
    for (const auto& row : r.gram) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& v : row) jr.push_back({v.real(), v.imag()});
        gram.push_back(jr);
    }
    j["gram"] = gram;
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t k = 0; k < r.modes.size(); ++k) {
        const auto& a = r.amplitudes[k];
        per[std::to_string(r.modes[k])] = {{"fit_residual", a.fit_residual},
                                           {"resummed_residual", a.resummed_residual},
                                           {"pairwise_differences", a.pairwise_differences},
                                           {"scaled_errors", a.scaled_errors},
                                           {"extraction_times", a.extraction_times},
                                           {"g0_norm", trapezoid_norm(a.g0, a.deta())},
                                           {"norm_drift", r.norm_drifts[k]}};
    }
    j["per_mode"] = per;
    nlohmann::json fails = nlohmann::json::object();
    for (const auto& [m, msg] : r.failures) fails[std::to_string(m)] = msg;
    j["failures"] = fails;
    return j;
}

void write_gram_csv(const ScatteringReport& r, const std::filesystem::path& path) {
    io::Table t;
    t.header = {"i", "j", "re", "im"};
    for (std::size_t a = 0; a < r.modes.size(); ++a)
        for (std::size_t b = 0; b < r.modes.size(); ++b)
            t.rows.push_back({static_cast<double>(r.modes[a]), static_cast<double>(r.modes[b]), r.gram[a][b].real(),
                              r.gram[a][b].imag()});
    io::write_csv(path, t);
}

}  // namespace inflection::analysis
