#include "inflection/commands.hpp"

#include "inflection/airy.hpp"
#include "inflection/analysis.hpp"
#include "inflection/errors.hpp"
#include "inflection/io.hpp"
#include "inflection/modes.hpp"
#include "inflection/searchlight.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace inflection::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const IoError*>(&e) ||
        dynamic_cast<const FormatError*>(&e))
        return kExitUser;
    return kExitBreach;
}

std::string error_kind(const std::exception& e) {
#define KIND(T) \
    if (dynamic_cast<const T*>(&e)) return #T
    KIND(ConfigError);
    KIND(IoError);
    KIND(FormatError);
    KIND(WindowBreach);
    KIND(GridTooCoarse);
    KIND(SolverFailure);
    KIND(NonFinite);
    KIND(OutOfRange);
    KIND(DomainError);
    KIND(OrderTooHigh);
    KIND(GridMismatch);
    KIND(InsufficientFrames);
    KIND(InterpolationError);
    KIND(BoundaryExtractionError);
    KIND(RangeError);
    KIND(ModeFailure);
#undef KIND
    return "Error";
}

std::string time_tag(double t) { return fmt::format("{}", t); }

namespace {

json config_json(const RunConfig& c) {
    return {{"mode_j", c.mode_j},
            {"n_expansion", c.n_expansion},
            {"t_start", c.t_start},
            {"t_end", c.t_end},
            {"dx", c.dx},
            {"dt", c.dt},
            {"x_max", c.x_max},
            {"x_max_auto", c.x_max_auto},
            {"eta_margin", c.eta_margin},
            {"tail_tol", c.tail_tol},
            {"snapshot_times", c.snapshot_times},
            {"extraction_times", c.extraction_times},
            {"j_list", c.j_list},
            {"output_dir", c.output_dir.string()}};
}

json amplitude_summary(const searchlight::AmplitudeSeries& a) {
    return {{"fit_residual", a.fit_residual},
            {"resummed_residual", a.resummed_residual},
            {"pairwise_differences", a.pairwise_differences},
            {"scaled_errors", a.scaled_errors},
            {"extraction_times", a.extraction_times},
            {"g0_norm", trapezoid_norm(a.g0, a.deta())},
            {"g0_two_term_norm", trapezoid_norm(a.g0_two_term, a.deta())},
            {"eta_range", {a.eta.front(), a.eta.back()}}};
}

// Times on a 0.25 lattice from 2 to t_end, used for the norm scans.
std::vector<double> scan_times(double t_end) {
    std::vector<double> t;
    for (int k = 0; 2.0 + 0.25 * k <= t_end + 1e-12; ++k) t.push_back(2.0 + 0.25 * k);
    return t;
}

void write_field(const evolve::WaveField& f, const fs::path& path) {
    io::Table t{{"x", "re", "im"}, {}};
    t.rows.reserve(f.values.size());
    for (int i = 0; i <= f.grid.n; ++i) t.rows.push_back({f.grid.x(i), f.values[i].real(), f.values[i].imag()});
    io::write_csv(path, t);
}

void write_frame(const searchlight::SearchlightFrame& f, const fs::path& path) {
    io::Table t{{"eta", "re", "im"}, {}};
    t.rows.reserve(f.g.size());
    for (std::size_t i = 0; i < f.g.size(); ++i) t.rows.push_back({f.eta(i), f.g[i].real(), f.g[i].imag()});
    io::write_csv(path, t);
}

void write_flux(const evolve::FluxTrace& tr, const fs::path& path) {
    io::Table t{{"t", "re", "im"}, {}};
    t.rows.reserve(tr.times.size());
    for (std::size_t k = 0; k < tr.times.size(); ++k) t.rows.push_back({tr.times[k], tr.flux[k].real(), tr.flux[k].imag()});
    io::write_csv(path, t);
}

int fail(const fs::path& dir, json& report, const fs::path& report_name, const std::exception& e, std::ostream& log) {
    const int code = exit_code_for(e);
    report["status"] = "failed";
    report["error"] = e.what();
    report["error_type"] = error_kind(e);
    log << "error (" << error_kind(e) << "): " << e.what() << "\n";
    try {
        io::write_json(dir / report_name, report);
        io::write_text(dir / "FAILED", error_kind(e) + ": " + e.what() + "\n");
    } catch (const std::exception& w) {
        log << "could not record the failure: " << w.what() << "\n";
    }
    return code;
}

void clear_marker(const fs::path& dir) {
    std::error_code ec;
    fs::remove(dir / "FAILED", ec);
}

// Everything a single run produces, shared by cmd_run and cmd_convergence.
struct RunBundle {
    evolve::RunResult result;
    std::vector<searchlight::SearchlightFrame> extraction_frames;
    std::vector<searchlight::SearchlightFrame> scan_frames;
    searchlight::AmplitudeSeries amplitudes;
    analysis::DiagnosticsReport diagnostics;
    bool have_lemma1 = false, have_flux_identity = false, have_flux_integrals = false;
    analysis::FluxIdentity flux_identity;
};

RunBundle run_bundle(const RunConfig& cfg, const std::vector<double>& extra_times = {}) {
    auto params = cfg.run_params();
    std::set<double> times(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
    times.insert(cfg.extraction_times.begin(), cfg.extraction_times.end());
    const auto scan = scan_times(cfg.t_end);
    times.insert(scan.begin(), scan.end());
    times.insert(extra_times.begin(), extra_times.end());
    params.snapshot_times.assign(times.begin(), times.end());

    RunBundle b;
    b.result = evolve::run(airy::mode(cfg.mode_j), params);
    auto at = [&](double t) -> const evolve::WaveField& {
        for (const auto& s : b.result.snapshots)
            if (s.time == t) return s;
        throw RangeError(fmt::format("no snapshot at t = {}", t));
    };
    for (double t : cfg.extraction_times) b.extraction_frames.push_back(searchlight::to_searchlight(at(t)));
    for (double t : scan) b.scan_frames.push_back(searchlight::to_searchlight(at(t)));
    b.amplitudes = searchlight::extract_g0(b.extraction_frames);
    b.diagnostics.norm_drift = b.result.norm_drift;
    if (b.scan_frames.size() >= 5) {
        b.diagnostics.lemma1 = analysis::lemma1_scan(b.scan_frames);
        b.have_lemma1 = true;
        std::size_t late = 0;
        for (std::size_t k = 0; k < scan.size(); ++k)
            if (scan[k] <= 5.0 + 1e-12) late = k;
        if (late > 0) {
            b.flux_identity = analysis::flux_identity(b.scan_frames.front(), b.scan_frames[late], b.result.flux);
            b.diagnostics.flux_identity_gap = b.flux_identity.defect;
            b.have_flux_identity = true;
        }
    }
    if (cfg.t_end >= 4.0) {
        b.diagnostics.flux = analysis::flux_integrals(b.result.flux, cfg.t_end);
        b.have_flux_integrals = true;
    }
    return b;
}

json bundle_json(const RunBundle& b) {
    json j = analysis::to_json(b.diagnostics);
    if (!b.have_lemma1) {
        for (const char* k : {"c0", "c1", "c2", "c0_spread", "c1_slope", "c2_slope"}) j[k] = nullptr;
    }
    if (!b.have_flux_integrals) {
        j["flux"] = nullptr;
        j["s91_integral"] = nullptr;
        j["popov_integrals"] = nullptr;
    }
    j["flux_identity"] = b.have_flux_identity ? json{{"t_early", b.flux_identity.t_early},
                                                     {"t_late", b.flux_identity.t_late},
                                                     {"integral", b.flux_identity.integral},
                                                     {"grad_sq_early", b.flux_identity.grad_sq_early},
                                                     {"grad_sq_late", b.flux_identity.grad_sq_late},
                                                     {"defect", b.flux_identity.defect}}
                                              : json(nullptr);
    if (!b.have_flux_identity) j["flux_identity_gap"] = nullptr;
    j["extraction"] = amplitude_summary(b.amplitudes);
    j["max_tail_fraction"] = b.result.max_tail_fraction;
    return j;
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& log) {
    const fs::path dir = cfg.output_dir;
    try {
        io::ensure_writable_dir(dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitUser;
    }
    json report{{"config", config_json(cfg)}};
    try {
        clear_marker(dir);
        const auto b = run_bundle(cfg);
        for (double t : cfg.snapshot_times) {
            for (const auto& s : b.result.snapshots) {
                if (s.time != t) continue;
                write_field(s, dir / ("field_t" + time_tag(t) + ".csv"));
                if (t >= 0.5) write_frame(searchlight::to_searchlight(s), dir / ("searchlight_t" + time_tag(t) + ".csv"));
            }
        }
        searchlight::write_amplitudes_csv(b.amplitudes, dir / "g0.csv");
        write_flux(b.result.flux, dir / "flux.csv");
        report.update(bundle_json(b));
        const auto grid = evolve::Grid1D::from_spacing(cfg.x_max, cfg.dx);
        report["grid"] = {{"n", grid.n}, {"dx", grid.dx}, {"x_max", grid.x_max}};
        report["status"] = "ok";
        io::write_json(dir / "diagnostics.json", report);
        log << fmt::format("run j={} done: norm drift {:.3e}, |g0| = {:.6f}, fit residual {:.4f}\n", cfg.mode_j,
                           b.result.norm_drift, trapezoid_norm(b.amplitudes.g0, b.amplitudes.deta()),
                           b.amplitudes.fit_residual);
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(dir, report, "diagnostics.json", e, log);
    }
}

int cmd_scatter(const RunConfig& cfg, int threads, std::ostream& log) {
    const fs::path dir = cfg.output_dir;
    try {
        io::ensure_writable_dir(dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitUser;
    }
    json report{{"config", config_json(cfg)}};
    try {
        clear_marker(dir);
        analysis::ScatterSetup setup;
        setup.run = cfg.run_params();
        setup.run.snapshot_times.clear();
        setup.extraction_times = cfg.extraction_times;
        setup.threads = threads;
        const auto r = analysis::scattering_matrix(cfg.j_list, setup);
        analysis::write_gram_csv(r, dir / "gram.csv");
        for (std::size_t k = 0; k < r.modes.size(); ++k)
            searchlight::write_amplitudes_csv(r.amplitudes[k], dir / fmt::format("g0_j{}.csv", r.modes[k]));
        report.update(analysis::to_json(r));
        report["status"] = r.failures.empty() ? "ok" : "partial";
        io::write_json(dir / "scattering.json", report);
        log << fmt::format("scatter: {} of {} modes, unitarity defect {:.3e}\n", r.modes.size(), cfg.j_list.size(),
                           r.unitarity_defect);
        for (const auto& [j, msg] : r.failures) log << "  " << msg << "\n";
        if (!r.failures.empty()) {
            io::write_text(dir / "FAILED", fmt::format("{} mode(s) failed\n", r.failures.size()));
            return kExitBreach;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(dir, report, "scattering.json", e, log);
    }
}

int cmd_convergence(const RunConfig& cfg, std::ostream& log) {
    const fs::path dir = cfg.output_dir;
    try {
        io::ensure_writable_dir(dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitUser;
    }
    json report{{"config", config_json(cfg)}};
    try {
        clear_marker(dir);
        std::vector<RunBundle> levels;
        json lv = json::array();
        for (int l = 0; l < 3; ++l) {
            RunConfig c = cfg;
            c.dx = cfg.dx / (1 << l);
            c.dt = cfg.dt / (1 << l);
            levels.push_back(run_bundle(c, {cfg.t_end}));
            const auto& b = levels.back();
            json e = bundle_json(b);
            e["dx"] = c.dx;
            e["dt"] = c.dt;
            lv.push_back(e);
            log << fmt::format("level {}: dx={} dt={} norm drift {:.2e} |g0|={:.6f}\n", l, c.dx, c.dt,
                               b.result.norm_drift, trapezoid_norm(b.amplitudes.g0, b.amplitudes.deta()));
        }
        report["levels"] = lv;
        // final-time field differences on the coarse grid
        auto final_field = [](const RunBundle& b) -> const evolve::WaveField& { return b.result.snapshots.back(); };
        std::vector<double> diffs;
        for (int l = 0; l < 2; ++l) {
            const auto& a = final_field(levels[l]);
            const auto& f = final_field(levels[l + 1]);
            if (f.grid.n != 2 * a.grid.n) throw GridMismatch("convergence: grids are not nested");
            cvec d(a.values.size());
            for (int i = 0; i <= a.grid.n; ++i) d[i] = a.values[i] - f.values[2 * i];
            diffs.push_back(trapezoid_norm(d, a.grid.dx));
        }
        const double order = std::log2(diffs[0] / diffs[1]);
        report["field_differences"] = diffs;
        report["observed_order"] = order;
        report["status"] = "ok";
        io::write_json(dir / "convergence.json", report);
        log << fmt::format("observed order {:.3f} (differences {:.3e}, {:.3e})\n", order, diffs[0], diffs[1]);
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(dir, report, "convergence.json", e, log);
    }
}

int cmd_selftest(std::ostream& log) {
    int failures = 0;
    auto report = [&](bool ok, const std::string& name, const std::string& detail) {
        log << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };
    try {
        const auto a0 = airy::eval_ai(0.0);
        // Ai(0) = 3^{-2/3}/Γ(2/3), Ai'(0) = -3^{-1/3}/Γ(1/3)
        const double ai0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
        const double aip0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
        report(std::abs(a0.ai - ai0) < 1e-14 && std::abs(a0.aip - aip0) < 1e-14, "airy at 0",
               fmt::format("Ai={:.16f} Ai'={:.16f}", a0.ai, a0.aip));
        const double nu1 = airy::zero(1);
        report(std::abs(nu1 - 2.338107410459767) < 1e-10, "first zero", fmt::format("{:.15f}", nu1));
        bool monotone = true, bracket = true;
        double prev = 0.0;
        for (int j = 1; j <= 50; ++j) {
            const double nu = airy::zero(j);
            monotone = monotone && nu > prev;
            prev = nu;
            bracket = bracket && airy::eval_ai(-nu - 1e-8).ai * airy::eval_ai(-nu + 1e-8).ai < 0.0;
        }
        report(monotone && bracket, "zeros 1..50", "increasing, sign change within 1e-8");
        // ∫₀^∞ Ai(u - ν)² du = Ai'(-ν)², by composite Simpson on [0, 30]
        const double nu = airy::zero(1);
        const int n = 30000;
        const double h = 30.0 / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double v = airy::eval_ai(i * h - nu).ai;
            s += w * v * v;
        }
        s *= h / 3.0;
        const double aip = airy::eval_ai(-nu).aip;
        report(std::abs(s - aip * aip) < 1e-10, "mode normalisation", fmt::format("quadrature {:.12f} vs {:.12f}", s, aip * aip));
        const auto m = airy::mode(1);
        report(std::abs(modes::incoming(m, 0.0, -3.0)) < 1e-12, "incoming Dirichlet", "psi(0,t) = 0");
        const auto e = modes::derive_expansion(m, 4);
        bool q0 = true;
        for (std::size_t k = 1; k < e.q_coeffs.size(); ++k) q0 = q0 && e.q_coeffs[k][0] == 0.0;
        report(q0 && e.p_coeffs[0] == std::vector<double>{1.0}, "expansion structure", "P0 = 1, Q(0) = 0");
    } catch (const std::exception& ex) {
        report(false, "exception", ex.what());
    }
    return failures ? kExitBreach : kExitOk;
}

}  // namespace inflection::cli
