#include "inflection/evolve.hpp"

#include "inflection/errors.hpp"
#include "inflection/modes.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace inflection::evolve {

Grid1D Grid1D::from_intervals(double x_max, int n) {
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ConfigError("grid: x_max must be positive");
    if (n < 16) throw ConfigError("grid: need at least 16 intervals");
    return {x_max, n, x_max / n};
}

Grid1D Grid1D::from_spacing(double x_max, double dx_target) {
    if (!(dx_target > 0.0)) throw ConfigError("grid: dx must be positive");
    const double r = x_max / dx_target;
    if (!(r < 1e9)) throw ConfigError("grid: too many points");
    return from_intervals(x_max, static_cast<int>(std::ceil(r - 1e-9)));
}

double WaveField::norm() const { return trapezoid_norm(values, grid.dx); }

namespace {

double tail_mass(std::span<const cplx> v, double dx) {
    const std::size_t n = v.size() - 1;
    const auto first = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
    double s = 0.0;
    for (std::size_t i = first; i <= n; ++i) s += std::norm(v[i]);
    return s * dx;
}

}  // namespace

double WaveField::tail_fraction() const {
    const double nn = norm();
    if (nn == 0.0) return 0.0;
    return tail_mass(values, grid.dx) / (nn * nn);
}

double auto_x_max(double t_end, double eta_margin) {
    // the floor covers the spread-out field around t = 0..2, before the beam forms
    return std::max(t_end * t_end * t_end / 6.0 + eta_margin * t_end, kMinAutoXMax);
}

double max_dx(double t_start, double t_end, double eta_margin) {
    const double a = 0.05 * std::pow(-2.0 * t_start, -1.0 / 3.0);
    const double b = 0.2 * 2.0 * kPi / (0.5 * t_end * t_end + eta_margin);
    return std::min(a, b);
}

WaveField init_incoming(const airy::AiryMode& mode, int order, const Grid1D& grid, double t_start) {
    if (t_start > -2.0) throw DomainError("init_incoming: requires t_start <= -2");
    const double limit = 0.05 * std::pow(-2.0 * t_start, -1.0 / 3.0);
    if (grid.dx > limit)
        throw GridTooCoarse(fmt::format("init_incoming: dx = {} exceeds {} at t_start = {}", grid.dx, limit, t_start));
    const auto exp = modes::derive_expansion(mode, order);
    WaveField f{grid, t_start, cvec(grid.n + 1)};
    for (int i = 1; i <= grid.n; ++i) f.values[i] = modes::eval_expansion(exp, grid.x(i), t_start);
    f.values[0] = 0.0;
    return f;
}

namespace {

// θ(t, x) = t² x / 2 - t⁵/40; ψ = e^{iθ} χ removes the linear potential for t > 0.
double gauge_phase(double t, double x) {
    const double t2 = t * t;
    return 0.5 * t2 * x - t2 * t2 * t / 40.0;
}

enum class Gauge { length, velocity };

// Crank–Nicolson on the interior points of one state vector. Workspace is reused.
class Stepper {
public:
    explicit Stepper(const Grid1D& g) : grid_(g), m_(g.n - 1), sub_(m_), diag_(m_), sup_(m_), rhs_(m_) {}

    // state holds all n+1 points; endpoints stay 0
    void advance(cvec& state, double t_mid, double dt, Gauge gauge, bool potential) {
        const double dx = grid_.dx;
        const double k2 = 1.0 / (dx * dx);
        const cplx a = kI * (0.5 * dt);
        cplx off_lo, off_hi;
        if (gauge == Gauge::velocity) {
            const double A = 0.5 * t_mid * t_mid;
            off_hi = cplx{-0.5 * k2, -0.5 * A / dx};  // H[i][i+1]
            off_lo = cplx{-0.5 * k2, 0.5 * A / dx};   // H[i][i-1]
        } else {
            off_hi = off_lo = -0.5 * k2;
        }
        for (int r = 0; r < m_; ++r) {
            const int i = r + 1;
            double d = k2;
            if (gauge == Gauge::length && potential) d -= grid_.x(i) * t_mid;
            const cplx hv = d * state[i] + off_lo * state[i - 1] + off_hi * state[i + 1];
            rhs_[r] = state[i] - a * hv;
            diag_[r] = 1.0 + a * d;
            sub_[r] = a * off_lo;
            sup_[r] = a * off_hi;
        }
        if (!solve_tridiagonal(sub_, diag_, sup_, rhs_))
            throw SolverFailure("step: tridiagonal elimination hit a zero pivot");
        for (int r = 0; r < m_; ++r) {
            if (!std::isfinite(rhs_[r].real()) || !std::isfinite(rhs_[r].imag()))
                throw SolverFailure("step: non-finite value after solve");
            state[r + 1] = rhs_[r];
        }
        state[0] = 0.0;
        state[grid_.n] = 0.0;
    }

private:
    Grid1D grid_;
    int m_;
    cvec sub_, diag_, sup_, rhs_;
};

void to_gauge(cvec& v, const Grid1D& g, double t, double sign) {
    for (int i = 0; i <= g.n; ++i) v[i] *= std::polar(1.0, sign * gauge_phase(t, g.x(i)));
}

cplx boundary_slope(const cvec& v, double dx) {
    return (48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * dx);
}

void check_tail(const cvec& v, const Grid1D& g, double norm2, double tol, double t) {
    const double frac = tail_mass(v, g.dx) / norm2;
    if (!(frac <= tol))
        throw WindowBreach(fmt::format("tail mass fraction {:.3e} beyond 0.9*x_max exceeds {:.1e} at t = {:.6g}",
                                       frac, tol, t));
}

}  // namespace

WaveField step(const WaveField& field, double dt, const StepOptions& opt) {
    if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
    if (dt > 0.25 * field.grid.dx * (1.0 + 1e-12))
        throw DomainError(fmt::format("step: dt = {} exceeds 0.25*dx = {}", dt, 0.25 * field.grid.dx));
    if (static_cast<int>(field.values.size()) != field.grid.n + 1) throw GridMismatch("step: value count != n+1");
    const double t0 = field.time, t1 = t0 + dt, tm = t0 + 0.5 * dt;
    WaveField out{field.grid, t1, field.values};
    Stepper s(field.grid);
    if (opt.potential && tm > 0.0) {
        to_gauge(out.values, field.grid, t0, -1.0);
        s.advance(out.values, tm, dt, Gauge::velocity, true);
        to_gauge(out.values, field.grid, t1, 1.0);
    } else {
        s.advance(out.values, tm, dt, Gauge::length, opt.potential);
    }
    if (opt.check_tail) {
        const double nn = field.norm();
        if (nn > 0.0) check_tail(out.values, field.grid, nn * nn, opt.tail_tol, t1);
    }
    return out;
}

RunResult run(const airy::AiryMode& mode, const RunParams& p, const StepObserver& observer) {
    if (!(p.t_end > p.t_start)) throw ConfigError("run: t_end must exceed t_start");
    if (p.t_start > -2.0) throw ConfigError("run: t_start must be <= -2");
    if (!(p.t_end > 0.0)) throw ConfigError("run: t_end must be positive");
    if (!(p.dt > 0.0) || !(p.dx > 0.0)) throw ConfigError("run: dt and dx must be positive");
    if (p.dt > 0.25 * p.dx) throw ConfigError("run: dt must not exceed 0.25*dx");
    if (p.order < 0 || p.order > modes::kMaxExpansionOrder) throw ConfigError("run: N_in outside [0, 6]");
    for (double ts : p.snapshot_times)
        if (ts < p.t_start || ts > p.t_end)
            throw ConfigError(fmt::format("run: snapshot time {} outside [t_start, t_end]", ts));

    const double x_max = p.x_max > 0.0 ? p.x_max : auto_x_max(p.t_end, p.eta_margin);
    const double centre = p.t_end * p.t_end * p.t_end / 6.0;
    if (x_max < centre)
        throw WindowBreach(fmt::format("x_max = {} lies below the searchlight centre t_end^3/6 = {}", x_max, centre));
    const Grid1D grid = Grid1D::from_spacing(x_max, p.dx);
    const double dx_limit = max_dx(p.t_start, p.t_end, p.eta_margin);
    if (grid.dx > dx_limit) throw GridTooCoarse(fmt::format("run: dx = {} exceeds {}", grid.dx, dx_limit));

    std::vector<double> breaks{p.t_start, p.t_end, 0.0};
    for (double ts : p.snapshot_times) breaks.push_back(ts);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> wanted = p.snapshot_times;
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    auto is_wanted = [&](double t) { return std::binary_search(wanted.begin(), wanted.end(), t); };

    WaveField f0 = init_incoming(mode, p.order, grid, p.t_start);
    cvec state = f0.values;
    const double n0 = f0.norm();
    const double n0sq = n0 * n0;
    RunResult res;
    check_tail(state, grid, n0sq, p.tail_tol, p.t_start);
    res.max_tail_fraction = tail_mass(state, grid.dx) / n0sq;
    if (is_wanted(p.t_start)) res.snapshots.push_back(f0);
    res.flux.times.push_back(p.t_start);
    res.flux.flux.push_back(boundary_slope(state, grid.dx));

    Stepper stepper(grid);
    Gauge gauge = Gauge::length;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double a = breaks[b], e = breaks[b + 1];
        const int m = std::max(1, static_cast<int>(std::ceil((e - a) / p.dt - 1e-9)));
        const double h = (e - a) / m;
        if (a >= 0.0 && gauge == Gauge::length) {
            to_gauge(state, grid, a, -1.0);
            gauge = Gauge::velocity;
        }
        for (int k = 0; k < m; ++k) {
            const double t0 = a + k * h;
            const double t1 = (k + 1 == m) ? e : a + (k + 1) * h;
            stepper.advance(state, 0.5 * (t0 + t1), t1 - t0, gauge, true);
            cplx f = boundary_slope(state, grid.dx);
            if (gauge == Gauge::velocity) f *= std::polar(1.0, gauge_phase(t1, 0.0));
            res.flux.times.push_back(t1);
            res.flux.flux.push_back(f);
            const double tm = tail_mass(state, grid.dx) / n0sq;
            res.max_tail_fraction = std::max(res.max_tail_fraction, tm);
            if (!(tm <= p.tail_tol)) check_tail(state, grid, n0sq, p.tail_tol, t1);
            const double nn = trapezoid_norm(state, grid.dx);
            res.norm_drift = std::max(res.norm_drift, std::abs(nn - n0) / n0);
            if (observer) observer(t1, nn);
        }
        if (is_wanted(e)) {
            WaveField snap{grid, e, state};
            if (gauge == Gauge::velocity) to_gauge(snap.values, grid, e, 1.0);
            res.snapshots.push_back(std::move(snap));
        }
    }
    return res;
}

double residual(const WaveField& before, const WaveField& mid, const WaveField& after, bool potential) {
    if (!(before.grid == mid.grid) || !(mid.grid == after.grid)) throw GridMismatch("residual: grids differ");
    for (const auto* f : {&before, &mid, &after})
        if (static_cast<int>(f->values.size()) != f->grid.n + 1) throw GridMismatch("residual: value count != n+1");
    const double h1 = mid.time - before.time, h2 = after.time - mid.time;
    if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * std::max({1.0, std::abs(mid.time), h1}))
        throw GridMismatch("residual: snapshots must be equally spaced in increasing time");
    const auto& g = mid.grid;
    const double t = mid.time;
    const double inv2h = 1.0 / (h1 + h2);
    const double k2 = 1.0 / (g.dx * g.dx);
    double s = 0.0;
    for (int i = 1; i < g.n; ++i) {
        const cplx pt = (after.values[i] - before.values[i]) * inv2h;
        const cplx pxx = (mid.values[i + 1] - 2.0 * mid.values[i] + mid.values[i - 1]) * k2;
        cplx L = kI * pt + 0.5 * pxx;
        if (potential) L += g.x(i) * t * mid.values[i];
        s += std::norm(L);
    }
    return std::sqrt(s * g.dx);
}

void checkpoint(const WaveField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot open " + path.string());
    out << "inflection-field v1\n";
    out << fmt::format("t={:.17g}\nn={}\nx_max={:.17g}\n", field.time, field.grid.n, field.grid.x_max);
    for (const auto& v : field.values) out << fmt::format("{:.17g} {:.17g}\n", v.real(), v.imag());
    out.flush();
    if (!out) throw IoError("checkpoint: write failed for " + path.string());
}

namespace {

double parse_double(std::string_view s, const char* what) {
    double v = 0.0;
    const auto* b = s.data();
    const auto* e = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e) throw FormatError(std::string("restore: bad ") + what + " '" + std::string(s) + "'");
    return v;
}

std::string_view value_after(const std::string& line, std::string_view key) {
    if (line.rfind(key, 0) != 0) throw FormatError("restore: expected '" + std::string(key) + "', got '" + line + "'");
    return std::string_view(line).substr(key.size());
}

}  // namespace

WaveField restore(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("restore: cannot open " + path.string());
    std::string line;
    auto next = [&](const char* what) {
        if (!std::getline(in, line)) throw FormatError(std::string("restore: missing ") + what);
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    next("header");
    if (line != "inflection-field v1") throw FormatError("restore: unrecognised header '" + line + "'");
    next("t");
    const double t = parse_double(value_after(line, "t="), "time");
    next("n");
    int n = 0;
    {
        const auto sv = value_after(line, "n=");
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), n);
        if (ec != std::errc{} || ptr != sv.data() + sv.size() || n < 16) throw FormatError("restore: bad n");
    }
    next("x_max");
    const double x_max = parse_double(value_after(line, "x_max="), "x_max");
    if (!(x_max > 0.0) || !std::isfinite(t)) throw FormatError("restore: bad header values");
    WaveField f{Grid1D{x_max, n, x_max / n}, t, cvec(n + 1)};
    for (int i = 0; i <= n; ++i) {
        if (!std::getline(in, line)) throw FormatError(fmt::format("restore: expected {} samples, found {}", n + 1, i));
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw FormatError("restore: malformed sample line '" + line + "'");
        const std::string_view sv(line);
        const double re = parse_double(sv.substr(0, sp), "sample");
        const double im = parse_double(sv.substr(sp + 1), "sample");
        if (!std::isfinite(re) || !std::isfinite(im)) throw FormatError("restore: non-finite sample");
        f.values[i] = {re, im};
    }
    while (std::getline(in, line))
        if (!line.empty()) throw FormatError(fmt::format("restore: more than n+1 = {} samples", n + 1));
    return f;
}

}  // namespace inflection::evolve
