#pragma once

#include "inflection/airy.hpp"
#include "inflection/numerics.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace inflection::evolve {

// Uniform half-line grid x_i = i·dx, i = 0..n.
struct Grid1D {
    double x_max = 0.0;
    int n = 0;
    double dx = 0.0;

    static Grid1D from_intervals(double x_max, int n);
    // smallest n with x_max/n <= dx_target
    static Grid1D from_spacing(double x_max, double dx_target);
    double x(int i) const { return dx * i; }
    bool operator==(const Grid1D& o) const { return n == o.n && x_max == o.x_max; }
};

struct WaveField {
    Grid1D grid;
    double time = 0.0;
    cvec values;  // n+1 samples, values[0] = 0

    double norm() const;
    // ∫_{x > 0.9 x_max} |ψ|² / ‖ψ‖²
    double tail_fraction() const;
};

// f(t) = ∂_x ψ(0, t)
struct FluxTrace {
    std::vector<double> times;
    cvec flux;
};

inline constexpr double kDefaultTailTol = 1e-10;
inline constexpr double kDefaultEtaMargin = 10.0;

// Window half-width (in η = x/t - t²/6) that the auto-sized grid keeps around
// the searchlight centre at t_end: x_max = t_end³/6 + eta_margin·t_end, at least kMinAutoXMax.
inline constexpr double kMinAutoXMax = 20.0;
double auto_x_max(double t_end, double eta_margin = kDefaultEtaMargin);

// dx <= 0.05 (-2 t_start)^{-1/3} and dx <= 0.2·2π/(t_end²/2 + eta_margin)
double max_dx(double t_start, double t_end, double eta_margin = kDefaultEtaMargin);

WaveField init_incoming(const airy::AiryMode& mode, int order, const Grid1D& grid, double t_start);

struct StepOptions {
    bool potential = true;  // off: free equation i ψ_t = -½ ψ_xx (test hook)
    bool check_tail = true;
    double tail_tol = kDefaultTailTol;
};

// One Cayley step from field.time to field.time + dt.
WaveField step(const WaveField& field, double dt, const StepOptions& opt = {});

struct RunParams {
    int order = 2;  // N_in
    double t_start = -6.0;
    double t_end = 6.0;
    double dt = 5e-4;
    double dx = 0.01;
    double x_max = 0.0;  // 0: auto_x_max(t_end, eta_margin)
    double eta_margin = kDefaultEtaMargin;
    double tail_tol = kDefaultTailTol;
    std::vector<double> snapshot_times;
};

struct RunResult {
    std::vector<WaveField> snapshots;  // in order of increasing time
    FluxTrace flux;
    double norm_drift = 0.0;  // max_t |‖ψ(t)‖ - ‖ψ(t_start)‖| / ‖ψ(t_start)‖
    double max_tail_fraction = 0.0;
};

// Optional observer, called after every step with (time, state norm).
using StepObserver = std::function<void(double, double)>;

RunResult run(const airy::AiryMode& mode, const RunParams& params, const StepObserver& observer = {});

// ‖i ψ_t + ½ ψ_xx + x t ψ‖ at the middle snapshot, interior points only.
double residual(const WaveField& before, const WaveField& mid, const WaveField& after, bool potential = true);

void checkpoint(const WaveField& field, const std::filesystem::path& path);
WaveField restore(const std::filesystem::path& path);

}  // namespace inflection::evolve
