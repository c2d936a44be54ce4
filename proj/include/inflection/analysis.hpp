#pragma once

#include "inflection/evolve.hpp"
#include "inflection/searchlight.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace inflection::analysis {

// ‖G‖, ‖G_η‖ and ‖ηG‖ along a sequence of frames.
struct Lemma1Scan {
    std::vector<double> times;
    std::vector<double> norms;           // ‖G‖
    std::vector<double> gradient_norms;  // ‖G_η‖
    std::vector<double> weighted_norms;  // ‖ηG‖
    double c0 = 0.0;          // mean of ‖G‖
    double c0_spread = 0.0;   // max |‖G‖ - c0| / c0
    double c1 = 0.0;          // sup ‖G_η‖
    double c2 = 0.0;          // sup ‖ηG‖
    double c1_slope = 0.0;    // least-squares trend over t >= slope_from
    double c2_slope = 0.0;
    double slope_from = 3.0;
};

// Needs at least 5 frames.
Lemma1Scan lemma1_scan(std::span<const searchlight::SearchlightFrame> frames, double slope_from = 3.0);

double gradient_norm(const searchlight::SearchlightFrame& f);
double weighted_norm(const searchlight::SearchlightFrame& f);

struct FluxIdentity {
    double t_early = 0.0, t_late = 0.0;
    double integral = 0.0;       // ∫ τ^{-3}|g|² dτ = ∫ t⁴ |f|² dt
    double grad_sq_early = 0.0;  // ‖G_η‖² at t_early (τ_b)
    double grad_sq_late = 0.0;   // ‖G_η‖² at t_late (τ_a)
    double defect = 0.0;
};

// Boundary derivative g = G_η on η = -t²/6 comes from the flux trace:
// |g|² = t³ |f|². Frames must satisfy 2 <= early.t < late.t.
FluxIdentity flux_identity(const searchlight::SearchlightFrame& early, const searchlight::SearchlightFrame& late,
                           const evolve::FluxTrace& trace);

struct FluxIntegrals {
    double t_end = 0.0;
    double s91 = 0.0;  // ∫₁^T |f|² t² dt
    bool s91_saturated = false;
    std::array<double, 4> popov{};  // ∫₁^T |f| t^p dt, p = 1..4
    std::array<bool, 4> popov_saturated{};
    std::vector<double> s91_unit_increments;  // over [1,2], [2,3], ...
};

// t_end <= 0 means the end of the trace. Throws RangeError if [1, t_end] is not covered.
FluxIntegrals flux_integrals(const evolve::FluxTrace& trace, double t_end = 0.0);

// (∫ x^{2α} |∂_x^γ ψ|² dx)^{1/2}, α <= 3, γ <= 2.
double seminorm(const evolve::WaveField& field, int alpha, int gamma);

struct DiagnosticsReport {
    Lemma1Scan lemma1;
    double flux_identity_gap = 0.0;
    FluxIntegrals flux;
    double norm_drift = 0.0;
};

nlohmann::json to_json(const Lemma1Scan& s);
nlohmann::json to_json(const FluxIntegrals& f);
nlohmann::json to_json(const DiagnosticsReport& r);

struct ModeResult {
    int j = 0;
    searchlight::AmplitudeSeries amplitudes;
    double norm_drift = 0.0;
};

struct ScatteringReport {
    std::vector<int> modes;  // modes that succeeded, in request order
    std::vector<searchlight::AmplitudeSeries> amplitudes;
    std::vector<double> norm_drifts;
    std::vector<std::vector<cplx>> gram;
    double unitarity_defect = 0.0;  // max |gram - I|
    std::map<int, std::string> failures;
};

struct ScatterSetup {
    evolve::RunParams run;
    std::vector<double> extraction_times{3.0, 4.0, 5.0, 6.0};
    searchlight::ExtractOptions extract;
    int threads = 1;
};

// Runs one mode and extracts its amplitude on the grid shared by all modes.
ModeResult run_mode(int j, const ScatterSetup& setup);
// η-range shared by every mode of a batch with this setup.
std::pair<double, double> common_eta_range(const ScatterSetup& setup);

ScatteringReport scattering_matrix(const std::vector<int>& j_list, const ScatterSetup& setup);

nlohmann::json to_json(const ScatteringReport& r);
void write_gram_csv(const ScatteringReport& r, const std::filesystem::path& path);

}  // namespace inflection::analysis
