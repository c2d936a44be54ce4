#pragma once

namespace inflection::airy {

struct AirySample {
    double z = 0.0;
    double ai = 0.0;
    double aip = 0.0;
    // set for z < -100, where the oscillatory asymptotics lose digits in the phase
    bool overflow = false;
};

// Ai and Ai' at real z. Throws NonFinite for NaN/inf.
AirySample eval_ai(double z);

// ν_j > 0 with Ai(-ν_j) = 0, 1 <= j <= 50. Throws OutOfRange otherwise.
double zero(int j);

struct AiryMode {
    int j = 1;
    double nu = 0.0;
    double d = 0.0;  // 1/|Ai'(-ν_j)|, unit L² norm of the incoming mode
};

AiryMode mode(int j);

// Radius inside which the Maclaurin series is used directly, and the radius
// beyond which the asymptotic expansions take over. In between, Ai is
// continued by Taylor series from a table of nodes.
inline constexpr double kSeriesRadius = 2.5;
inline constexpr double kAsymptoticRadius = 8.0;

}  // namespace inflection::airy
