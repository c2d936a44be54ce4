#pragma once

#include "inflection/airy.hpp"
#include "inflection/numerics.hpp"

#include <json.hpp>

#include <vector>

namespace inflection::modes {

inline constexpr int kMaxExpansionOrder = 6;

// D_j = 1/|Ai'(-ν_j)|.
double normalize(int j);

// Incoming whispering-gallery wave at (x, t), t < 0.
cplx incoming(const airy::AiryMode& mode, double x, double t);

// Polynomials of the large-|τ| expansion. Order n is stored as real
// coefficients (ascending powers of ξ) and carries an implicit factor i^n:
//   P_{2n}(ξ) = i^n Σ_k p_coeffs[n][k] ξ^k,   Q_{2n-1}(ξ) = i^n Σ_k q_coeffs[n][k] ξ^k.
struct ModalExpansion {
    airy::AiryMode mode;
    int order = 0;
    std::vector<std::vector<double>> p_coeffs;
    std::vector<std::vector<double>> q_coeffs;
};

ModalExpansion derive_expansion(const airy::AiryMode& mode, int order);

// Truncated expansion at (x, t), t <= -1.
cplx eval_expansion(const ModalExpansion& exp, double x, double t);

nlohmann::json to_json(const ModalExpansion& exp);
ModalExpansion expansion_from_json(const nlohmann::json& j);

}  // namespace inflection::modes
