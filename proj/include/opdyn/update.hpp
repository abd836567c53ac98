#pragma once

#include <optional>
#include <string>

#include "opdyn/geometry.hpp"

namespace opdyn {

enum class UpdateFamily { Linear, AsymmetricLinear, Sign, AsymmetricSign, Slerp };

// Parametric description of an update function f : [-1,1] -> R.
//
//   Linear           f(A) = eta * A
//   AsymmetricLinear f(A) = eta_plus * A for A >= 0, eta_minus * A otherwise
//   Sign             f(A) = eta * sgn(A), with sgn(0) := +1
//   AsymmetricSign   f(A) = eta_plus for A >= threshold, -eta_minus otherwise
//   Slerp            f(A) = sin(phi) / sin(theta - phi),
//                    theta = arccos(A), phi = (eta/2) sin(2 theta)
struct UpdateFunctionSpec {
    UpdateFamily family = UpdateFamily::Linear;
    double eta = 0.1;
    double eta_plus = 0.0;
    double eta_minus = 0.0;
    double threshold = 0.0;

    static UpdateFunctionSpec linear(double eta);
    static UpdateFunctionSpec asymmetric_linear(double eta_plus, double eta_minus);
    static UpdateFunctionSpec sign(double eta);
    static UpdateFunctionSpec asymmetric_sign(double eta_plus, double eta_minus,
                                              double threshold = 0.0);
    static UpdateFunctionSpec slerp(double eta);
};

struct FunctionClassification {
    bool is_stable = false;
    bool is_active = false;
    bool is_odd = false;
    std::optional<double> sign_change_point; // A0
    std::optional<double> activity_floor;    // m, for active functions
};

// f(A). DomainError when |A| > 1 + 1e-12; inputs inside the slack are clamped.
double evaluate(const UpdateFunctionSpec& spec, double a);

// One interaction: j influences i. Returns w/||w|| with w = u_i + f(<u_i,u_j>) u_j.
// A zero f short-circuits to u_i unchanged, so exactly-orthogonal pairs are
// true fixed points for stable families.
Opinion apply_update(const Opinion& u_i, const Opinion& u_j, const UpdateFunctionSpec& spec);

// The correlation recurrence: A' = (A + f(A)) / sqrt(1 + 2 A f(A) + f(A)^2).
// Matches the measured correlation after apply_update on any unit pair with
// <u_i,u_j> = A. A in {-1, 0 (stable), 1} is returned unchanged, exactly.
double predicted_correlation(double a, const UpdateFunctionSpec& spec);

// Spherical interpolation step with step angle phi = (eta/2) sin(2 theta):
// u_i' = (sin(theta - phi) u_i + sin(phi) u_j) / sin(theta).
// Pairs with |A| within 1e-9 of 1 (or A exactly 0) are fixed points.
Opinion slerp_update(const Opinion& u_i, const Opinion& u_j, double eta);

// The tight factor c < 1 with 1 - |A'| <= c (1 - |A|) on |A| in [delta, 1]:
// c = max of 1/(1 + |f(x)|) over [-1,-delta] u [delta,1]. Closed form for the
// linear and sign families, grid + refinement for slerp. NotStable unless the
// spec classifies stable.
double contraction_constant(const UpdateFunctionSpec& spec, double delta);

FunctionClassification classify(const UpdateFunctionSpec& spec);

// Textual form used by the CLI and config files, e.g. "linear:eta=0.1",
// "asym-linear:eta_plus=0.9,eta_minus=0.1", "sign:eta=0.3",
// "asym-sign:eta_plus=0.2,eta_minus=0.4,threshold=0.0", "slerp:eta=0.5".
UpdateFunctionSpec parse_update_spec(const std::string& text);
std::string format_update_spec(const UpdateFunctionSpec& spec);

} // namespace opdyn
