#include "opdyn/update.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace opdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDomainSlack = 1e-12;
constexpr double kDegenerateFloor = 1e-9;
constexpr double kSlerpPoleTol = 1e-12; // |A| this close to 1 uses the limit value
constexpr double kSlerpFixedPointTol = 1e-9;

void check_rate(double eta, const char* name) {
    if (!(eta > 0.0)) fail(Errc::InvalidSpec, std::string(name) + " must be positive");
}

double slerp_f(double a, double eta) {
    // Removable singularities at A = +-1: the limit is +-eta/(1-eta).
    if (1.0 - std::abs(a) < kSlerpPoleTol) return (a > 0 ? 1.0 : -1.0) * eta / (1.0 - eta);
    if (a == 0.0) return 0.0; // exact fixed point of the stable family
    const double theta = std::acos(a);
    const double phi = 0.5 * eta * std::sin(2.0 * theta);
    return std::sin(phi) / std::sin(theta - phi);
}

} // namespace

UpdateFunctionSpec UpdateFunctionSpec::linear(double eta) {
    check_rate(eta, "eta");
    UpdateFunctionSpec s;
    s.family = UpdateFamily::Linear;
    s.eta = eta;
    return s;
}

UpdateFunctionSpec UpdateFunctionSpec::asymmetric_linear(double eta_plus, double eta_minus) {
    check_rate(eta_plus, "eta_plus");
    check_rate(eta_minus, "eta_minus");
    UpdateFunctionSpec s;
    s.family = UpdateFamily::AsymmetricLinear;
    s.eta_plus = eta_plus;
    s.eta_minus = eta_minus;
    return s;
}

UpdateFunctionSpec UpdateFunctionSpec::sign(double eta) {
    check_rate(eta, "eta");
    UpdateFunctionSpec s;
    s.family = UpdateFamily::Sign;
    s.eta = eta;
    return s;
}

UpdateFunctionSpec UpdateFunctionSpec::asymmetric_sign(double eta_plus, double eta_minus,
                                                       double threshold) {
    check_rate(eta_plus, "eta_plus");
    check_rate(eta_minus, "eta_minus");
    if (!(threshold > -1.0 && threshold < 1.0))
        fail(Errc::InvalidSpec, "threshold must lie in (-1, 1)");
    UpdateFunctionSpec s;
    s.family = UpdateFamily::AsymmetricSign;
    s.eta_plus = eta_plus;
    s.eta_minus = eta_minus;
    s.threshold = threshold;
    return s;
}

UpdateFunctionSpec UpdateFunctionSpec::slerp(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) fail(Errc::InvalidSpec, "slerp eta must lie in (0, 1)");
    UpdateFunctionSpec s;
    s.family = UpdateFamily::Slerp;
    s.eta = eta;
    return s;
}

double evaluate(const UpdateFunctionSpec& spec, double a) {
    if (std::abs(a) > 1.0 + kDomainSlack)
        fail(Errc::DomainError, "correlation " + std::to_string(a) + " outside [-1,1]");
    a = clamp_corr(a);
    switch (spec.family) {
        case UpdateFamily::Linear:
            return spec.eta * a;
        case UpdateFamily::AsymmetricLinear:
            return a >= 0.0 ? spec.eta_plus * a : spec.eta_minus * a;
        case UpdateFamily::Sign:
            return a >= 0.0 ? spec.eta : -spec.eta;
        case UpdateFamily::AsymmetricSign:
            return a >= spec.threshold ? spec.eta_plus : -spec.eta_minus;
        case UpdateFamily::Slerp:
            return slerp_f(a, spec.eta);
    }
    fail(Errc::InvalidSpec, "unknown family");
}

Opinion apply_update(const Opinion& u_i, const Opinion& u_j, const UpdateFunctionSpec& spec) {
    if (u_i.dim() != u_j.dim()) fail(Errc::DimensionMismatch, "apply_update");
    const double a = correlation(u_i, u_j);
    const double f = evaluate(spec, a);
    if (f == 0.0) return u_i;
    Vec w(u_i.dim());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = u_i[k] + f * u_j[k];
    const double wn = norm(w);
    if (wn <= kDegenerateFloor)
        fail(Errc::DegenerateUpdate, "update vector norm " + std::to_string(wn));
    for (double& x : w) x /= wn;
    return Opinion(std::move(w));
}

double predicted_correlation(double a, const UpdateFunctionSpec& spec) {
    if (std::abs(a) > 1.0 + kDomainSlack)
        fail(Errc::DomainError, "correlation " + std::to_string(a) + " outside [-1,1]");
    a = clamp_corr(a);
    if (a == 1.0 || a == -1.0) return a;
    const double f = evaluate(spec, a);
    if (a == 0.0 && f == 0.0) return 0.0;
    const double denom_sq = 1.0 + 2.0 * a * f + f * f;
    if (denom_sq <= kDegenerateFloor * kDegenerateFloor)
        fail(Errc::DegenerateUpdate, "recurrence denominator vanishes");
    return clamp_corr((a + f) / std::sqrt(denom_sq));
}

Opinion slerp_update(const Opinion& u_i, const Opinion& u_j, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) fail(Errc::InvalidParams, "slerp eta must lie in (0, 1)");
    if (u_i.dim() != u_j.dim()) fail(Errc::DimensionMismatch, "slerp_update");
    const double a = correlation(u_i, u_j);
    if (1.0 - std::abs(a) < kSlerpFixedPointTol) return u_i; // colinear: fixed point
    if (a == 0.0) return u_i;                                // phi = 0 exactly
    const double theta = std::acos(a);
    const double phi = 0.5 * eta * std::sin(2.0 * theta);
    const double s = std::sin(theta);
    Vec w(u_i.dim());
    const double ci = std::sin(theta - phi) / s;
    const double cj = std::sin(phi) / s;
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = ci * u_i[k] + cj * u_j[k];
    return normalize(w);
}

FunctionClassification classify(const UpdateFunctionSpec& spec) {
    FunctionClassification c;
    switch (spec.family) {
        case UpdateFamily::Linear:
            c.is_stable = true;
            c.is_odd = true;
            c.sign_change_point = 0.0;
            break;
        case UpdateFamily::AsymmetricLinear:
            c.is_stable = true;
            c.is_odd = false;
            c.sign_change_point = 0.0;
            break;
        case UpdateFamily::Slerp:
            c.is_stable = true;
            c.is_odd = true;
            c.sign_change_point = 0.0;
            break;
        case UpdateFamily::Sign:
            c.is_active = true;
            c.is_odd = true;
            c.sign_change_point = 0.0;
            c.activity_floor = spec.eta;
            break;
        case UpdateFamily::AsymmetricSign:
            c.is_active = true;
            c.is_odd = false;
            c.sign_change_point = spec.threshold;
            c.activity_floor = std::min(spec.eta_plus, spec.eta_minus);
            break;
    }
    return c;
}

double contraction_constant(const UpdateFunctionSpec& spec, double delta) {
    if (!classify(spec).is_stable) fail(Errc::NotStable, format_update_spec(spec));
    if (!(delta > 0.0 && delta <= 1.0)) fail(Errc::InvalidParams, "delta must lie in (0, 1]");
    switch (spec.family) {
        case UpdateFamily::Linear:
            return 1.0 / (1.0 + spec.eta * delta);
        case UpdateFamily::AsymmetricLinear:
            return 1.0 / (1.0 + std::min(spec.eta_plus, spec.eta_minus) * delta);
        default:
            break;
    }
    // Slerp: minimize |f| over [delta, 1] numerically (f is odd, so the
    // negative interval gives the same minimum). Coarse grid, then ternary
    // search on the bracketing interval.
    const int kGrid = 4096;
    double best_x = delta;
    double best = std::abs(evaluate(spec, delta));
    for (int k = 1; k <= kGrid; ++k) {
        const double x = delta + (1.0 - delta) * static_cast<double>(k) / kGrid;
        const double v = std::abs(evaluate(spec, x));
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    double lo = std::max(delta, best_x - (1.0 - delta) / kGrid);
    double hi = std::min(1.0, best_x + (1.0 - delta) / kGrid);
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (std::abs(evaluate(spec, m1)) <= std::abs(evaluate(spec, m2)))
            hi = m2;
        else
            lo = m1;
    }
    best = std::min(best, std::abs(evaluate(spec, 0.5 * (lo + hi))));
    return 1.0 / (1.0 + best);
}

namespace {

std::map<std::string, double> parse_kv(const std::string& body) {
    std::map<std::string, double> kv;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            fail(Errc::InvalidSpec, "expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        if (kv.count(key)) fail(Errc::InvalidSpec, "duplicate key '" + key + "'");
        try {
            std::size_t used = 0;
            const std::string val = item.substr(eq + 1);
            kv[key] = std::stod(val, &used);
            if (used != val.size()) fail(Errc::InvalidSpec, "trailing junk in '" + item + "'");
        } catch (const SimError&) {
            throw;
        } catch (const std::exception&) {
            fail(Errc::InvalidSpec, "bad number in '" + item + "'");
        }
    }
    return kv;
}

double take(std::map<std::string, double>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) fail(Errc::InvalidSpec, "missing parameter '" + key + "'");
    const double v = it->second;
    kv.erase(it);
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

UpdateFunctionSpec parse_update_spec(const std::string& text) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    if (colon == std::string::npos) fail(Errc::InvalidSpec, "expected family:params in '" + t + "'");
    const std::string family = t.substr(0, colon);
    auto kv = parse_kv(t.substr(colon + 1));

    UpdateFunctionSpec spec;
    if (family == "linear") {
        spec = UpdateFunctionSpec::linear(take(kv, "eta"));
    } else if (family == "asym-linear") {
        const double p = take(kv, "eta_plus");
        const double m = take(kv, "eta_minus");
        spec = UpdateFunctionSpec::asymmetric_linear(p, m);
    } else if (family == "sign") {
        spec = UpdateFunctionSpec::sign(take(kv, "eta"));
    } else if (family == "asym-sign") {
        const double p = take(kv, "eta_plus");
        const double m = take(kv, "eta_minus");
        const double th = kv.count("threshold") ? take(kv, "threshold") : 0.0;
        spec = UpdateFunctionSpec::asymmetric_sign(p, m, th);
    } else if (family == "slerp") {
        spec = UpdateFunctionSpec::slerp(take(kv, "eta"));
    } else {
        fail(Errc::InvalidSpec, "unknown family '" + family + "'");
    }
    if (!kv.empty()) fail(Errc::InvalidSpec, "unexpected parameter '" + kv.begin()->first + "'");
    return spec;
}

std::string format_update_spec(const UpdateFunctionSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    switch (spec.family) {
        case UpdateFamily::Linear:
            out << "linear:eta=" << spec.eta;
            break;
        case UpdateFamily::AsymmetricLinear:
            out << "asym-linear:eta_plus=" << spec.eta_plus << ",eta_minus=" << spec.eta_minus;
            break;
        case UpdateFamily::Sign:
            out << "sign:eta=" << spec.eta;
            break;
        case UpdateFamily::AsymmetricSign:
            out << "asym-sign:eta_plus=" << spec.eta_plus << ",eta_minus=" << spec.eta_minus
                << ",threshold=" << spec.threshold;
            break;
        case UpdateFamily::Slerp:
            out << "slerp:eta=" << spec.eta;
            break;
    }
    return out.str();
}

} // namespace opdyn
