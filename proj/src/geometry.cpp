#include "opdyn/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace opdyn {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        fail(Errc::DimensionMismatch, "dot: " + std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Opinion::Opinion(Vec coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2)
        fail(Errc::InvalidParams, "opinion needs dimension >= 2");
    const double n = norm(coords_);
    if (std::abs(n - 1.0) > kUnitNormTol)
        fail(Errc::InvalidParams, "opinion norm " + std::to_string(n) + " not within 1e-12 of 1");
}

Opinion Opinion::negated() const {
    Vec c = coords_;
    for (double& x : c) x = -x;
    return Opinion(std::move(c));
}

Opinion normalize(const Vec& v) {
    if (v.size() < 2)
        fail(Errc::InvalidParams, "normalize needs dimension >= 2");
    const double n = norm(v);
    if (n <= kNormFloor)
        fail(Errc::ZeroVector, "norm " + std::to_string(n) + " below floor");
    Vec c(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) c[k] = v[k] / n;
    return Opinion(std::move(c));
}

double correlation(const Opinion& u, const Opinion& v) {
    return clamp_corr(dot(u.coords(), v.coords()));
}

double angle(const Opinion& u, const Opinion& v) {
    return std::acos(correlation(u, v));
}

double effective_angle_from_corr(double a) {
    const double alpha = std::acos(clamp_corr(a));
    return std::min(alpha, 3.14159265358979323846 - alpha);
}

double effective_angle(const Opinion& u, const Opinion& v) {
    return effective_angle_from_corr(correlation(u, v));
}

Opinion sample_uniform_sphere(std::size_t d, CounterRng& rng) {
    if (d < 2) fail(Errc::InvalidParams, "sphere dimension must be >= 2");
    Vec v(d);
    while (true) {
        for (std::size_t k = 0; k < d; ++k) v[k] = rng.next_gaussian();
        if (norm(v) > kNormFloor) break;
    }
    return normalize(v);
}

CorrelationMatrix::CorrelationMatrix(std::size_t n) : n_(n) {
    if (n < 1) fail(Errc::InvalidParams, "empty correlation matrix");
    packed_.assign(n * (n - 1) / 2, 0.0);
}

void CorrelationMatrix::set(std::size_t i, std::size_t j, double value) {
    if (i == j) fail(Errc::InvalidParams, "diagonal is fixed at 1");
    if (i >= n_ || j >= n_) fail(Errc::IndexOutOfRange, "correlation index");
    if (std::abs(value) > 1.0 + kUnitNormTol)
        fail(Errc::DomainError, "correlation " + std::to_string(value) + " outside [-1,1]");
    packed_[pack(i, j)] = clamp_corr(value);
}

double CorrelationMatrix::min_abs_offdiag() const {
    double m = 1.0;
    for (double a : packed_) m = std::min(m, std::abs(a));
    return m;
}

double CorrelationMatrix::max_dist_to_inactive() const {
    double m = 0.0;
    for (double a : packed_) {
        const double aa = std::abs(a);
        m = std::max(m, std::min(aa, 1.0 - aa));
    }
    return m;
}

Configuration::Configuration(std::vector<Opinion> opinions)
    : opinions_(std::move(opinions)), corr_(opinions_.empty() ? 1 : opinions_.size()) {
    if (opinions_.empty()) fail(Errc::InvalidParams, "configuration needs at least one opinion");
    const std::size_t d = opinions_.front().dim();
    for (const Opinion& u : opinions_)
        if (u.dim() != d) fail(Errc::DimensionMismatch, "mixed opinion dimensions");
    for (std::size_t i = 0; i < opinions_.size(); ++i)
        for (std::size_t j = i + 1; j < opinions_.size(); ++j)
            corr_.set(i, j, correlation(opinions_[i], opinions_[j]));
}

void Configuration::replace_opinion(std::size_t i, Opinion u) {
    if (i >= opinions_.size()) fail(Errc::IndexOutOfRange, "opinion index");
    if (u.dim() != dim()) fail(Errc::DimensionMismatch, "replacement dimension");
    opinions_[i] = std::move(u);
    for (std::size_t k = 0; k < opinions_.size(); ++k)
        if (k != i) corr_.set(i, k, correlation(opinions_[i], opinions_[k]));
}

CorrelationMatrix correlation_matrix(const Configuration& config) {
    CorrelationMatrix m(config.size());
    for (std::size_t i = 0; i < config.size(); ++i)
        for (std::size_t j = i + 1; j < config.size(); ++j)
            m.set(i, j, correlation(config.opinion(i), config.opinion(j)));
    return m;
}

} // namespace opdyn
