#pragma once

#include <cstddef>
#include <vector>

#include "opdyn/errors.hpp"
#include "opdyn/rng.hpp"

namespace opdyn {

using Vec = std::vector<double>;

constexpr double kNormFloor = 1e-12;
constexpr double kUnitNormTol = 1e-12;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);

// A point on the unit sphere in d >= 2 dimensions. The constructor enforces
// the invariant (unit norm within kUnitNormTol); use normalize() to build one
// from an arbitrary vector.
class Opinion {
public:
    explicit Opinion(Vec coords);

    const Vec& coords() const { return coords_; }
    double operator[](std::size_t k) const { return coords_[k]; }
    std::size_t dim() const { return coords_.size(); }

    Opinion negated() const;

    bool operator==(const Opinion& other) const { return coords_ == other.coords_; }

private:
    Vec coords_;
};

// v / ||v||; throws ZeroVector when ||v|| <= kNormFloor.
Opinion normalize(const Vec& v);

// Inner product of two opinions, clamped to [-1, 1].
double correlation(const Opinion& u, const Opinion& v);

// Primary angle, in [0, pi].
double angle(const Opinion& u, const Opinion& v);

// min(alpha, pi - alpha): the angle between opinion lines, sign-blind.
double effective_angle(const Opinion& u, const Opinion& v);
double effective_angle_from_corr(double a);

// Uniform on the sphere: normalized i.i.d. standard Gaussians.
Opinion sample_uniform_sphere(std::size_t d, CounterRng& rng);

// Pairwise correlations of n opinions. Off-diagonal entries are packed once
// (upper triangle), so symmetry is exact by construction; the diagonal is
// identically 1.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(std::size_t n);

    std::size_t size() const { return n_; }

    double at(std::size_t i, std::size_t j) const {
        if (i == j) return 1.0;
        return packed_[pack(i, j)];
    }

    void set(std::size_t i, std::size_t j, double value);

    double min_abs_offdiag() const;

    // max over pairs of min(|A|, 1 - |A|); a configuration is eps-active
    // exactly when this exceeds eps.
    double max_dist_to_inactive() const;

private:
    std::size_t pack(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * n_ - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t n_;
    std::vector<double> packed_;
};

// n opinions plus their cached correlation matrix. replace_opinion() refreshes
// only row/column i of the cache, recomputing the entries from the vectors so
// the cache never drifts from the actual inner products.
class Configuration {
public:
    explicit Configuration(std::vector<Opinion> opinions);

    std::size_t size() const { return opinions_.size(); }
    std::size_t dim() const { return opinions_.front().dim(); }

    const Opinion& opinion(std::size_t i) const { return opinions_[i]; }
    const std::vector<Opinion>& opinions() const { return opinions_; }
    const CorrelationMatrix& correlations() const { return corr_; }

    double corr(std::size_t i, std::size_t j) const { return corr_.at(i, j); }

    void replace_opinion(std::size_t i, Opinion u);

private:
    std::vector<Opinion> opinions_;
    CorrelationMatrix corr_;
};

// Rebuilds the matrix from scratch; the cached copy inside Configuration is
// maintained incrementally and must agree with this.
CorrelationMatrix correlation_matrix(const Configuration& config);

inline double clamp_corr(double a) {
    if (a > 1.0) return 1.0;
    if (a < -1.0) return -1.0;
    return a;
}

} // namespace opdyn
