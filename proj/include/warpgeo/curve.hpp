#pragma once

#include <string>
#include <vector>

#include "warpgeo/chart.hpp"

namespace warpgeo {

// A curve sampled on the uniform grid t_i = i * T / N, i = 0..N. Velocities
// (and accelerations when present) are derivatives with respect to t.
class Curve {
public:
    Curve() = default;
    Curve(double span, std::vector<Vec> points, std::vector<Vec> velocities,
          std::vector<Vec> accelerations = {});

    std::size_t size() const { return points_.size(); }
    std::size_t intervals() const { return points_.size() - 1; }
    int dim() const { return static_cast<int>(points_.front().size()); }
    double span() const { return span_; }
    double step() const { return span_ / static_cast<double>(intervals()); }
    double param(std::size_t i) const { return span_ * static_cast<double>(i) / static_cast<double>(intervals()); }
    std::vector<double> params() const;

    const std::vector<Vec>& points() const { return points_; }
    const std::vector<Vec>& velocities() const { return velocities_; }
    const std::vector<Vec>& accelerations() const { return accelerations_; }
    bool has_accelerations() const { return !accelerations_.empty(); }

    const Vec& front() const { return points_.front(); }
    const Vec& back() const { return points_.back(); }

    // Hermite interpolation: quintic in position when accelerations are
    // stored, cubic otherwise. Throws InputError outside [0, T].
    Vec point_at(double t) const;
    Vec velocity_at(double t) const;
    // Cubic Lagrange through the stored accelerations; requires them.
    Vec acceleration_at(double t) const;

    // The same curve on [0, 1]: c(s) = this(s T).
    Curve normalized() const;

    // t, x1..xn, v1..vn; 17 significant digits.
    std::string to_csv() const;

private:
    std::size_t locate(double t, double& u) const;
    static Vec lagrange4(const std::vector<Vec>& data, std::size_t i, double u);

    double span_ = 1.0;
    std::vector<Vec> points_;
    std::vector<Vec> velocities_;
    std::vector<Vec> accelerations_;
};

// max_i |g(v_i, v_i) - g(v_0, v_0)|
double speed_drift(const MetricChart& chart, const Curve& curve);

// Largest coordinate distance between corresponding samples.
double max_pointwise_distance(const Curve& a, const Curve& b);

std::string format_double(double x);

}  // namespace warpgeo
