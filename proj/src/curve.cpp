#include "warpgeo/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace warpgeo {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Curve::Curve(double span, std::vector<Vec> points, std::vector<Vec> velocities,
             std::vector<Vec> accelerations)
    : span_(span),
      points_(std::move(points)),
      velocities_(std::move(velocities)),
      accelerations_(std::move(accelerations)) {
    if (points_.size() < 2) throw InputError("a curve needs at least two samples");
    if (velocities_.size() != points_.size() ||
        (!accelerations_.empty() && accelerations_.size() != points_.size())) {
        throw InputError("curve sample arrays differ in length");
    }
    if (!(span_ > 0.0) || !std::isfinite(span_)) {
        throw InputError("curve parameter span must be positive", {{"span", span_}});
    }
}

std::vector<double> Curve::params() const {
    std::vector<double> t(size());
    for (std::size_t i = 0; i < size(); ++i) t[i] = param(i);
    return t;
}

std::size_t Curve::locate(double t, double& u) const {
    const double tol = 1e-12 * span_;
    if (!(t >= -tol && t <= span_ + tol)) {
        throw InputError("curve queried outside its parameter range", {{"t", t}, {"span", span_}});
    }
    const double x = std::clamp(t, 0.0, span_) / step();
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= intervals()) i = intervals() - 1;
    u = x - static_cast<double>(i);
    return i;
}

Vec Curve::point_at(double t) const {
    double u;
    const std::size_t i = locate(t, u);
    const double h = step();
    const Vec& p0 = points_[i];
    const Vec& p1 = points_[i + 1];
    const Vec& v0 = velocities_[i];
    const Vec& v1 = velocities_[i + 1];
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    if (has_accelerations()) {
        const double h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        const double h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        const double h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
        const double h3 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
        const double h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        const double h5 = 0.5 * (u3 - 2.0 * u4 + u5);
        return h0 * p0 + (h1 * h) * v0 + (h2 * h * h) * accelerations_[i] + h3 * p1 + (h4 * h) * v1 +
               (h5 * h * h) * accelerations_[i + 1];
    }
    return (2.0 * u3 - 3.0 * u2 + 1.0) * p0 + ((u3 - 2.0 * u2 + u) * h) * v0 +
           (-2.0 * u3 + 3.0 * u2) * p1 + ((u3 - u2) * h) * v1;
}

Vec Curve::velocity_at(double t) const {
    double u;
    const std::size_t i = locate(t, u);
    const double h = step();
    if (has_accelerations()) {
        const double u2 = u * u, u3 = u2 * u;
        return (2.0 * u3 - 3.0 * u2 + 1.0) * velocities_[i] + ((u3 - 2.0 * u2 + u) * h) * accelerations_[i] +
               (-2.0 * u3 + 3.0 * u2) * velocities_[i + 1] + ((u3 - u2) * h) * accelerations_[i + 1];
    }
    if (size() < 4) {
        return (1.0 - u) * velocities_[i] + u * velocities_[i + 1];
    }
    return lagrange4(velocities_, i, u);
}

Vec Curve::acceleration_at(double t) const {
    if (!has_accelerations()) throw InputError("curve stores no accelerations");
    double u;
    const std::size_t i = locate(t, u);
    if (size() < 4) return (1.0 - u) * accelerations_[i] + u * accelerations_[i + 1];
    return lagrange4(accelerations_, i, u);
}

// Cubic through four consecutive nodes containing interval i.
Vec Curve::lagrange4(const std::vector<Vec>& data, std::size_t i, double u) {
    std::size_t first = i == 0 ? 0 : i - 1;
    if (first + 3 >= data.size()) first = data.size() - 4;
    const double x = static_cast<double>(i) + u - static_cast<double>(first);
    Vec out = Vec::Zero(data[i].size());
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b != a) w *= (x - b) / static_cast<double>(a - b);
        }
        out += w * data[first + static_cast<std::size_t>(a)];
    }
    return out;
}

Curve Curve::normalized() const {
    std::vector<Vec> v(velocities_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = velocities_[i] * span_;
    std::vector<Vec> a;
    if (has_accelerations()) {
        a.resize(accelerations_.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = accelerations_[i] * (span_ * span_);
    }
    return Curve(1.0, points_, std::move(v), std::move(a));
}

std::string Curve::to_csv() const {
    std::ostringstream os;
    const int n = dim();
    os << "t";
    for (int k = 1; k <= n; ++k) os << ",x" << k;
    for (int k = 1; k <= n; ++k) os << ",v" << k;
    os << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
        os << format_double(param(i));
        for (int k = 0; k < n; ++k) os << ',' << format_double(points_[i][k]);
        for (int k = 0; k < n; ++k) os << ',' << format_double(velocities_[i][k]);
        os << '\n';
    }
    return os.str();
}

double speed_drift(const MetricChart& chart, const Curve& curve) {
    const auto& p = curve.points();
    const auto& v = curve.velocities();
    const double s0 = metric_eval(chart, p[0], v[0], v[0]);
    double worst = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        worst = std::max(worst, std::abs(metric_eval(chart, p[i], v[i], v[i]) - s0));
    }
    return worst;
}

double max_pointwise_distance(const Curve& a, const Curve& b) {
    if (a.size() != b.size() || a.dim() != b.dim()) throw InputError("curves are sampled differently");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, (a.points()[i] - b.points()[i]).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace warpgeo
