#include "warpgeo/charts.hpp"

#include <cmath>

namespace warpgeo::charts {

namespace {

MetricChart::CurvatureFn constant_curvature(double k) {
    return [k](const Vec&, const Vec&, const Vec&) { return k; };
}

}  // namespace

MetricChart euclidean(int dim) {
    if (dim < 1) throw InputError("euclidean chart needs dim >= 1");
    return MetricChart(
        "euclidean", dim, [dim](const Vec&) -> Mat { return Mat::Identity(dim, dim); },
        [dim](const Vec&) { return std::vector<Mat>(static_cast<std::size_t>(dim), Mat::Zero(dim, dim)); },
        {}, dim >= 2 ? constant_curvature(0.0) : MetricChart::CurvatureFn{});
}

MetricChart poincare_half_space(int dim) {
    if (dim < 2) throw InputError("Poincare half-space needs dim >= 2");
    const int last = dim - 1;
    return MetricChart(
        "poincare-half-space", dim,
        [dim, last](const Vec& p) -> Mat {
            const double y = p[last];
            return Mat::Identity(dim, dim) / (y * y);
        },
        [dim, last](const Vec& p) {
            std::vector<Mat> dg(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
            const double y = p[last];
            dg[static_cast<std::size_t>(last)] = Mat::Identity(dim, dim) * (-2.0 / (y * y * y));
            return dg;
        },
        [last](const Vec& p) { return p[last] > 0.0; }, constant_curvature(-1.0));
}

MetricChart poincare_ball(int dim) {
    if (dim < 2) throw InputError("Poincare ball needs dim >= 2");
    return MetricChart(
        "poincare-ball", dim,
        [dim](const Vec& p) -> Mat {
            const double s = 1.0 - p.squaredNorm();
            return Mat::Identity(dim, dim) * (4.0 / (s * s));
        },
        [dim](const Vec& p) {
            const double s = 1.0 - p.squaredNorm();
            std::vector<Mat> dg;
            dg.reserve(static_cast<std::size_t>(dim));
            for (int k = 0; k < dim; ++k) {
                dg.push_back(Mat::Identity(dim, dim) * (16.0 * p[k] / (s * s * s)));
            }
            return dg;
        },
        [](const Vec& p) { return p.squaredNorm() < 1.0; }, constant_curvature(-1.0));
}

MetricChart sphere(int dim, double radius) {
    if (dim < 1) throw InputError("sphere chart needs dim >= 1");
    if (!(radius > 0.0)) throw InputError("sphere radius must be positive", {{"radius", radius}});
    const double r2 = radius * radius;
    const auto diagonal = [dim, r2](const Vec& p) {
        Vec d(dim);
        double prod = r2;
        for (int i = 0; i < dim; ++i) {
            d[i] = prod;
            const double s = std::sin(p[i]);
            prod *= s * s;
        }
        return d;
    };
    return MetricChart(
        dim == 1 ? "circle" : "sphere", dim,
        [diagonal](const Vec& p) -> Mat { return diagonal(p).asDiagonal(); },
        [dim, diagonal](const Vec& p) {
            const Vec d = diagonal(p);
            std::vector<Mat> dg(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
            for (int m = 0; m < dim; ++m) {
                const double cot2 = 2.0 * std::cos(p[m]) / std::sin(p[m]);
                for (int i = m + 1; i < dim; ++i) dg[static_cast<std::size_t>(m)](i, i) = d[i] * cot2;
            }
            return dg;
        },
        [dim](const Vec& p) {
            for (int i = 0; i + 1 < dim; ++i) {
                if (!(p[i] > 0.0 && p[i] < M_PI)) return false;
            }
            return true;
        },
        dim >= 2 ? constant_curvature(1.0 / r2) : MetricChart::CurvatureFn{});
}

MetricChart weighted_line(const dsl::Expr& f) {
    if (f.dim() != 1) throw InputError("weighted line weight must be an expression in one variable");
    return MetricChart(
        "weighted-line", 1,
        [f](const Vec& p) -> Mat {
            Mat g(1, 1);
            g(0, 0) = f.value(std::span<const double>(p.data(), 1));
            return g;
        },
        [f](const Vec& p) {
            const auto jet = f.eval2(std::span<const double>(p.data(), 1));
            Mat d(1, 1);
            d(0, 0) = jet.d(0);
            return std::vector<Mat>{d};
        },
        [f](const Vec& p) {
            try {
                return f.value(std::span<const double>(p.data(), 1)) > 0.0;
            } catch (const dsl::EvaluationError&) {
                return false;
            }
        });
}

}  // namespace warpgeo::charts
