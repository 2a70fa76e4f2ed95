#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "warpgeo/chart.hpp"
#include "warpgeo/expr.hpp"

namespace warpgeo {

// The warp function k on M1 with its first and second coordinate derivatives
// and the declared bounds k0 <= k <= K0 (K0 may be unbounded). Every query
// checks the declared bounds.
class WarpField {
public:
    using JetFn = std::function<dsl::Jet(const Vec&)>;

    WarpField(int dim, JetFn jet, double k0, std::optional<double> K0);

    static WarpField from_expression(const dsl::Expr& k, double k0, std::optional<double> K0);
    static WarpField constant(int dim, double c);

    int dim() const { return dim_; }
    double k0() const { return k0_; }
    const std::optional<double>& K0() const { return K0_; }

    dsl::Jet jet(const Vec& p) const;
    double value_at(const Vec& p) const;
    Vec differential_at(const Vec& p) const;
    // Coordinate Hessian; the covariant one is covariant_hessian().
    Mat hessian_at(const Vec& p) const;

private:
    int dim_;
    JetFn jet_;
    double k0_;
    std::optional<double> K0_;
};

struct WarpParameterRange {
    double k1;
    bool admits(double r) const { return r > k1; }
};

WarpParameterRange admissible_range(const WarpField& w);

// Throws ParameterError unless r > k1.
void require_admissible(const WarpField& w, double r);

// G_r = (1/k + r) g1.
MetricChart conformal_metric(const MetricChart& g1, const WarpField& w, double r);

struct EquivalenceBounds {
    double k2;  // sup t / (1 + r t) over [k0, K0]
    double k3;  // sup (1 + r t) / t over [k0, K0]
};

EquivalenceBounds equivalence_bounds(const WarpField& w, double r);

// (nabla^1 dk)_ij = d_i d_j k - Gamma^m_ij d_m k
Mat covariant_hessian(const MetricChart& g1, const WarpField& w, const Vec& p);

// |dk|_1^2 = g1(sharp dk, sharp dk)
double differential_norm_sq(const MetricChart& g1, const WarpField& w, const Vec& p);

// Sectional curvature of G_r on the plane spanned by the g1-orthonormal pair
// (e1, e2), expressed through the curvature of g1 and derivatives of k.
double sectional_curvature_Gr(const MetricChart& g1, const WarpField& w, double r, const Vec& p,
                              const TangentVector& e1, const TangentVector& e2);

// Right side minus left side of the per-direction Hessian bound that makes
// G_r negatively curved; positive means the bound holds for e.
double negativity_margin(const MetricChart& g1, const WarpField& w, double r, const Vec& p,
                         const TangentVector& e, double sigma_curvature);

bool negativity_check(const MetricChart& g1, const WarpField& w, double r, const Vec& p,
                      const TangentVector& e, double sigma_curvature);

struct CurvatureSample {
    Vec point;
    double r;
    Vec e1;
    Vec e2;
    double K1;          // sectional curvature of g1 on the plane
    double K_r;         // sectional curvature of G_r on the plane
    double margin_e1;   // negativity_margin for e1
    double margin_e2;   // negativity_margin for e2
    bool bound_holds() const { return margin_e1 > 0.0 && margin_e2 > 0.0; }
};

// Evaluates sectional_curvature_Gr and the negativity bound over points x r
// values x `planes` random g1-orthonormal planes per point (deterministic for
// a given seed).
std::vector<CurvatureSample> curvature_scan(const MetricChart& g1, const WarpField& w,
                                            const std::vector<Vec>& points,
                                            const std::vector<double>& r_values, int planes,
                                            std::uint64_t seed);

// Gram-Schmidt in the g1 inner product at p.
std::pair<Vec, Vec> orthonormalize(const MetricChart& g1, const Vec& p, const Vec& u, const Vec& v);

}  // namespace warpgeo
