#include "warpgeo/roots.hpp"

#include <cmath>
#include <utility>

#include "warpgeo/errors.hpp"

namespace warpgeo {

RootResult brent(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                 double xtol, double ftol, int max_iter) {
    if (fa == 0.0) return {a, fa, 0};
    if (fb == 0.0) return {b, fb, 0};
    if ((fa > 0.0) == (fb > 0.0)) {
        throw NumericalError("root is not bracketed", {{"a", a}, {"b", b}, {"fa", fa}, {"fb", fb}});
    }
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 1; it <= max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * 2.2e-16 * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || std::abs(fb) <= ftol) return {b, fb, it};
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    throw NumericalError("root finder did not converge",
                         {{"x", b}, {"fx", fb}, {"iterations", static_cast<double>(max_iter)}});
}

}  // namespace warpgeo
