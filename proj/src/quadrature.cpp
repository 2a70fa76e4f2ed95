#include "warpgeo/quadrature.hpp"

#include "warpgeo/errors.hpp"

namespace warpgeo {

double simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 3 || (n - 1) % 2 != 0) {
        throw InputError("Simpson rule needs an even number of intervals",
                         {{"samples", static_cast<double>(n)}});
    }
    double s = f[0] + f[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 4) throw InputError("running integral needs at least four samples");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double piece;
        if (i == 0) {
            piece = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3];
        } else if (i + 2 == n) {
            piece = 9.0 * f[i + 1] + 19.0 * f[i] - 5.0 * f[i - 1] + f[i - 2];
        } else {
            piece = -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2];
        }
        out[i + 1] = out[i] + piece * h / 24.0;
    }
    return out;
}

std::vector<double> differentiate(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw InputError("differentiation needs at least five samples");
    std::vector<double> d(n);
    const double c = 1.0 / (12.0 * h);
    auto fwd = [&](std::size_t i, int s) {
        // one-sided, s = +1 forward, -1 backward
        const auto at = [&](int k) { return f[static_cast<std::size_t>(static_cast<long>(i) + s * k)]; };
        return s * c * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
    };
    auto fwd1 = [&](std::size_t i, int s) {
        const auto at = [&](int k) { return f[static_cast<std::size_t>(static_cast<long>(i) + s * k)]; };
        return s * c * (-3.0 * at(-1) - 10.0 * at(0) + 18.0 * at(1) - 6.0 * at(2) + at(3));
    };
    d[0] = fwd(0, 1);
    d[1] = fwd1(1, 1);
    d[n - 1] = fwd(n - 1, -1);
    d[n - 2] = fwd1(n - 2, -1);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    return d;
}

}  // namespace warpgeo
