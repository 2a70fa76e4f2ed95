#pragma once

#include <random>
#include <string>

namespace warpgeo::fixtures {

// Random expression text over x1..x_dim that is smooth and finite everywhere
// on [-2, 2]^dim: divisions, logs and square roots only see arguments bounded
// away from zero.
class RandomExpression {
public:
    RandomExpression(int dim, std::uint64_t seed) : dim_(dim), rng_(seed) {}

    std::string generate(int depth = 4) { return node(depth); }

private:
    std::string var() {
        return "x" + std::to_string(std::uniform_int_distribution<int>(1, dim_)(rng_));
    }
    std::string number() {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", std::uniform_real_distribution<double>(0.1, 2.0)(rng_));
        return buf;
    }
    std::string bounded(int depth) {
        // values in [-1, 1]
        return std::uniform_int_distribution<int>(0, 1)(rng_) ? "sin(" + node(depth) + ")"
                                                               : "cos(" + node(depth) + ")";
    }
    std::string node(int depth) {
        if (depth <= 0) return std::uniform_int_distribution<int>(0, 2)(rng_) ? var() : number();
        switch (std::uniform_int_distribution<int>(0, 9)(rng_)) {
            case 0: return "(" + node(depth - 1) + " + " + node(depth - 1) + ")";
            case 1: return "(" + node(depth - 1) + " - " + node(depth - 1) + ")";
            case 2: return node(depth - 1) + " * " + node(depth - 1);
            case 3: return "(" + node(depth - 1) + ") / (2 + " + bounded(depth - 1) + ")";
            case 4: return bounded(depth - 1);
            case 5: return "exp(" + bounded(depth - 1) + ")";
            case 6: return "log(3 + " + bounded(depth - 1) + ")";
            case 7: return "sqrt(1 + (" + node(depth - 1) + ")^2)";
            case 8: return "(" + node(depth - 1) + ")^" + std::to_string(std::uniform_int_distribution<int>(2, 3)(rng_));
            default: return "-" + var();
        }
    }

    int dim_;
    std::mt19937_64 rng_;
};

}  // namespace warpgeo::fixtures
