#include "meanforce/quadrature.hpp"

#include <numbers>

#include "meanforce/errors.hpp"

namespace meanforce {

GaussLegendre gauss_legendre(int n, double a, double b) {
    if (n < 1) throw InvalidParameter("gauss_legendre: n must be >= 1");
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n starting from the Tricomi estimate
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[i] = c - h * x;
        gl.nodes[n - 1 - i] = c + h * x;
        gl.weights[i] = gl.weights[n - 1 - i] = h * w;
    }
    return gl;
}

}  // namespace meanforce
