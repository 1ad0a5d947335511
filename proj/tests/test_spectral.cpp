// test_spectral.cpp - spectral densities, Lamb coefficients, beta correlation

#include <cmath>
#include <functional>

#include "doctest.h"
#include "meanforce/errors.hpp"
#include "meanforce/spectral.hpp"

using namespace meanforce;

namespace {

const SpectralDensity kOhmic(OhmicExponential{10, 1});

// reference values from 30-digit arbitrary-precision quadrature, Ohmic q=10 tau_c=1, beta=1
constexpr double kA3 = -9.62061564588940995;
constexpr double kAm3 = 6.92081139777061801;
constexpr double kDA3 = 1.72357454249795114;
constexpr double kG05 = 18.6960440108935862;
constexpr double kB2 = 22.8986813369645287;

double ohmic(double w) { return 10 * w * std::exp(-w); }
double ohmic_coth(double w, double beta) {
    return w == 0 ? 20 / beta : 10 * std::exp(-w) * w / std::tanh(beta * w / 2);
}

// composite Simpson on [a, b] with n (even) panels
double simpson(const std::function<double(double)>& f, double a, double b, long n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (long i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}

// PV int_0^L f/(w - a) by subtracting f(a): the remainder is smooth and the
// removed piece integrates to f(a) ln((L - a)/a). L = 60 leaves e^-60 behind.
double dense_pv(const std::function<double(double)>& f, double a) {
    const double fa = f(a), L = 60;
    const double eps = 1e-4;
    const double fprime = (f(a + eps) - f(a - eps)) / (2 * eps);
    auto g = [&](double w) { return std::abs(w - a) < 1e-9 ? fprime : (f(w) - fa) / (w - a); };
    return simpson(g, 0, L, 2'000'000) + fa * std::log((L - a) / a);
}

double dense_lamb(double x, double beta) {
    const double a = std::abs(x);
    return dense_pv([&](double w) { return (x * ohmic_coth(w, beta) + ohmic(w) * w) / (w + a); }, a);
}

}  // namespace

TEST_CASE("reorganization energy") {
    CHECK(reorganization_energy(kOhmic) == doctest::Approx(10).epsilon(1e-10));
    CHECK(reorganization_energy(SpectralDensity(OhmicExponential{1, 2})) == doctest::Approx(1).epsilon(1e-10));

    // tabulated copy on a grid that starts close to zero (below it J is extrapolated as w^s)
    std::vector<double> grid, vals;
    for (double w = 1e-5; w < 0.005; w *= 1.2) grid.push_back(w);
    for (int i = 1; i <= 8000; ++i) grid.push_back(0.005 * i);
    for (double w : grid) vals.push_back(ohmic(w));
    SpectralDensity tab(Tabulated{grid, vals, 1});
    const double q = reorganization_energy(tab);
    CHECK(std::abs(q - 10) / 10 < 1e-6);
    // trapezoid oracle on the interpolant, ten sub-panels per table interval
    double trap = vals[0];  // J/w is flat below the grid for s = 1
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double h = (grid[i] - grid[i - 1]) / 10;
        for (int k = 0; k < 10; ++k) {
            const double a = grid[i - 1] + k * h;
            trap += 0.5 * h * (tab.over_omega(a) + tab.over_omega(a + h));
        }
    }
    CHECK(std::abs(q - trap) / 10 < 1e-6);
}

TEST_CASE("spectral density validation") {
    CHECK_THROWS_AS(SpectralDensity(OhmicExponential{-1, 1}), InvalidParameter);
    CHECK_THROWS_AS(SpectralDensity(OhmicExponential{1, 0}), InvalidParameter);
    CHECK_THROWS_AS(SpectralDensity(Tabulated{{1, 0.5}, {1, 1}, 1}), InvalidParameter);
    CHECK_THROWS_AS(SpectralDensity(Tabulated{{1, 2}, {1, -1}, 1}), InvalidParameter);
    CHECK_THROWS_AS(SpectralDensity(DiscreteModes{{1, 1}, {1, 1}}), InvalidParameter);
    CHECK(kOhmic.over_omega(0) == doctest::Approx(10));
}

TEST_CASE("bose occupation") {
    CHECK(bose_occupation(1, std::log(2.0)) == doctest::Approx(1).epsilon(1e-14));
    CHECK(bose_occupation(1, 800) == 0.0);
    // 1/x - 1/2 + x/12 at x = 0.01
    CHECK(bose_occupation(1, 0.01) == doctest::Approx(100 - 0.5 + 0.01 / 12).epsilon(1e-9));
}

TEST_CASE("lamb coefficient at zero frequency equals Q") {
    for (double beta : {0.01, 1.0, 30.0}) CHECK(lamb_coefficient(kOhmic, beta, 0).value == doctest::Approx(10).epsilon(1e-10));
}

TEST_CASE("lamb coefficient against the dense-grid oracle and reference values") {
    const double a3 = lamb_coefficient(kOhmic, 1, 3).value;
    const double am3 = lamb_coefficient(kOhmic, 1, -3).value;
    CHECK(a3 == doctest::Approx(kA3).epsilon(1e-10));
    CHECK(am3 == doctest::Approx(kAm3).epsilon(1e-10));
    CHECK(std::abs(a3 - dense_lamb(3, 1)) / std::abs(a3) < 1e-8);
    CHECK(std::abs(am3 - dense_lamb(-3, 1)) / std::abs(am3) < 1e-8);

    // A(w) + A(-w) = 2 PV int J w/(w^2 - a^2)
    const double even = dense_pv([](double w) { return ohmic(w) * w / (w + 3); }, 3);
    CHECK(a3 + am3 == doctest::Approx(2 * even).epsilon(1e-8));
}

TEST_CASE("lamb coefficient derivative") {
    const double d3 = lamb_coefficient_derivative(kOhmic, 1, 3).value;
    CHECK(d3 == doctest::Approx(kDA3).epsilon(1e-9));

    // least-squares quadratic through five oracle points, slope at the centre
    const double h = 0.01;
    double num = 0;
    for (int k = -2; k <= 2; ++k) num += k * dense_lamb(3 + k * h, 1);
    CHECK(d3 == doctest::Approx(num / (10 * h)).epsilon(1e-4));

    // For Ohmic J, A is log-singular at zero, so the value there is the stencil itself:
    // Richardson on the symmetric slopes (A(h) - A(-h))/2h at h and h/2. It only ever
    // multiplies [X_0, tau X_0] = 0.
    const double d0 = lamb_coefficient_derivative(kOhmic, 1, 0).value;
    auto sym = [](double h) { return (lamb_coefficient(kOhmic, 1, h).value - lamb_coefficient(kOhmic, 1, -h).value) / (2 * h); };
    CHECK(d0 == doctest::Approx((4 * sym(0.5e-4) - sym(1e-4)) / 3).epsilon(1e-6));
    SpectralDensity modes(DiscreteModes{{0.5, 2.0}, {0.3, 0.7}});
    CHECK(lamb_coefficient_derivative(modes, 1, 0).value ==
          doctest::Approx((lamb_coefficient(modes, 1, 1e-4).value - lamb_coefficient(modes, 1, -1e-4).value) / 2e-4).epsilon(1e-6));
}

TEST_CASE("continuity of A across the pole region") {
    // A is smooth in w away from zero: second differences on a fine grid stay small
    std::vector<double> a;
    for (double w = 0.5; w < 6; w += 0.02) a.push_back(lamb_coefficient(kOhmic, 1, w).value);
    for (std::size_t i = 2; i < a.size(); ++i) CHECK(std::abs(a[i] - 2 * a[i - 1] + a[i - 2]) < 0.02);
    const double l = lamb_coefficient(kOhmic, 1, 2 - 1e-7).value, r = lamb_coefficient(kOhmic, 1, 2 + 1e-7).value;
    CHECK(std::abs(l - r) < 1e-5);
}

TEST_CASE("linearity in J") {
    for (double c : {0.3, 4.0}) {
        auto jc = kOhmic.scaled(c);
        for (double w : {-2.0, 0.0, 1.3}) {
            CHECK(lamb_coefficient(jc, 0.7, w).value == doctest::Approx(c * lamb_coefficient(kOhmic, 0.7, w).value).epsilon(1e-10));
            CHECK(lamb_coefficient_derivative(jc, 0.7, w).value ==
                  doctest::Approx(c * lamb_coefficient_derivative(kOhmic, 0.7, w).value).epsilon(1e-8));
        }
        CHECK(beta_correlation(jc, 1, 0.3).value == doctest::Approx(c * beta_correlation(kOhmic, 1, 0.3).value).epsilon(1e-10));
    }
}

TEST_CASE("high-temperature cancellation stays bounded") {
    for (double beta : {1e-1, 1e-2, 1e-3}) {
        const double s = beta * (lamb_coefficient(kOhmic, beta, 1).value - lamb_coefficient(kOhmic, beta, -1).value);
        CHECK(std::isfinite(s));
        CHECK(std::abs(s) < 100);
    }
}

TEST_CASE("d coefficient branches") {
    CHECK(d_coefficient(10, 10, false) == 0.0);
    CHECK(d_coefficient(5, 10, true) == 5.0);
    CHECK(d_coefficient(7, 10, false) == -3.0);
}

TEST_CASE("beta correlation") {
    CHECK(beta_correlation(kOhmic, 1, 0).value == doctest::Approx(kB2).epsilon(1e-10));
    const double g = beta_correlation(kOhmic, 1, 0.5).value;
    CHECK(g == doctest::Approx(kG05).epsilon(1e-10));
    const double dense =
        simpson([](double w) { return w == 0 ? 20.0 : ohmic(w) * std::cosh((0.5 - 0.5) * w) / std::sinh(w / 2); }, 0, 80, 2'000'000);
    CHECK(std::abs(g - dense) / g < 1e-8);
    for (double b1 : {0.1, 0.25, 0.4})
        CHECK(beta_correlation(kOhmic, 1, b1).value == doctest::Approx(beta_correlation(kOhmic, 1, 1 - b1).value).epsilon(1e-10));
    // <B^2> is int J coth
    CHECK(beta_correlation(kOhmic, 2, 0).value ==
          doctest::Approx(simpson([](double w) { return ohmic_coth(w, 2); }, 0, 80, 2'000'000)).epsilon(1e-8));
}

TEST_CASE("discrete modes use exact sums") {
    SpectralDensity d(DiscreteModes{{0.5, 2.0}, {0.3, 0.7}});
    CHECK(reorganization_energy(d) == doctest::Approx(0.09 / 0.5 + 0.49 / 2).epsilon(1e-14));
    const double beta = 1.3, x = 1.1;
    double expect = 0;
    for (auto [w, g] : {std::pair{0.5, 0.3}, std::pair{2.0, 0.7}})
        expect += g * g * (x / std::tanh(beta * w / 2) + w) / (w * w - x * x);
    CHECK(lamb_coefficient(d, beta, x).value == doctest::Approx(expect).epsilon(1e-13));
    CHECK(lamb_coefficient(d, beta, 0).value == doctest::Approx(reorganization_energy(d)).epsilon(1e-13));
}

TEST_CASE("bath coefficient table") {
    auto t = bath_coefficients(kOhmic, 1, {-3, 0, 3});
    CHECK(t.q == doctest::Approx(10).epsilon(1e-10));
    CHECK(t.a_at(3) == doctest::Approx(kA3).epsilon(1e-10));
    CHECK(t.a_at(-3) == doctest::Approx(kAm3).epsilon(1e-10));
    CHECK(t.da_at(3) == doctest::Approx(kDA3).epsilon(1e-9));
    CHECK(t.quadrature_error_estimate >= 0);
}
