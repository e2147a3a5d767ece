#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "gpden/grid.hpp"
#include "gpden/potentials.hpp"

using namespace gpden;

namespace {

WaveField random_field(const SpatialGrid& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<cplx> v(grid.n());
    for (auto& z : v) z = {nd(rng), nd(rng)};
    return WaveField(grid, std::move(v));
}

template <typename F>
WaveField sample(const SpatialGrid& grid, F&& f) {
    std::vector<cplx> v(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) v[j] = f(grid.points()[j]);
    return WaveField(grid, std::move(v));
}

} // namespace

TEST_CASE("spatial grid: spacing, points and wavenumber layout") {
    const auto g = SpatialGrid::make(8, 0.0, 8.0);
    CHECK(g.dx() == 1.0);
    for (std::size_t j = 0; j < 8; ++j) CHECK(g.points()[j] == static_cast<double>(j));

    const auto h = SpatialGrid::make(8, -4.0, 4.0);
    const auto k = h.wavenumbers();
    const double dk = std::numbers::pi / 4.0;
    CHECK(k[0] == 0.0);
    CHECK(k[1] == doctest::Approx(dk));
    CHECK(k[2] == doctest::Approx(2 * dk));
    CHECK(k[4] == doctest::Approx(-4 * dk));
    CHECK(k[7] == doctest::Approx(-dk));
    for (std::size_t j = 1; j < 4; ++j) CHECK(k[j] == -k[8 - j]);
}

TEST_CASE("spatial grid: invariants for larger grids") {
    const auto g = SpatialGrid::make(256, -16.0, 16.0);
    for (std::size_t j = 1; j < g.n(); ++j) CHECK(g.points()[j] > g.points()[j - 1]);
    for (std::size_t j = 1; j < g.n() / 2; ++j) CHECK(g.wavenumbers()[j] == -g.wavenumbers()[g.n() - j]);
}

TEST_CASE("spatial grid: rejects bad sizes and intervals") {
    CHECK_THROWS_AS(SpatialGrid::make(6, 0.0, 1.0), Error);
    CHECK_THROWS_AS(SpatialGrid::make(4, 0.0, 1.0), Error);
    CHECK_THROWS_AS(SpatialGrid::make(8, 1.0, 1.0), Error);
    CHECK_THROWS_AS(SpatialGrid::make(8, 2.0, 1.0), Error);
    CHECK_THROWS_AS(SpatialGrid::make(8, 0.0, std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("time grid") {
    const auto t = TimeGrid::make(0.5, 0.25, 3);
    CHECK(t.times() == std::vector<double>{0.5, 0.75, 1.0});
    CHECK_THROWS_AS(TimeGrid::make(0.0, 0.0, 3), Error);
    CHECK_THROWS_AS(TimeGrid::make(0.0, 0.1, 1), Error);
}

TEST_CASE("wave field rejects non-finite values and length mismatch") {
    const auto g = SpatialGrid::make(8, 0.0, 8.0);
    std::vector<cplx> v(8, 1.0);
    v[3] = {std::nan(""), 0.0};
    CHECK_THROWS_AS(WaveField(g, v), Error);
    CHECK_THROWS_AS(WaveField(g, std::vector<cplx>(7)), Error);
}

TEST_CASE("second derivative of a constant vanishes") {
    const auto g = SpatialGrid::make(64, -3.0, 5.0);
    const auto d = spectral_second_derivative(sample(g, [](double) { return cplx(1.0, 0.0); }));
    for (const auto& z : d.values()) CHECK(std::abs(z) < 1e-14);
}

TEST_CASE("second derivative of a grid harmonic is -k^2 times it") {
    const auto g = SpatialGrid::make(64, -8.0, 8.0);
    const double k1 = g.wavenumbers()[3];
    const auto f = sample(g, [&](double x) { return cplx(std::sin(k1 * x), 0.0); });
    const auto d = spectral_second_derivative(f);
    for (std::size_t j = 0; j < g.n(); ++j) {
        CHECK(std::abs(d[j] + k1 * k1 * f[j]) < 1e-12);
    }

    // every discrete plane wave, including Nyquist
    for (std::size_t m = 0; m < g.n(); ++m) {
        const double km = g.wavenumbers()[m];
        std::vector<cplx> v(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) {
            v[j] = std::polar(1.0, 2.0 * std::numbers::pi * double(m * j) / double(g.n()));
        }
        const WaveField e(g, v);
        const auto de = spectral_second_derivative(e);
        double err = 0.0;
        for (std::size_t j = 0; j < g.n(); ++j) err = std::max(err, std::abs(de[j] + km * km * e[j]));
        CHECK(err < 1e-11 * std::max(1.0, km * km));
    }
}

TEST_CASE("second derivative of a Gaussian matches the analytic derivative") {
    const auto g = SpatialGrid::make(256, -16.0, 16.0);
    const auto f = sample(g, [](double x) { return cplx(std::exp(-0.5 * x * x), 0.0); });
    const auto d = spectral_second_derivative(f);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double x = g.points()[j];
        err = std::max(err, std::abs(d[j] - (x * x - 1.0) * std::exp(-0.5 * x * x)));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("second derivative is linear") {
    const auto g = SpatialGrid::make(128, -10.0, 10.0);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_field(g, rng);
        const auto h = random_field(g, rng);
        const cplx a(0.3, -1.2), b(-2.0, 0.5);
        std::vector<cplx> mix(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) mix[j] = a * f[j] + b * h[j];
        const auto lhs = spectral_second_derivative(WaveField(g, mix));
        const auto df = spectral_second_derivative(f);
        const auto dh = spectral_second_derivative(h);
        double scale = 0.0, err = 0.0;
        for (std::size_t j = 0; j < g.n(); ++j) {
            const cplx rhs = a * df[j] + b * dh[j];
            scale = std::max(scale, std::abs(rhs));
            err = std::max(err, std::abs(lhs[j] - rhs));
        }
        CHECK(err < 1e-13 * scale);
    }
}

TEST_CASE("inner product values") {
    const auto g8 = SpatialGrid::make(8, 0.0, 8.0);
    const auto one = sample(g8, [](double) { return cplx(1.0, 0.0); });
    CHECK(inner_product(one, one).real() == doctest::Approx(8.0));

    const auto g = SpatialGrid::make(256, -16.0, 16.0);
    const auto p0 = hermite_eigenstate(0, g).field;
    const auto p1 = hermite_eigenstate(1, g).field;
    CHECK(std::abs(inner_product(p0, p1)) < 1e-12);

    // pi^{-1/2} exp(-x^2) integrates to 1 exactly
    const auto gauss = sample(g, [](double x) {
        return cplx(std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x), 0.0);
    });
    CHECK(std::abs(inner_product(gauss, gauss) - 1.0) < 1e-12);
}

TEST_CASE("inner product: conjugate symmetry, positivity, Parseval") {
    const auto g = SpatialGrid::make(64, -5.0, 5.0);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_field(g, rng);
        const auto h = random_field(g, rng);
        const cplx fh = inner_product(f, h);
        const cplx hf = inner_product(h, f);
        CHECK(std::abs(fh - std::conj(hf)) < 1e-13 * std::abs(fh) + 1e-15);
        const cplx ff = inner_product(f, f);
        CHECK(ff.imag() == 0.0);
        CHECK(ff.real() >= 0.0);
        const cplx spectral = inner_product_spectral(f, f);
        CHECK(std::abs(spectral - ff) < 1e-12 * ff.real());
    }
}

TEST_CASE("inner product rejects mismatched grids") {
    const auto a = WaveField(SpatialGrid::make(8, 0.0, 8.0), std::vector<cplx>(8, 1.0));
    const auto b = WaveField(SpatialGrid::make(8, 0.0, 4.0), std::vector<cplx>(8, 1.0));
    CHECK_THROWS_AS(inner_product(a, b), Error);
}

TEST_CASE("spectral derivative is safe to call concurrently") {
    const auto g = SpatialGrid::make(512, -20.0, 20.0);
    std::mt19937_64 rng(3);
    const auto f = random_field(g, rng);
    const auto reference = spectral_second_derivative(f);
    std::vector<WaveField> results(8, f);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < results.size(); ++t) {
        threads.emplace_back([&, t] {
            // first use of a fresh size from several threads exercises the planner lock
            const auto h = SpatialGrid::make(std::size_t{1024} << (t % 2), -1.0, 1.0);
            (void)spectral_second_derivative(WaveField(h, std::vector<cplx>(h.n(), 1.0)));
            results[t] = spectral_second_derivative(f);
        });
    }
    for (auto& th : threads) th.join();
    for (const auto& r : results) {
        for (std::size_t j = 0; j < g.n(); ++j) CHECK(r[j] == reference[j]);
    }
}
