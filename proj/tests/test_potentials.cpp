#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gpden/potentials.hpp"
#include "gpden/propagator.hpp"

using namespace gpden;

namespace {

std::size_t index_of(const SpatialGrid& g, double x) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < g.n(); ++j) {
        if (std::abs(g.points()[j] - x) < std::abs(g.points()[best] - x)) best = j;
    }
    return best;
}

// Free evolution by direct quadrature of the Fourier integral
//   psi(x,t) = (1/2pi) int F(k) exp(i k x - i k^2 t / 2) dk
// with the analytic transform F of the initial packet.
cplx free_packet_by_quadrature(double x, double t, double x0, double p0, double w) {
    const double norm = std::pow(std::numbers::pi * w * w, -0.25) * std::sqrt(2 * std::numbers::pi) * w;
    const int m = 8001;
    const double k_lo = p0 - 12.0 / w, k_hi = p0 + 12.0 / w;
    const double h = (k_hi - k_lo) / (m - 1);
    cplx sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double k = k_lo + i * h;
        const double weight = (i == 0 || i == m - 1) ? 0.5 : 1.0;
        const double amp = norm * std::exp(-0.5 * w * w * (k - p0) * (k - p0));
        sum += weight * std::polar(amp, -k * x0 + k * x - 0.5 * k * k * t);
    }
    return sum * h / (2 * std::numbers::pi);
}

} // namespace

TEST_CASE("potential evaluation") {
    const auto g = SpatialGrid::make(8, -4.0, 4.0);  // points -4..3
    for (double u : evaluate_potential(PotentialSpec::zero(), g)) CHECK(u == 0.0);
    const auto h1 = evaluate_potential(PotentialSpec::harmonic(1.0), g);
    CHECK(h1[6] == doctest::Approx(2.0));  // x = 2
    const auto h2 = evaluate_potential(PotentialSpec::harmonic(2.0), g);
    CHECK(h2[5] == doctest::Approx(2.0));  // x = 1
    const auto tab = evaluate_potential(PotentialSpec::tabulated({1, 2, 3, 4, 5, 6, 7, 8}), g);
    CHECK(tab[7] == 8.0);
    CHECK_THROWS_AS(evaluate_potential(PotentialSpec::tabulated({1, 2}), g), Error);
    CHECK_THROWS_AS(PotentialSpec::harmonic(0.0), Error);
    CHECK_THROWS_AS(PotentialSpec::harmonic(-1.0), Error);
}

TEST_CASE("oscillator eigenstates: values at the origin") {
    const auto g = SpatialGrid::make(256, -16.0, 16.0);
    const auto s0 = hermite_eigenstate(0, g);
    const std::size_t origin = index_of(g, 0.0);
    REQUIRE(g.points()[origin] == 0.0);
    CHECK(s0.field[origin].real() == doctest::Approx(0.751125544464943).epsilon(1e-14));
    CHECK(s0.energy == 0.5);
    CHECK(s0.kind == StateKind::LinearEigenstate);
    const auto s1 = hermite_eigenstate(1, g);
    CHECK(s1.field[origin].real() == 0.0);
    CHECK(s1.energy == 1.5);
    CHECK_THROWS_AS(hermite_eigenstate(-1, g), Error);
}

TEST_CASE("oscillator eigenstates are orthonormal") {
    const auto g = SpatialGrid::make(512, -16.0, 16.0);
    std::vector<WaveField> phi;
    for (int n = 0; n <= 5; ++n) phi.push_back(hermite_eigenstate(n, g).field);
    for (int m = 0; m <= 5; ++m) {
        for (int n = 0; n <= 5; ++n) {
            const double expected = m == n ? 1.0 : 0.0;
            CHECK(std::abs(inner_product(phi[m], phi[n]) - expected) < 1e-9);
        }
    }
}

TEST_CASE("oscillator eigenstates satisfy H phi_n = (n + 1/2) phi_n") {
    const auto g = SpatialGrid::make(512, -16.0, 16.0);
    const auto u = PotentialSpec::harmonic(1.0);
    for (int n = 0; n <= 5; ++n) {
        const auto s = hermite_eigenstate(n, g);
        const auto h = apply_hamiltonian(s.field, u, 0.0);
        double err = 0.0;
        for (std::size_t j = 0; j < g.n(); ++j) err = std::max(err, std::abs(h[j] - (n + 0.5) * s.field[j]));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("gaussian packet") {
    const auto g = SpatialGrid::make(256, -16.0, 16.0);
    const auto f = gaussian_packet(0.0, 0.0, 1.0, g);
    CHECK(f[index_of(g, 0.0)].real() == doctest::Approx(std::pow(std::numbers::pi, -0.25)));
    CHECK(std::abs(norm(f) - 1.0) < 1e-10);

    const auto shifted = gaussian_packet(3.0, 0.0, 1.0, g);
    std::size_t peak = 0;
    for (std::size_t j = 0; j < g.n(); ++j) {
        if (std::abs(shifted[j]) > std::abs(shifted[peak])) peak = j;
    }
    CHECK(peak == index_of(g, 3.0));

    const auto moving = gaussian_packet(-1.0, 1.5, 0.7, g);
    CHECK(std::abs(norm(moving) - 1.0) < 1e-10);
    CHECK_THROWS_AS(gaussian_packet(0.0, 0.0, 0.0, g), Error);
}

TEST_CASE("closed-form free packet agrees with Fourier quadrature") {
    const auto g = SpatialGrid::make(256, -16.0, 16.0);
    const double x0 = -1.0, p0 = 0.8, w = 1.3, t = 1.7;
    const auto f = free_gaussian_exact(x0, p0, w, t, g);
    for (std::size_t j = 96; j < 176; j += 7) {
        const cplx ref = free_packet_by_quadrature(g.points()[j], t, x0, p0, w);
        CHECK(std::abs(f[j] - ref) < 1e-10);
    }
}

TEST_CASE("bright soliton") {
    const double half = 20.0 * std::numbers::pi;
    const auto g = SpatialGrid::make(512, -half, half);
    const auto s = bright_soliton(1.0, 0.0, 0.0, -1.0, g);
    CHECK(s.energy == doctest::Approx(-0.5));
    CHECK(s.kind == StateKind::GpeSoliton);
    for (std::size_t j = 0; j < g.n(); j += 17) {
        CHECK(std::abs(s.field[j] - 1.0 / std::cosh(g.points()[j])) < 1e-15);
    }
    // int C^2 sech^2(K x) dx = 2 C^2 / K = 2 for C = K = 1
    CHECK(std::abs(norm(s.field) - 2.0) < 1e-8);
    CHECK_THROWS_AS(bright_soliton(1.0, 0.0, 0.0, 1.0, g), Error);
    CHECK_THROWS_AS(bright_soliton(1.0, 0.0, 0.0, 0.0, g), Error);
    CHECK_THROWS_AS(bright_soliton(-1.0, 0.0, 0.0, -1.0, g), Error);

    const auto wide = bright_soliton(1.5, 2.0, 0.3, -2.0, g);
    CHECK(wide.energy == doctest::Approx(-0.5 * 1.5 * 1.5 * 2.0));
}

TEST_CASE("bright soliton solves the stationary cubic equation") {
    const auto g = SpatialGrid::make(512, -32.0, 32.0);
    const auto s = bright_soliton(1.0, 0.0, 0.0, -1.0, g);
    const auto h = apply_hamiltonian(s.field, PotentialSpec::zero(), -1.0);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) err = std::max(err, std::abs(h[j] - s.energy * s.field[j]));
    CHECK(err < 1e-8);
}

TEST_CASE("grid adequacy rule") {
    const double half = 20.0 * std::numbers::pi;
    const auto coarse = SpatialGrid::make(256, -half, half);
    const auto fine = SpatialGrid::make(512, -half, half);
    CHECK_FALSE(assess_grid(bright_soliton(1.0, 0.0, 0.0, -1.0, coarse).field).adequate());
    CHECK(assess_grid(bright_soliton(1.0, 0.0, 0.0, -1.0, fine).field).adequate());

    const auto narrow = SpatialGrid::make(256, -4.0, 4.0);
    CHECK(assess_grid(hermite_eigenstate(0, narrow).field).boundary_amplitude > 1e-12);
    CHECK(assess_grid(hermite_eigenstate(0, SpatialGrid::make(256, -16.0, 16.0)).field).adequate());
}
