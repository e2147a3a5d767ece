#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gpden/density.hpp"
#include "gpden/propagator.hpp"

using namespace gpden;

namespace {

const double kHalf = 20.0 * std::numbers::pi;

Trajectory evolved(const WaveField& f, double g, PotentialSpec u, double dt, std::size_t steps,
                   std::size_t stride) {
    EvolveParams p;
    p.g = g;
    p.potential = std::move(u);
    p.time_grid = TimeGrid::make(0.0, dt, steps);
    p.store_stride = stride;
    return evolve(f, p);
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// t in [0, 1] with 11 stored snapshots.
Trajectory oscillator_trajectory(int level, std::size_t substeps = 100) {
    const auto g = SpatialGrid::make(128, -12.0, 12.0);
    return evolved(hermite_eigenstate(level, g).field, 0.0, PotentialSpec::harmonic(1.0),
                   0.1 / static_cast<double>(substeps), 10 * substeps + 1, substeps);
}

} // namespace

TEST_CASE("pure density matrix") {
    const auto g = SpatialGrid::make(128, -12.0, 12.0);
    const auto phi0 = hermite_eigenstate(0, g).field;
    const auto rho = pure_rho(phi0);
    for (std::size_t i = 0; i < g.n(); ++i) {
        CHECK(rho.values(i, i) == cplx(std::norm(phi0[i]), 0.0));
    }
    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    CHECK(std::abs(rho.purity() - 1.0) < 1e-8);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::vector<cplx> v(g.n());
    for (auto& z : v) z = {nd(rng), nd(rng)};
    const WaveField f(g, v);
    const auto r = pure_rho(f);
    for (std::size_t i = 0; i < g.n(); ++i) {
        for (std::size_t j = 0; j < g.n(); ++j) CHECK(r.values(i, j) == std::conj(r.values(j, i)));
    }
    CHECK(r.hermiticity_defect() == 0.0);
    CHECK(r.trace().real() == doctest::Approx(norm(f)).epsilon(1e-13));
}

TEST_CASE("equal-time generalized matrix is bit-identical to rho") {
    const auto hg = SpatialGrid::make(512, -kHalf, kHalf);
    const std::vector<Trajectory> trajectories = {
        oscillator_trajectory(0),
        oscillator_trajectory(3),
        evolved(bright_soliton(1.0, 0.0, 0.5, -1.0, hg).field, -1.0, PotentialSpec::zero(), 1e-3, 101,
                10),
        evolved(gaussian_packet(1.0, -0.7, 1.2, SpatialGrid::make(64, -10.0, 10.0)), 0.0,
                PotentialSpec::zero(), 1e-2, 21, 2),
    };
    for (const auto& tr : trajectories) {
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const auto r = generalized_R(tr, k, k);
            const auto rho = pure_rho(tr.snapshots[k]);
            CHECK((r.values.array() == rho.values.array()).all());
            CHECK(r.t == r.t_prime);
        }
    }
}

TEST_CASE("exchange symmetry of the generalized matrix") {
    const auto g = SpatialGrid::make(64, -10.0, 10.0);
    const auto tr = evolved(gaussian_packet(1.0, -0.7, 1.2, g), 0.0, PotentialSpec::zero(), 1e-2, 21, 2);
    for (std::size_t k = 0; k < tr.size(); k += 3) {
        for (std::size_t l = 0; l < tr.size(); l += 4) {
            const auto a = generalized_R(tr, k, l);
            const auto b = generalized_R(tr, l, k);
            CHECK((a.values.array() == b.values.adjoint().array()).all());
            CHECK(a.t == tr.time_grid.time(k));
            CHECK(a.t_prime == tr.time_grid.time(l));
        }
    }
    CHECK_THROWS_AS(generalized_R(tr, 0, tr.size()), Error);
    CHECK_THROWS_AS(generalized_R(tr, tr.size(), 0), Error);
}

TEST_CASE("generalized matrix of a pure state has rank one") {
    const auto g = SpatialGrid::make(128, -10.0, 10.0);
    const auto tr = evolved(gaussian_packet(-1.0, 1.0, 0.9, g), 0.0, PotentialSpec::harmonic(1.0), 1e-2,
                            101, 10);
    for (auto [k, l] : {std::pair{0, 10}, {3, 7}, {5, 5}}) {
        CHECK(dominant_singular_fraction(generalized_R(tr, k, l).values) > 1.0 - 1e-10);
    }
}

TEST_CASE("stationary generalized matrix") {
    const auto g = SpatialGrid::make(128, -12.0, 12.0);
    const auto s0 = hermite_eigenstate(0, g);
    const auto eq = stationary_R(s0, 0.7, 0.7);
    CHECK((eq.values.array() == pure_rho(s0.field).values.array()).all());

    const auto period = stationary_R(s0, 2.0 * std::numbers::pi / 0.5, 0.0);
    CHECK(max_diff(period.values, pure_rho(s0.field).values) < 1e-14);

    const auto hg = SpatialGrid::make(512, -kHalf, kHalf);
    const auto sol = bright_soliton(1.0, 0.0, 0.0, -1.0, hg);
    const auto rs = stationary_R(sol, 1.0, 0.0);
    const auto ref = pure_rho(sol.field).values * std::polar(1.0, 0.5);
    CHECK(max_diff(rs.values, ref) < 1e-15);

    const auto one = stationary_R(s0, 1.0, 0.0);
    CHECK(max_diff(one.values, pure_rho(s0.field).values * std::polar(1.0, -0.5)) < 1e-15);
}

TEST_CASE("evolved oscillator state matches the stationary form") {
    const auto tr = oscillator_trajectory(0);
    const auto s0 = hermite_eigenstate(0, tr.grid);
    const auto r = generalized_R(tr, 10, 0);
    CHECK(max_diff(r.values, stationary_R(s0, 1.0, 0.0).values) < 1e-5);

    for (std::size_t k = 0; k < tr.size(); k += 2) {
        for (std::size_t l = 1; l < tr.size(); l += 2) {
            const auto a = generalized_R(tr, k, l);
            const auto b = stationary_R(s0, a.t, a.t_prime);
            CHECK(max_diff(a.values, b.values) < 1e-5);
        }
    }
}

TEST_CASE("mixtures") {
    const auto t0 = oscillator_trajectory(0);
    const auto t1 = oscillator_trajectory(1);
    const MixtureSpec mix{{0.6, 0.4}, {t0, t1}};
    mix.validate();

    const MixtureSpec single{{1.0}, {t0}};
    CHECK((mixture_rho(single, 4).values.array() == pure_rho(t0.snapshots[4]).values.array()).all());
    CHECK((mixture_R(single, 2, 7).values.array() == generalized_R(t0, 2, 7).values.array()).all());

    for (std::size_t k = 0; k < mix.steps(); ++k) {
        const auto rho = mixture_rho(mix, k);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
        CHECK(std::abs(rho.purity() - 0.52) < 1e-8);
        CHECK((mixture_R(mix, k, k).values.array() == rho.values.array()).all());
    }

    // The splitting error makes each component breathe at O(dt^2); dt = 2.5e-4
    // brings that below the tolerance.
    const MixtureSpec fine{{0.6, 0.4}, {oscillator_trajectory(0, 400), oscillator_trajectory(1, 400)}};
    CHECK(max_diff(mixture_rho(fine, 0).values, mixture_rho(fine, fine.steps() - 1).values) < 1e-8);

    // per-component stationary form
    const MixtureSpec half{{0.5, 0.5}, {t0, t1}};
    const auto s0 = hermite_eigenstate(0, t0.grid);
    const auto s1 = hermite_eigenstate(1, t0.grid);
    const auto r = mixture_R(half, 10, 0);
    const ComplexMatrix expected =
        0.5 * stationary_R(s0, 1.0, 0.0).values + 0.5 * stationary_R(s1, 1.0, 0.0).values;
    CHECK(max_diff(r.values, expected) < 1e-5);
}

TEST_CASE("mixture density matrices are positive semidefinite") {
    const MixtureSpec mix{{0.3, 0.5, 0.2},
                          {oscillator_trajectory(0), oscillator_trajectory(1), oscillator_trajectory(2)}};
    const auto rho = mixture_rho(mix, 3);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    const auto n = static_cast<Eigen::Index>(mix.grid().n());
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = {nd(rng), nd(rng)};
        const cplx q = v.dot(rho.values * v);
        CHECK(q.real() >= -1e-12);
        CHECK(std::abs(q.imag()) < 1e-10 * std::max(1.0, q.real()));
    }
}

TEST_CASE("mixture validation") {
    const auto t0 = oscillator_trajectory(0);
    const auto t1 = oscillator_trajectory(1);
    CHECK_THROWS_AS((MixtureSpec{{0.6, 0.5}, {t0, t1}}.validate()), Error);
    CHECK_THROWS_AS((MixtureSpec{{1.2, -0.2}, {t0, t1}}.validate()), Error);
    CHECK_THROWS_AS((MixtureSpec{{0.5}, {t0, t1}}.validate()), Error);
    CHECK_THROWS_AS((MixtureSpec{{}, {}}.validate()), Error);
    CHECK_NOTHROW((MixtureSpec{{0.6, 0.4 + 1e-13}, {t0, t1}}.validate()));

    const auto other = evolved(hermite_eigenstate(1, SpatialGrid::make(128, -10.0, 10.0)).field, 0.0,
                               PotentialSpec::harmonic(1.0), 1e-3, 1001, 100);
    try {
        MixtureSpec{{0.5, 0.5}, {t0, other}}.validate();
        FAIL("expected a grid mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GridMismatch);
    }

    auto scaled = t1;
    for (auto& s : scaled.snapshots) s = s.scaled(2.0);
    CHECK_THROWS_AS((MixtureSpec{{0.5, 0.5}, {t0, scaled}}.validate()), Error);
    CHECK_NOTHROW((MixtureSpec{{0.5, 0.5}, {t0, scaled}}.validate(false)));
}
