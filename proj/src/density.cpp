#include "gpden/density.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace gpden {

cplx DensityMatrix::trace() const {
    return values.diagonal().sum() * grid.dx();
}

double DensityMatrix::purity() const {
    return values.squaredNorm() * grid.dx() * grid.dx();
}

double DensityMatrix::hermiticity_defect() const {
    return (values - values.adjoint()).cwiseAbs().maxCoeff();
}

void MixtureSpec::validate(bool require_unit_norm) const {
    if (weights.empty() || weights.size() != components.size()) {
        throw Error(ErrorKind::InvalidArgument, "mixture needs one weight per component");
    }
    double sum = 0.0;
    for (double p : weights) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "mixture weights must lie in [0, 1]");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw Error(ErrorKind::InvalidArgument, "mixture weights must sum to 1");
    }
    const Trajectory& first = components.front();
    for (const auto& c : components) {
        c.validate();
        require_same_grid(first.grid, c.grid, "mixture component");
        if (c.time_grid.steps() != first.time_grid.steps() ||
            c.time_grid.dt() != first.time_grid.dt() ||
            c.time_grid.t0() != first.time_grid.t0()) {
            throw Error(ErrorKind::GridMismatch, "mixture components use different time grids");
        }
        if (!require_unit_norm) continue;
        for (const auto& s : c.snapshots) {
            double n2 = 0.0;
            for (const auto& z : s.values()) n2 += std::norm(z);
            n2 *= s.grid().dx();
            if (std::abs(n2 - 1.0) > 1e-8) {
                throw Error(ErrorKind::InvalidArgument,
                            "mixture component snapshot is not unit-norm");
            }
        }
    }
}

std::size_t MixtureSpec::steps() const { return components.front().time_grid.steps(); }
const SpatialGrid& MixtureSpec::grid() const { return components.front().grid; }

ComplexMatrix outer_product(std::span<const cplx> a, std::span<const cplx> b) {
    const auto rows = static_cast<Eigen::Index>(a.size());
    const auto cols = static_cast<Eigen::Index>(b.size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double br = b[j].real(), bi = b[j].imag();
            m(i, j) = cplx(ar * br + ai * bi, ai * br - ar * bi);
        }
    }
    return m;
}

namespace {

void check_index(std::size_t idx, std::size_t steps, const char* name) {
    if (idx >= steps) {
        throw Error(ErrorKind::InvalidArgument, std::string(name) + " index " +
                                                    std::to_string(idx) + " out of range [0, " +
                                                    std::to_string(steps) + ")");
    }
}

ComplexMatrix weighted_sum(const MixtureSpec& spec, std::size_t k, std::size_t l) {
    spec.validate();
    check_index(k, spec.steps(), "time");
    check_index(l, spec.steps(), "time");
    const std::size_t n = spec.grid().n();
    ComplexMatrix acc = ComplexMatrix::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
        const auto& tr = spec.components[c];
        acc += spec.weights[c] * outer_product(tr.snapshots[k].values(), tr.snapshots[l].values());
    }
    return acc;
}

} // namespace

DensityMatrix pure_rho(const WaveField& f) {
    return {f.grid(), outer_product(f.values(), f.values()), f.time_tag(), Purity::Pure};
}

DensityMatrix mixture_rho(const MixtureSpec& spec, std::size_t k) {
    const double t = spec.components.front().time_grid.time(k);
    const Purity hint = spec.components.size() == 1 ? Purity::Pure : Purity::Mixed;
    return {spec.grid(), weighted_sum(spec, k, k), t, hint};
}

GeneralizedDensityMatrix generalized_R(const Trajectory& traj, std::size_t k, std::size_t l) {
    check_index(k, traj.size(), "t");
    check_index(l, traj.size(), "t_prime");
    return {traj.grid, outer_product(traj.snapshots[k].values(), traj.snapshots[l].values()),
            traj.time_grid.time(k), traj.time_grid.time(l)};
}

GeneralizedDensityMatrix mixture_R(const MixtureSpec& spec, std::size_t k, std::size_t l) {
    const auto& tg = spec.components.front().time_grid;
    return {spec.grid(), weighted_sum(spec, k, l), tg.time(k), tg.time(l)};
}

GeneralizedDensityMatrix stationary_R(const StationaryState& state, double t, double t_prime) {
    const auto v = state.field.values();
    ComplexMatrix m = outer_product(v, v);
    if (t != t_prime) m *= std::polar(1.0, -state.energy * (t - t_prime));
    return {state.field.grid(), std::move(m), t, t_prime};
}

double dominant_singular_fraction(const ComplexMatrix& m) {
    const double frob2 = m.squaredNorm();
    if (frob2 == 0.0) return 1.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    const double s0 = svd.singularValues()(0);
    return s0 * s0 / frob2;
}

} // namespace gpden
