#include "gpden/residual.hpp"

#include <cmath>

namespace gpden {

const char* equation_id(Equation eq) {
    switch (eq) {
    case Equation::VonNeumann: return "eq4";
    case Equation::GeneralizedLinear: return "eq9";
    case Equation::GeneralizedGpe: return "eq16";
    }
    return "unknown";
}

Equation parse_equation(const std::string& id) {
    if (id == "eq4") return Equation::VonNeumann;
    if (id == "eq9") return Equation::GeneralizedLinear;
    if (id == "eq16") return Equation::GeneralizedGpe;
    throw Error(ErrorKind::InvalidArgument, "unknown equation id '" + id + "'");
}

namespace {

// Weighted set of pure trajectories; a lone trajectory has weight 1.
struct Source {
    std::vector<const Trajectory*> components;
    std::vector<double> weights;

    const Trajectory& first() const { return *components.front(); }
    std::size_t steps() const { return first().size(); }

    ComplexMatrix R(std::size_t k, std::size_t l) const {
        ComplexMatrix acc = outer_product(components[0]->snapshots[k].values(),
                                          components[0]->snapshots[l].values());
        if (components.size() == 1 && weights[0] == 1.0) return acc;
        acc *= weights[0];
        for (std::size_t c = 1; c < components.size(); ++c) {
            acc += weights[c] * outer_product(components[c]->snapshots[k].values(),
                                              components[c]->snapshots[l].values());
        }
        return acc;
    }

    // R(x, x, t_k, t_k)
    std::vector<double> diagonal(std::size_t k) const {
        std::vector<double> d(first().grid.n(), 0.0);
        for (std::size_t c = 0; c < components.size(); ++c) {
            const auto v = components[c]->snapshots[k].values();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += weights[c] * std::norm(v[i]);
        }
        return d;
    }

    bool linear() const {
        for (const auto* c : components) {
            if (c->g != 0.0) return false;
        }
        return true;
    }
};

Source single(const Trajectory& traj) {
    traj.validate();
    return {{&traj}, {1.0}};
}

Source mixture(const MixtureSpec& spec, bool require_unit_norm = true) {
    spec.validate(require_unit_norm);
    Source s;
    for (const auto& c : spec.components) s.components.push_back(&c);
    s.weights = spec.weights;
    return s;
}

void require_interior(std::size_t idx, std::size_t steps, const char* name) {
    if (steps < 3 || idx == 0 || idx + 1 >= steps) {
        throw Error(ErrorKind::InvalidArgument,
                    std::string("central time stencil needs an interior ") + name +
                        " index, got " + std::to_string(idx) + " of " + std::to_string(steps));
    }
}

void require_linear(const Source& s, Equation eq) {
    if (!s.linear()) {
        throw Error(ErrorKind::InvalidArgument,
                    std::string(equation_id(eq)) +
                        " governs linear dynamics only; source was generated with g != 0");
    }
}

// -1/2 (d_x^2 - d_x'^2) applied with spectral derivatives along both indices,
// returned as +1/2 (d_x^2 - d_x'^2) M.
ComplexMatrix kinetic_term(const SpatialGrid& grid, const ComplexMatrix& m) {
    const auto n = static_cast<Eigen::Index>(grid.n());
    ComplexMatrix along_x(n, n);
    std::vector<cplx> col(grid.n());
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) col[i] = m(i, j);
        second_derivative_inplace(grid, col);
        for (Eigen::Index i = 0; i < n; ++i) along_x(i, j) = col[i];
    }
    ComplexMatrix along_xp = m;
    for (Eigen::Index i = 0; i < n; ++i) {
        second_derivative_inplace(grid, std::span<cplx>(along_xp.row(i).data(), grid.n()));
    }
    return 0.5 * (along_x - along_xp);
}

ComplexMatrix potential_term(const std::vector<double>& u, const ComplexMatrix& m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = (u[i] - u[j]) * m(i, j);
    }
    return out;
}

ResidualReport summarize(Equation eq, const SpatialGrid& grid, const ComplexMatrix& d,
                         double t, std::optional<double> t_prime, double dt_sample) {
    ResidualReport r{eq, 0.0, 0.0, t, t_prime, grid.n(), dt_sample, 0, 0};
    double sum = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            const double a = std::abs(d(i, j));
            sum += a * a;
            if (a > r.max_abs) {
                r.max_abs = a;
                r.argmax_i = static_cast<std::size_t>(i);
                r.argmax_j = static_cast<std::size_t>(j);
            }
        }
    }
    r.l2 = std::sqrt(sum * grid.dx() * grid.dx());
    return r;
}

ResidualReport equal_time_defect(const Source& s, const PotentialSpec& potential, std::size_t k) {
    require_linear(s, Equation::VonNeumann);
    require_interior(k, s.steps(), "time");
    const auto& grid = s.first().grid;
    const double dt = s.first().time_grid.dt();
    const auto u = evaluate_potential(potential, grid);
    const cplx i_over_2dt(0.0, 1.0 / (2.0 * dt));

    const ComplexMatrix rho = s.R(k, k);
    ComplexMatrix d = i_over_2dt * (s.R(k + 1, k + 1) - s.R(k - 1, k - 1));
    d += kinetic_term(grid, rho);
    d -= potential_term(u, rho);
    return summarize(Equation::VonNeumann, grid, d, s.first().time_grid.time(k), std::nullopt,
                     dt);
}

ResidualReport two_time_defect(const Source& s, const PotentialSpec& potential, double g,
                               std::size_t k, std::size_t l, Equation eq) {
    require_interior(k, s.steps(), "t");
    require_interior(l, s.steps(), "t_prime");
    const auto& grid = s.first().grid;
    const auto& tg = s.first().time_grid;
    const double dt = tg.dt();
    const auto u = evaluate_potential(potential, grid);
    const cplx i_over_2dt(0.0, 1.0 / (2.0 * dt));

    const ComplexMatrix r = s.R(k, l);
    ComplexMatrix d = i_over_2dt * (s.R(k + 1, l) - s.R(k - 1, l));
    d += i_over_2dt * (s.R(k, l + 1) - s.R(k, l - 1));
    d += kinetic_term(grid, r);
    d -= potential_term(u, r);

    if (eq == Equation::GeneralizedGpe) {
        const auto diag_t = s.diagonal(k);
        const auto diag_tp = s.diagonal(l);
        for (Eigen::Index i = 0; i < d.rows(); ++i) {
            for (Eigen::Index j = 0; j < d.cols(); ++j) {
                d(i, j) -= g * r(i, j) * (diag_t[i] - diag_tp[j]);
            }
        }
    }
    return summarize(eq, grid, d, tg.time(k), tg.time(l), dt);
}

} // namespace

ResidualReport von_neumann_residual(const Trajectory& traj, const PotentialSpec& potential,
                                    std::size_t k) {
    return equal_time_defect(single(traj), potential, k);
}

ResidualReport von_neumann_residual(const MixtureSpec& spec, const PotentialSpec& potential,
                                    std::size_t k) {
    return equal_time_defect(mixture(spec), potential, k);
}

ResidualReport generalized_linear_residual(const Trajectory& traj, const PotentialSpec& potential,
                                           std::size_t k, std::size_t l) {
    const Source s = single(traj);
    require_linear(s, Equation::GeneralizedLinear);
    return two_time_defect(s, potential, 0.0, k, l, Equation::GeneralizedLinear);
}

ResidualReport generalized_linear_residual(const MixtureSpec& spec,
                                           const PotentialSpec& potential, std::size_t k,
                                           std::size_t l) {
    const Source s = mixture(spec);
    require_linear(s, Equation::GeneralizedLinear);
    return two_time_defect(s, potential, 0.0, k, l, Equation::GeneralizedLinear);
}

ResidualReport gpe_generalized_residual(const Trajectory& traj, const PotentialSpec& potential,
                                        double g, std::size_t k, std::size_t l) {
    return two_time_defect(single(traj), potential, g, k, l, Equation::GeneralizedGpe);
}

ResidualReport gpe_generalized_residual(const MixtureSpec&, const PotentialSpec&, double,
                                        std::size_t, std::size_t) {
    throw Error(ErrorKind::InvalidArgument,
                "eq16 holds for pure states only: the bracket R(x,x,t,t) - R(x',x',t',t') of a "
                "mixture is not the weighted sum of its components' brackets, so the equation "
                "does not close on convex sums; use gpe_mixture_defect_diagnostic to measure "
                "the defect");
}

ResidualReport gpe_mixture_defect_diagnostic(const MixtureSpec& spec,
                                             const PotentialSpec& potential, double g,
                                             std::size_t k, std::size_t l) {
    return two_time_defect(mixture(spec, false), potential, g, k, l, Equation::GeneralizedGpe);
}

std::vector<std::size_t> interior_indices(std::size_t steps, std::size_t count) {
    if (steps < 3) {
        throw Error(ErrorKind::InvalidArgument, "need at least 3 snapshots for interior indices");
    }
    if (count == 0) return {};
    const std::size_t lo = 1, hi = steps - 2;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
        const auto idx = lo + static_cast<std::size_t>(std::llround(f * static_cast<double>(hi - lo)));
        if (out.empty() || out.back() != idx) out.push_back(idx);
    }
    return out;
}

ConvergenceReport ConvergenceReport::from_levels(Equation eq, std::vector<ConvergenceLevel> levels) {
    if (levels.size() < 3) {
        throw Error(ErrorKind::InvalidArgument, "convergence study needs at least 3 levels");
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i].dt_sample < levels[i - 1].dt_sample)) {
            throw Error(ErrorKind::InvalidArgument,
                        "convergence levels must be sorted by decreasing dt_sample");
        }
    }
    ConvergenceReport rep{eq, std::move(levels), {}, 0.0, false};
    double sum = 0.0;
    for (std::size_t i = 1; i < rep.levels.size(); ++i) {
        const auto& coarse = rep.levels[i - 1];
        const auto& fine = rep.levels[i];
        const double order = std::log(coarse.max_abs / fine.max_abs) /
                             std::log(coarse.dt_sample / fine.dt_sample);
        rep.pair_orders.push_back(order);
        sum += order;
        if (!(std::abs(coarse.max_abs - fine.max_abs) >= 0.1 * coarse.max_abs)) rep.at_floor = true;
    }
    if (rep.levels.back().max_abs < 1e-10) rep.at_floor = true;
    rep.estimated_order = sum / static_cast<double>(rep.pair_orders.size());
    return rep;
}

ConvergenceReport convergence_order(
    Equation eq, std::size_t refinement_levels,
    const std::function<ConvergenceLevel(std::size_t level)>& residual_at) {
    if (refinement_levels < 3) {
        throw Error(ErrorKind::InvalidArgument, "refinement_levels must be >= 3");
    }
    std::vector<ConvergenceLevel> levels;
    for (std::size_t level = 0; level < refinement_levels; ++level) {
        levels.push_back(residual_at(level));
    }
    return ConvergenceReport::from_levels(eq, std::move(levels));
}

} // namespace gpden
