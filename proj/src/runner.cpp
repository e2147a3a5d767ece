#include "gpden/runner.hpp"

#include <fftw3.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "gpden/io.hpp"

namespace gpden {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json versions() {
    return {{"gpden", kVersion},
            {"fftw", std::string(fftw_version)},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"compiler", __VERSION__}};
}

class OutputSet {
public:
    OutputSet(fs::path dir, json config) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw Error(ErrorKind::Io, "cannot create output directory '" + dir_.string() + "'",
                        "output.directory");
        }
        manifest_.config = std::move(config);
        manifest_.started = utc_now();
        manifest_.versions = versions();
        manifest_.directory = dir_;
    }

    fs::path path(const std::string& name) {
        names_.push_back(name);
        return dir_ / name;
    }

    RunManifest finish() {
        for (const auto& name : names_) {
            const fs::path p = dir_ / name;
            manifest_.outputs.push_back({name, io::sha256_file(p), fs::file_size(p)});
        }
        manifest_.finished = utc_now();
        const fs::path mpath = dir_ / "manifest.json";
        std::ofstream out(mpath, std::ios::trunc);
        out << manifest_.to_json().dump(2) << '\n';
        if (!out) throw Error(ErrorKind::Io, "cannot write '" + mpath.string() + "'");
        return manifest_;
    }

private:
    fs::path dir_;
    std::vector<std::string> names_;
    RunManifest manifest_;
};

void write_reports(OutputSet& out, const ScenarioConfig& cfg,
                   const std::vector<ResidualReport>& reports) {
    if (cfg.write_csv) io::write_residuals_csv(out.path("residuals.csv"), reports);
    if (cfg.write_json) io::write_residuals_json(out.path("residuals.json"), reports);
}

std::vector<ResidualReport> all_residuals(const ScenarioConfig& cfg, const ScenarioSource& src) {
    std::vector<ResidualReport> reports;
    for (Equation eq : cfg.equations) {
        auto r = sample_residuals(cfg, src, eq);
        reports.insert(reports.end(), r.begin(), r.end());
    }
    return reports;
}

void write_observables(const fs::path& path, const ScenarioConfig& cfg,
                       const ScenarioSource& src) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "component,t,norm,energy,chemical_potential\n";
    for (std::size_t c = 0; c < src.components.size(); ++c) {
        for (const auto& s : src.components[c].snapshots) {
            out << c << ',' << io::format_double(s.time_tag()) << ','
                << io::format_double(norm(s)) << ','
                << io::format_double(energy(s, cfg.potential, cfg.g)) << ','
                << io::format_double(chemical_potential(s, cfg.potential, cfg.g)) << '\n';
        }
    }
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
}

void write_heatmaps(OutputSet& out, const ScenarioConfig& cfg, const ScenarioSource& src) {
    const std::size_t steps = src.components.front().size();
    if (steps < 3) return;
    const auto idx = interior_indices(steps, cfg.pairs);
    const std::size_t k = idx.front(), l = idx.back();
    const MixtureSpec spec = src.as_mixture();
    auto matrix = [&](std::size_t a, std::size_t b) {
        if (!src.mixture) return generalized_R(src.components.front(), a, b);
        GeneralizedDensityMatrix m{spec.grid(), {}, 0.0, 0.0};
        const auto& tg = spec.components.front().time_grid;
        m.t = tg.time(a);
        m.t_prime = tg.time(b);
        m.values = ComplexMatrix::Zero(static_cast<Eigen::Index>(spec.grid().n()),
                                       static_cast<Eigen::Index>(spec.grid().n()));
        for (std::size_t c = 0; c < spec.components.size(); ++c) {
            m.values += spec.weights[c] * outer_product(spec.components[c].snapshots[a].values(),
                                                        spec.components[c].snapshots[b].values());
        }
        return m;
    };
    const auto r = matrix(k, l);
    const auto rho = matrix(k, k);
    if (cfg.write_csv) {
        io::write_matrix_csv(out.path("heatmap_R.csv"), r);
        io::write_matrix_csv(out.path("heatmap_rho.csv"), rho);
    }
    if (cfg.write_json) {
        io::write_matrix_json(out.path("heatmap_R.json"), r);
        io::write_matrix_json(out.path("heatmap_rho.json"), rho);
    }
}

} // namespace

json RunManifest::to_json() const {
    auto outs = json::array();
    for (const auto& o : outputs) {
        outs.push_back({{"file", o.file}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    }
    return {{"config", config},
            {"started", started},
            {"finished", finished},
            {"versions", versions},
            {"outputs", outs}};
}

fs::path resolve_output_directory(const std::string& configured) {
    fs::path p(configured);
    if (p.is_relative()) {
        if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / p;
    }
    return p;
}

RunManifest run(const ScenarioConfig& cfg) {
    OutputSet out(resolve_output_directory(cfg.output_directory), cfg.echo);
    const ScenarioSource src = build_source(cfg);

    write_reports(out, cfg, all_residuals(cfg, src));

    if (cfg.refinement_levels >= 3) {
        std::vector<ConvergenceReport> conv;
        for (Equation eq : cfg.equations) {
            conv.push_back(convergence_for(cfg, eq, cfg.refinement_levels));
        }
        io::write_convergence_json(out.path("convergence.json"), conv);
    }

    write_observables(out.path("observables.csv"), cfg, src);
    if (src.components.size() == 1) {
        io::write_trajectory(out.path("trajectory.dump"), src.components.front());
    } else {
        for (std::size_t c = 0; c < src.components.size(); ++c) {
            io::write_trajectory(out.path("trajectory_" + std::to_string(c) + ".dump"),
                                 src.components[c]);
        }
    }
    write_heatmaps(out, cfg, src);
    return out.finish();
}

RunManifest verify(const ScenarioConfig& cfg) {
    if (cfg.input_trajectories.empty()) {
        throw Error(ErrorKind::Config, "verify needs at least one trajectory dump",
                    "input.trajectories");
    }
    OutputSet out(resolve_output_directory(cfg.output_directory), cfg.echo);
    ScenarioSource src;
    for (const auto& p : cfg.input_trajectories) {
        src.components.push_back(io::read_trajectory(p, cfg.potential.id()));
    }
    const std::size_t count = src.components.size();
    src.weights = cfg.input_weights.empty()
                      ? std::vector<double>(count, 1.0 / static_cast<double>(count))
                      : cfg.input_weights;
    src.mixture = count > 1;

    // The sampling rule uses the dump's own time grid.
    ScenarioConfig local = cfg;
    const auto& tg = src.components.front().time_grid;
    local.t0 = tg.t0();
    local.dt = tg.dt();
    local.steps = tg.steps();
    local.store_stride = 1;
    local.g = src.components.front().g;
    for (Equation eq : local.equations) {
        if (eq != Equation::GeneralizedGpe && local.g != 0.0) {
            throw Error(ErrorKind::Config,
                        std::string(equation_id(eq)) + " requested for a g != 0 trajectory",
                        "verify.equations");
        }
    }
    write_reports(out, local, all_residuals(local, src));
    return out.finish();
}

} // namespace gpden
