#include "gpden/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace gpden {

using nlohmann::json;

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> catalog = {
        {"free_gaussian", "free Gaussian packet, linear Schroedinger equation with U = 0",
         {"eq4", "eq9"}},
        {"harmonic_eigenstate", "oscillator eigenstate phi_n (stationary, phase exp(-i E t))",
         {"eq4", "eq9"}},
        {"harmonic_mixture", "convex mixture of oscillator eigenstates (0.6 phi_0 + 0.4 phi_1)",
         {"eq4", "eq9"}},
        {"gpe_soliton", "bright soliton of the attractive cubic equation (C, v)", {"eq16"}},
        {"gpe_trap_ground", "imaginary-time ground state of the repulsive GPE in a harmonic trap",
         {"eq16"}},
        {"mixture_nonclosure",
         "equal mixture of solitons C = 1 and C = 1.5; the nonlinear two-time defect stays finite",
         {"eq16"}},
    };
    return catalog;
}

namespace {

json base_defaults() {
    return {
        {"scenario", "custom"},
        {"grid", {{"n", 256}, {"x_min", -16.0}, {"x_max", 16.0}}},
        {"time", {{"t0", 0.0}, {"dt", 1e-3}, {"steps", 401}, {"store_stride", 10}}},
        {"physics",
         {{"g", 0.0},
          {"potential", {{"kind", "zero"}}},
          {"initial", {{"kind", "gaussian"}, {"x0", 0.0}, {"p0", 0.0}, {"width", 1.0}}},
          {"sampling", "evolve"}}},
        {"verify",
         {{"equations", json::array({"eq4", "eq9"})},
          {"pairs", 5},
          {"refinement_levels", 0},
          {"mixture_diagnostic", false}}},
        {"input", {{"trajectories", json::array()}, {"weights", json::array()}}},
        {"output", {{"directory", "out"}, {"formats", json::array({"csv"})}}},
    };
}

const double kSolitonHalfWidth = 20.0 * std::numbers::pi;

} // namespace

json scenario_defaults(const std::string& scenario) {
    json d = base_defaults();
    d["scenario"] = scenario;
    if (scenario == "custom") return d;
    if (scenario == "free_gaussian") {
        d["physics"]["initial"] = {{"kind", "gaussian"}, {"x0", 0.0}, {"p0", 0.5}, {"width", 1.5}};
        d["physics"]["sampling"] = "analytic";
        d["verify"]["refinement_levels"] = 3;
        return d;
    }
    if (scenario == "harmonic_eigenstate") {
        d["time"]["steps"] = 1001;
        d["physics"]["potential"] = {{"kind", "harmonic"}, {"omega", 1.0}};
        d["physics"]["initial"] = {{"kind", "hermite"}, {"level", 0}};
        return d;
    }
    if (scenario == "harmonic_mixture") {
        d["time"]["steps"] = 1001;
        d["physics"]["potential"] = {{"kind", "harmonic"}, {"omega", 1.0}};
        d["physics"]["initial"] = {{"kind", "hermite_mixture"},
                                   {"levels", {0, 1}},
                                   {"weights", {0.6, 0.4}}};
        return d;
    }
    if (scenario == "gpe_soliton") {
        d["grid"] = {{"n", 512}, {"x_min", -kSolitonHalfWidth}, {"x_max", kSolitonHalfWidth}};
        d["physics"]["g"] = -1.0;
        d["physics"]["initial"] = {
            {"kind", "soliton"}, {"amplitude", 1.0}, {"x0", 0.0}, {"velocity", 0.5}};
        d["verify"]["equations"] = {"eq16"};
        d["verify"]["refinement_levels"] = 3;
        return d;
    }
    if (scenario == "gpe_trap_ground") {
        d["physics"]["g"] = 1.0;
        d["physics"]["potential"] = {{"kind", "harmonic"}, {"omega", 1.0}};
        d["physics"]["initial"] = {{"kind", "ground"},
                                   {"target_norm", 1.0},
                                   {"dtau", 1e-3},
                                   {"tol", 1e-6},
                                   {"max_iter", 200000}};
        d["verify"]["equations"] = {"eq16"};
        return d;
    }
    if (scenario == "mixture_nonclosure") {
        d["grid"] = {{"n", 512}, {"x_min", -kSolitonHalfWidth}, {"x_max", kSolitonHalfWidth}};
        d["time"]["steps"] = 201;
        d["physics"]["g"] = -1.0;
        d["physics"]["initial"] = {{"kind", "soliton_mixture"},
                                   {"amplitudes", {1.0, 1.5}},
                                   {"weights", {0.5, 0.5}},
                                   {"x0", 0.0},
                                   {"velocity", 0.0}};
        d["physics"]["sampling"] = "analytic";
        d["verify"]["equations"] = {"eq16"};
        d["verify"]["refinement_levels"] = 3;
        d["verify"]["mixture_diagnostic"] = true;
        return d;
    }
    throw Error(ErrorKind::Config, "unknown scenario '" + scenario + "'", "scenario");
}

namespace {

json parse_set_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

json::json_pointer pointer_for(const std::string& dotted) {
    std::string p;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        const auto dot = dotted.find('.', start);
        const auto part = dotted.substr(start, dot == std::string::npos ? std::string::npos
                                                                         : dot - start);
        if (part.empty()) throw Error(ErrorKind::Config, "empty path segment in --set", dotted);
        p += "/" + part;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return json::json_pointer(p);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw Error(ErrorKind::Config, "expected an object", path);
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw Error(ErrorKind::Config, "unknown configuration key",
                        path.empty() ? key : path + "." + key);
        }
    }
}

const json& at(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw Error(ErrorKind::Config, "missing field", path + "." + key);
    return obj.at(key);
}

double get_double(const json& obj, const std::string& key, const std::string& path) {
    const json& v = at(obj, key, path);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
        throw Error(ErrorKind::Config, "expected a finite number", path + "." + key);
    }
    return v.get<double>();
}

long long get_int(const json& obj, const std::string& key, const std::string& path) {
    const json& v = at(obj, key, path);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d) return static_cast<long long>(d);
    }
    throw Error(ErrorKind::Config, "expected an integer", path + "." + key);
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& path,
                      long long min_value) {
    const long long v = get_int(obj, key, path);
    if (v < min_value) {
        throw Error(ErrorKind::Config, "must be >= " + std::to_string(min_value),
                    path + "." + key);
    }
    return static_cast<std::size_t>(v);
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = at(obj, key, path);
    if (!v.is_string()) throw Error(ErrorKind::Config, "expected a string", path + "." + key);
    return v.get<std::string>();
}

template <typename T>
std::vector<T> get_array(const json& obj, const std::string& key, const std::string& path) {
    const json& v = at(obj, key, path);
    if (!v.is_array()) throw Error(ErrorKind::Config, "expected an array", path + "." + key);
    try {
        return v.get<std::vector<T>>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::Config, "array has entries of the wrong type", path + "." + key);
    }
}

// Runs a library constructor, converting its validation error into a config
// error at `field`.
template <typename F>
auto as_config(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        throw Error(ErrorKind::Config, e.what(), field);
    }
}

PotentialSpec parse_potential(const json& p, std::size_t n) {
    const std::string path = "physics.potential";
    const auto kind = get_string(p, "kind", path);
    if (kind == "zero") {
        check_keys(p, path, {"kind"});
        return PotentialSpec::zero();
    }
    if (kind == "harmonic") {
        check_keys(p, path, {"kind", "omega"});
        const double omega = get_double(p, "omega", path);
        return as_config(path + ".omega", [&] { return PotentialSpec::harmonic(omega); });
    }
    if (kind == "tabulated") {
        check_keys(p, path, {"kind", "values"});
        auto values = get_array<double>(p, "values", path);
        if (values.size() != n) {
            throw Error(ErrorKind::Config, "tabulated potential length must equal grid.n",
                        path + ".values");
        }
        return as_config(path + ".values",
                         [&] { return PotentialSpec::tabulated(std::move(values)); });
    }
    throw Error(ErrorKind::Config, "unknown potential kind '" + kind + "'", path + ".kind");
}

void check_weights(const std::vector<double>& w, std::size_t count, const std::string& field) {
    if (w.size() != count) {
        throw Error(ErrorKind::Config, "need one weight per component", field);
    }
    double sum = 0.0;
    for (double p : w) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Config, "weights must lie in [0, 1]", field);
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorKind::Config, "weights must sum to 1", field);
}

InitialStateConfig parse_initial(const json& j) {
    const std::string path = "physics.initial";
    InitialStateConfig s;
    s.kind = get_string(j, "kind", path);
    if (s.kind == "gaussian") {
        check_keys(j, path, {"kind", "x0", "p0", "width"});
        s.x0 = get_double(j, "x0", path);
        s.p0 = get_double(j, "p0", path);
        s.width = get_double(j, "width", path);
        if (!(s.width > 0.0)) throw Error(ErrorKind::Config, "must be > 0", path + ".width");
    } else if (s.kind == "hermite") {
        check_keys(j, path, {"kind", "level"});
        s.level = static_cast<int>(get_count(j, "level", path, 0));
    } else if (s.kind == "soliton") {
        check_keys(j, path, {"kind", "amplitude", "x0", "velocity"});
        s.amplitude = get_double(j, "amplitude", path);
        s.x0 = get_double(j, "x0", path);
        s.velocity = get_double(j, "velocity", path);
        if (!(s.amplitude > 0.0)) throw Error(ErrorKind::Config, "must be > 0", path + ".amplitude");
    } else if (s.kind == "ground") {
        check_keys(j, path, {"kind", "target_norm", "dtau", "tol", "max_iter"});
        s.target_norm = get_double(j, "target_norm", path);
        s.dtau = get_double(j, "dtau", path);
        s.tol = get_double(j, "tol", path);
        s.max_iter = get_count(j, "max_iter", path, 1);
        if (!(s.target_norm > 0.0)) throw Error(ErrorKind::Config, "must be > 0", path + ".target_norm");
        if (!(s.dtau > 0.0)) throw Error(ErrorKind::Config, "must be > 0", path + ".dtau");
        if (!(s.tol > 0.0)) throw Error(ErrorKind::Config, "must be > 0", path + ".tol");
    } else if (s.kind == "hermite_mixture") {
        check_keys(j, path, {"kind", "levels", "weights"});
        s.levels = get_array<int>(j, "levels", path);
        s.weights = get_array<double>(j, "weights", path);
        if (s.levels.empty()) throw Error(ErrorKind::Config, "need at least one level", path + ".levels");
        for (int l : s.levels) {
            if (l < 0) throw Error(ErrorKind::Config, "levels must be >= 0", path + ".levels");
        }
        check_weights(s.weights, s.levels.size(), path + ".weights");
    } else if (s.kind == "soliton_mixture") {
        check_keys(j, path, {"kind", "amplitudes", "weights", "x0", "velocity"});
        s.amplitudes = get_array<double>(j, "amplitudes", path);
        s.weights = get_array<double>(j, "weights", path);
        s.x0 = get_double(j, "x0", path);
        s.velocity = get_double(j, "velocity", path);
        if (s.amplitudes.empty()) {
            throw Error(ErrorKind::Config, "need at least one amplitude", path + ".amplitudes");
        }
        for (double a : s.amplitudes) {
            if (!(a > 0.0)) throw Error(ErrorKind::Config, "amplitudes must be > 0", path + ".amplitudes");
        }
        check_weights(s.weights, s.amplitudes.size(), path + ".weights");
    } else {
        throw Error(ErrorKind::Config, "unknown initial state kind '" + s.kind + "'", path + ".kind");
    }
    return s;
}

} // namespace

json resolve_config(const json& user, const std::vector<std::string>& sets) {
    if (!user.is_object()) throw Error(ErrorKind::Config, "configuration must be a JSON object");
    json overrides = json::object();
    std::string scenario = user.value("scenario", std::string("custom"));
    std::vector<std::pair<json::json_pointer, json>> parsed;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(ErrorKind::Config, "--set expects key=value, got '" + s + "'");
        }
        const std::string key = s.substr(0, eq);
        json value = parse_set_value(s.substr(eq + 1));
        if (key == "scenario") {
            if (!value.is_string()) throw Error(ErrorKind::Config, "expected a string", "scenario");
            scenario = value.get<std::string>();
        }
        parsed.emplace_back(pointer_for(key), std::move(value));
    }
    json resolved = scenario_defaults(scenario);
    resolved.merge_patch(user);
    for (auto& [ptr, value] : parsed) resolved[ptr] = std::move(value);
    resolved["scenario"] = scenario;
    return resolved;
}

ScenarioConfig parse_config(const json& r) {
    check_keys(r, "", {"scenario", "grid", "time", "physics", "verify", "input", "output"});
    ScenarioConfig c;
    c.echo = r;
    c.scenario = get_string(r, "scenario", "");
    if (c.scenario != "custom") {
        const auto& cat = scenario_catalog();
        if (std::none_of(cat.begin(), cat.end(), [&](const auto& s) { return s.id == c.scenario; })) {
            throw Error(ErrorKind::Config, "unknown scenario '" + c.scenario + "'", "scenario");
        }
    }

    const json& grid = at(r, "grid", "");
    check_keys(grid, "grid", {"n", "x_min", "x_max"});
    c.n = get_count(grid, "n", "grid", 0);
    c.x_min = get_double(grid, "x_min", "grid");
    c.x_max = get_double(grid, "x_max", "grid");
    if (c.n < 8 || (c.n & (c.n - 1)) != 0) {
        throw Error(ErrorKind::Config, "must be a power of two >= 8", "grid.n");
    }
    as_config("grid", [&] { return SpatialGrid::make(c.n, c.x_min, c.x_max); });

    const json& time = at(r, "time", "");
    check_keys(time, "time", {"t0", "dt", "steps", "store_stride"});
    c.t0 = get_double(time, "t0", "time");
    c.dt = get_double(time, "dt", "time");
    c.steps = get_count(time, "steps", "time", 0);
    c.store_stride = get_count(time, "store_stride", "time", 1);
    if (c.steps < 2) throw Error(ErrorKind::Config, "steps must be >= 2", "time.steps");
    as_config("time.dt", [&] { return TimeGrid::make(c.t0, c.dt, c.steps); });
    if ((c.steps - 1) % c.store_stride != 0) {
        throw Error(ErrorKind::Config, "store_stride must divide steps - 1", "time.store_stride");
    }

    const json& physics = at(r, "physics", "");
    check_keys(physics, "physics", {"g", "potential", "initial", "sampling"});
    c.g = get_double(physics, "g", "physics");
    c.potential = parse_potential(at(physics, "potential", "physics"), c.n);
    c.initial = parse_initial(at(physics, "initial", "physics"));
    c.sampling = get_string(physics, "sampling", "physics");
    if (c.sampling != "evolve" && c.sampling != "analytic") {
        throw Error(ErrorKind::Config, "sampling must be 'evolve' or 'analytic'", "physics.sampling");
    }

    const auto& kind = c.initial.kind;
    if ((kind == "soliton" || kind == "soliton_mixture") && !(c.g < 0.0)) {
        throw Error(ErrorKind::Config, "bright solitons require g < 0", "physics.g");
    }
    if (c.sampling == "analytic") {
        if ((kind == "gaussian" || kind == "soliton" || kind == "soliton_mixture") &&
            !c.potential.is_zero()) {
            throw Error(ErrorKind::Config,
                        "closed-form sampling of this state requires the zero potential",
                        "physics.sampling");
        }
        if (kind == "gaussian" && c.g != 0.0) {
            throw Error(ErrorKind::Config, "closed-form Gaussian sampling requires g = 0",
                        "physics.sampling");
        }
        if (kind == "hermite" || kind == "hermite_mixture") {
            const auto* h = std::get_if<HarmonicPotential>(&c.potential.kind());
            if (!h || h->omega != 1.0 || c.g != 0.0) {
                throw Error(ErrorKind::Config,
                            "closed-form eigenstate sampling requires harmonic(omega = 1), g = 0",
                            "physics.sampling");
            }
        }
    }
    if (kind == "ground" && c.potential.is_zero() && c.g >= 0.0) {
        throw Error(ErrorKind::Config, "ground state needs a confining potential or g < 0",
                    "physics.initial.kind");
    }

    const json& verify = at(r, "verify", "");
    check_keys(verify, "verify", {"equations", "pairs", "refinement_levels", "mixture_diagnostic"});
    for (const auto& id : get_array<std::string>(verify, "equations", "verify")) {
        c.equations.push_back(as_config("verify.equations", [&] { return parse_equation(id); }));
    }
    c.pairs = get_count(verify, "pairs", "verify", 1);
    c.refinement_levels = get_count(verify, "refinement_levels", "verify", 0);
    if (c.refinement_levels == 1 || c.refinement_levels == 2) {
        throw Error(ErrorKind::Config, "use 0 (off) or >= 3 levels", "verify.refinement_levels");
    }
    const json& diag = at(verify, "mixture_diagnostic", "verify");
    if (!diag.is_boolean()) {
        throw Error(ErrorKind::Config, "expected a boolean", "verify.mixture_diagnostic");
    }
    c.mixture_diagnostic = diag.get<bool>();

    const bool mixture = c.initial.is_mixture();
    for (Equation eq : c.equations) {
        if (eq != Equation::GeneralizedGpe && c.g != 0.0) {
            throw Error(ErrorKind::Config,
                        std::string(equation_id(eq)) + " is a linear equation but g != 0",
                        "verify.equations");
        }
        if (eq == Equation::GeneralizedGpe && mixture && !c.mixture_diagnostic) {
            throw Error(ErrorKind::Config,
                        "eq16 is defined for pure states; set verify.mixture_diagnostic to "
                        "measure the mixture defect",
                        "verify.equations");
        }
    }
    if (!c.equations.empty() && (c.steps - 1) / c.store_stride + 1 < 3) {
        throw Error(ErrorKind::Config, "residuals need at least 3 stored snapshots", "time.steps");
    }

    const json& input = at(r, "input", "");
    check_keys(input, "input", {"trajectories", "weights"});
    c.input_trajectories = get_array<std::string>(input, "trajectories", "input");
    c.input_weights = get_array<double>(input, "weights", "input");
    if (!c.input_weights.empty()) {
        check_weights(c.input_weights, c.input_trajectories.size(), "input.weights");
    }

    const json& output = at(r, "output", "");
    check_keys(output, "output", {"directory", "formats"});
    c.output_directory = get_string(output, "directory", "output");
    if (c.output_directory.empty()) {
        throw Error(ErrorKind::Config, "must not be empty", "output.directory");
    }
    c.write_csv = c.write_json = false;
    for (const auto& f : get_array<std::string>(output, "formats", "output")) {
        if (f == "csv") c.write_csv = true;
        else if (f == "json") c.write_json = true;
        else throw Error(ErrorKind::Config, "unknown format '" + f + "'", "output.formats");
    }
    return c;
}

namespace {

struct LevelGrid {
    std::size_t factor;
    EvolveParams params;
    TimeGrid stored;
};

LevelGrid level_grid(const ScenarioConfig& cfg, std::size_t level) {
    const std::size_t factor = std::size_t{1} << level;
    EvolveParams p;
    p.g = cfg.g;
    p.potential = cfg.potential;
    p.time_grid = TimeGrid::make(cfg.t0, cfg.dt / static_cast<double>(factor),
                                 (cfg.steps - 1) * factor + 1);
    p.store_stride = cfg.store_stride;
    return {factor, p, p.stored_time_grid()};
}

// psi(x, t) = phi(x) exp(-i E t) sampled on the stored grid.
Trajectory stationary_trajectory(const StationaryState& s, const LevelGrid& lg,
                                 const ScenarioConfig& cfg) {
    Trajectory tr{s.field.grid(), lg.stored, {}, cfg.g, cfg.potential.id()};
    for (std::size_t k = 0; k < lg.stored.steps(); ++k) {
        const double t = lg.stored.time(k);
        tr.snapshots.push_back(s.field.scaled(std::polar(1.0, -s.energy * t)).with_time(t));
    }
    return tr;
}

template <typename F>
Trajectory sampled_trajectory(const SpatialGrid& grid, const LevelGrid& lg,
                              const ScenarioConfig& cfg, F&& at_time) {
    Trajectory tr{grid, lg.stored, {}, cfg.g, cfg.potential.id()};
    for (std::size_t k = 0; k < lg.stored.steps(); ++k) {
        tr.snapshots.push_back(at_time(lg.stored.time(k)));
    }
    return tr;
}

} // namespace

ScenarioSource build_source(const ScenarioConfig& cfg, std::size_t level) {
    const auto grid = SpatialGrid::make(cfg.n, cfg.x_min, cfg.x_max);
    const LevelGrid lg = level_grid(cfg, level);
    const bool analytic = cfg.sampling == "analytic";
    const auto& s = cfg.initial;
    ScenarioSource src;

    auto from_state = [&](const StationaryState& st) {
        return analytic ? stationary_trajectory(st, lg, cfg)
                        : evolve(st.field.with_time(cfg.t0), lg.params);
    };
    auto soliton = [&](double amplitude) {
        if (analytic) {
            return sampled_trajectory(grid, lg, cfg, [&](double t) {
                return bright_soliton_exact(amplitude, s.x0, s.velocity, cfg.g, t, grid);
            });
        }
        const auto st = bright_soliton(amplitude, s.x0, s.velocity, cfg.g, grid);
        return evolve(st.field.with_time(cfg.t0), lg.params);
    };

    if (s.kind == "gaussian") {
        if (analytic) {
            src.components.push_back(sampled_trajectory(grid, lg, cfg, [&](double t) {
                return free_gaussian_exact(s.x0, s.p0, s.width, t, grid);
            }));
        } else {
            src.components.push_back(
                evolve(gaussian_packet(s.x0, s.p0, s.width, grid).with_time(cfg.t0), lg.params));
        }
        src.weights = {1.0};
    } else if (s.kind == "hermite") {
        src.components.push_back(from_state(hermite_eigenstate(s.level, grid)));
        src.weights = {1.0};
    } else if (s.kind == "soliton") {
        src.components.push_back(soliton(s.amplitude));
        src.weights = {1.0};
    } else if (s.kind == "ground") {
        GroundStateParams gp;
        gp.g = cfg.g;
        gp.potential = cfg.potential;
        gp.target_norm = s.target_norm;
        gp.dtau = s.dtau;
        gp.tol = s.tol;
        gp.max_iter = s.max_iter;
        src.components.push_back(from_state(imaginary_time_ground_state(gp, grid).state));
        src.weights = {1.0};
    } else if (s.kind == "hermite_mixture") {
        for (int l : s.levels) src.components.push_back(from_state(hermite_eigenstate(l, grid)));
        src.weights = s.weights;
        src.mixture = true;
    } else if (s.kind == "soliton_mixture") {
        for (double a : s.amplitudes) src.components.push_back(soliton(a));
        src.weights = s.weights;
        src.mixture = true;
    } else {
        throw Error(ErrorKind::Config, "unknown initial state kind", "physics.initial.kind");
    }
    return src;
}

std::vector<ResidualReport> sample_residuals(const ScenarioConfig& cfg, const ScenarioSource& src,
                                             Equation eq, std::size_t level) {
    const std::size_t factor = std::size_t{1} << level;
    const std::size_t steps0 = (cfg.steps - 1) / cfg.store_stride + 1;
    auto idx = interior_indices(steps0, cfg.pairs);
    for (auto& k : idx) k *= factor;

    std::vector<ResidualReport> out;
    if (src.mixture) {
        const MixtureSpec spec = src.as_mixture();
        for (std::size_t k : idx) {
            if (eq == Equation::VonNeumann) {
                out.push_back(von_neumann_residual(spec, cfg.potential, k));
                continue;
            }
            for (std::size_t l : idx) {
                if (eq == Equation::GeneralizedLinear) {
                    out.push_back(generalized_linear_residual(spec, cfg.potential, k, l));
                } else if (cfg.mixture_diagnostic) {
                    out.push_back(gpe_mixture_defect_diagnostic(spec, cfg.potential, cfg.g, k, l));
                } else {
                    out.push_back(gpe_generalized_residual(spec, cfg.potential, cfg.g, k, l));
                }
            }
        }
        return out;
    }
    const Trajectory& tr = src.components.front();
    for (std::size_t k : idx) {
        if (eq == Equation::VonNeumann) {
            out.push_back(von_neumann_residual(tr, cfg.potential, k));
            continue;
        }
        for (std::size_t l : idx) {
            if (eq == Equation::GeneralizedLinear) {
                out.push_back(generalized_linear_residual(tr, cfg.potential, k, l));
            } else {
                out.push_back(gpe_generalized_residual(tr, cfg.potential, cfg.g, k, l));
            }
        }
    }
    return out;
}

ConvergenceReport convergence_for(const ScenarioConfig& cfg, Equation eq, std::size_t levels) {
    return convergence_order(eq, levels, [&](std::size_t level) {
        const auto src = build_source(cfg, level);
        const auto reports = sample_residuals(cfg, src, eq, level);
        double worst = 0.0;
        for (const auto& r : reports) worst = std::max(worst, r.max_abs);
        const double dt_sample = cfg.dt * static_cast<double>(cfg.store_stride) /
                                 static_cast<double>(std::size_t{1} << level);
        return ConvergenceLevel{dt_sample, worst};
    });
}

ConvergenceReport convergence_order(const std::string& scenario_id, Equation eq,
                                    std::size_t refinement_levels) {
    if (scenario_id == "custom") {
        throw Error(ErrorKind::Config, "convergence_order needs a catalog scenario", "scenario");
    }
    const auto cfg = parse_config(scenario_defaults(scenario_id));
    return convergence_for(cfg, eq, refinement_levels);
}

} // namespace gpden
