#include "gpden/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gpden::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

nlohmann::json header_json(const GeneralizedDensityMatrix& m) {
    return {{"n", m.grid.n()},
            {"x_min", m.grid.x_min()},
            {"x_max", m.grid.x_max()},
            {"t", m.t},
            {"t_prime", m.t_prime}};
}

nlohmann::json report_json(const ResidualReport& r) {
    nlohmann::json j = {{"equation_id", equation_id(r.equation)},
                        {"t", r.t},
                        {"n", r.n},
                        {"dt_sample", r.dt_sample},
                        {"max_abs", r.max_abs},
                        {"l2", r.l2},
                        {"argmax", {r.argmax_i, r.argmax_j}}};
    j["t_prime"] = r.t_prime ? nlohmann::json(*r.t_prime) : nlohmann::json(nullptr);
    return j;
}

} // namespace

std::string format_double(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = open_out(path);
    const auto& g = traj.grid;
    const auto& tg = traj.time_grid;
    out << g.n() << ' ' << format_double(g.x_min()) << ' ' << format_double(g.x_max()) << ' '
        << format_double(tg.t0()) << ' ' << format_double(tg.dt()) << ' ' << tg.steps() << ' '
        << format_double(traj.g) << '\n';
    for (const auto& snap : traj.snapshots) {
        bool first = true;
        for (const auto& z : snap.values()) {
            if (!first) out << ' ';
            out << format_double(z.real()) << ' ' << format_double(z.imag());
            first = false;
        }
        out << '\n';
    }
    finish(out, path);
}

Trajectory read_trajectory(const std::filesystem::path& path, std::string potential_id) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open trajectory dump '" + path.string() + "'");
    std::size_t n = 0, steps = 0;
    double x_min = 0, x_max = 0, t0 = 0, dt = 0, g = 0;
    if (!(in >> n >> x_min >> x_max >> t0 >> dt >> steps >> g)) {
        throw Error(ErrorKind::Io, "malformed trajectory header in '" + path.string() + "'");
    }
    const auto grid = SpatialGrid::make(n, x_min, x_max);
    const auto tg = TimeGrid::make(t0, dt, steps);
    Trajectory traj{grid, tg, {}, g, std::move(potential_id)};
    traj.snapshots.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        std::vector<cplx> v(n);
        for (std::size_t j = 0; j < n; ++j) {
            double re = 0, im = 0;
            if (!(in >> re >> im)) {
                throw Error(ErrorKind::Io, "trajectory dump '" + path.string() +
                                               "' truncated at snapshot " + std::to_string(k));
            }
            v[j] = {re, im};
        }
        traj.snapshots.emplace_back(grid, std::move(v), tg.time(k));
    }
    return traj;
}

void write_matrix_csv(const std::filesystem::path& path, const GeneralizedDensityMatrix& m) {
    auto out = open_out(path);
    out << m.grid.n() << ',' << format_double(m.grid.x_min()) << ','
        << format_double(m.grid.x_max()) << ',' << format_double(m.t) << ','
        << format_double(m.t_prime) << '\n';
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m.values(i, j).real()) << ','
                << format_double(m.values(i, j).imag());
        }
        out << '\n';
    }
    finish(out, path);
}

void write_matrix_json(const std::filesystem::path& path, const GeneralizedDensityMatrix& m) {
    nlohmann::json j = header_json(m);
    auto values = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
            values.push_back({m.values(i, c).real(), m.values(i, c).imag()});
        }
    }
    j["values"] = std::move(values);
    auto out = open_out(path);
    out << j.dump() << '\n';
    finish(out, path);
}

void write_residuals_csv(const std::filesystem::path& path,
                         const std::vector<ResidualReport>& reports) {
    auto out = open_out(path);
    out << "equation_id,t,t_prime,n,dt_sample,max_abs,l2\n";
    for (const auto& r : reports) {
        out << equation_id(r.equation) << ',' << format_double(r.t) << ','
            << format_double(r.t_prime.value_or(r.t)) << ',' << r.n << ','
            << format_double(r.dt_sample) << ',' << format_double(r.max_abs) << ','
            << format_double(r.l2) << '\n';
    }
    finish(out, path);
}

void write_residuals_json(const std::filesystem::path& path,
                          const std::vector<ResidualReport>& reports) {
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    auto out = open_out(path);
    out << arr.dump(2) << '\n';
    finish(out, path);
}

void write_convergence_json(const std::filesystem::path& path,
                            const std::vector<ConvergenceReport>& reports) {
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) {
        auto levels = nlohmann::json::array();
        for (const auto& l : r.levels) {
            levels.push_back({{"dt_sample", l.dt_sample}, {"max_abs", l.max_abs}});
        }
        arr.push_back({{"equation_id", equation_id(r.equation)},
                       {"levels", std::move(levels)},
                       {"pair_orders", r.pair_orders},
                       {"estimated_order", r.estimated_order},
                       {"at_floor", r.at_floor}});
    }
    auto out = open_out(path);
    out << arr.dump(2) << '\n';
    finish(out, path);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "' for checksum");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        static constexpr char digits[] = "0123456789abcdef";
        hex << digits[md[i] >> 4] << digits[md[i] & 0xf];
    }
    return hex.str();
}

} // namespace gpden::io
