// gpden: simulate 1D Schroedinger / Gross-Pitaevskii dynamics and check the
// density-matrix evolution equations on the results.
//
//   gpden list
//   gpden run    --config <file> [--set key=value ...]
//   gpden verify --config <file> [--set key=value ...]

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpden/runner.hpp"

namespace {

int exit_code(gpden::ErrorKind kind) {
    switch (kind) {
    case gpden::ErrorKind::Config:
    case gpden::ErrorKind::InvalidArgument:
    case gpden::ErrorKind::GridMismatch: return 2;
    case gpden::ErrorKind::Io: return 4;
    default: return 3;
    }
}

void print_error(const gpden::Error& e) {
    nlohmann::json rec = {{"error", {{"kind", gpden::to_string(e.kind())}, {"message", e.what()}}}};
    if (!e.field().empty()) rec["error"]["field"] = e.field();
    std::cerr << rec.dump() << '\n';
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gpden::Error(gpden::ErrorKind::Io, "cannot open config '" + path + "'", "--config");
    try {
        return nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw gpden::Error(gpden::ErrorKind::Config, std::string("config parse error: ") + e.what(),
                           "--config");
    }
}

void print_catalog() {
    for (const auto& s : gpden::scenario_catalog()) {
        std::string eqs;
        for (const auto& e : s.equations) eqs += (eqs.empty() ? "" : ",") + e;
        std::cout << s.id << "\t[" << eqs << "]\t" << s.description << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-time density matrices of 1D Schroedinger and Gross-Pitaevskii dynamics"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List the built-in scenarios");

    std::string config_path;
    std::vector<std::string> sets;
    auto* run = app.add_subcommand("run", "Simulate a scenario and write residuals and data");
    run->add_option("--config", config_path, "JSON configuration file")->required();
    run->add_option("--set", sets, "Override a configuration field, e.g. grid.n=512");

    auto* verify = app.add_subcommand("verify", "Residuals of precomputed trajectory dumps");
    verify->add_option("--config", config_path, "JSON configuration file")->required();
    verify->add_option("--set", sets, "Override a configuration field");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << app.help() << '\n';
        app.exit(e);
        return 1;
    }

    try {
        if (list->parsed()) {
            print_catalog();
            return 0;
        }
        const auto cfg = gpden::parse_config(gpden::resolve_config(load_config(config_path), sets));
        const auto manifest = run->parsed() ? gpden::run(cfg) : gpden::verify(cfg);
        std::cout << (manifest.directory / "manifest.json").string() << '\n';
        return 0;
    } catch (const gpden::Error& e) {
        print_error(e);
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump()
                  << '\n';
        return 3;
    }
}
