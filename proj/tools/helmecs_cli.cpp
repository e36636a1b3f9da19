#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "helmecs/experiment.hpp"

namespace fs = std::filesystem;
using namespace helmecs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitConfigError = 3;
constexpr int kExitIoError = 4;

// Output directory precedence: HELMECS_OUT_DIR > --out-dir > path as given.
fs::path resolve_output(const std::string& configured, const std::string& out_dir_flag) {
    fs::path p{configured};
    const char* env = std::getenv("HELMECS_OUT_DIR");
    if (env && *env) return fs::path(env) / p.filename();
    if (!out_dir_flag.empty()) return fs::path(out_dir_flag) / p.filename();
    return p;
}

int run_command(const std::string& config_path, const std::string& out_dir, bool quiet) {
    const ExperimentConfig config = load_config_file(config_path);
    const ExperimentResult result = run_experiment(config);

    if (!quiet) {
        std::cout << result.row.label << ": " << result.row.cycle << ", " << result.row.smoother
                  << ", w=" << result.row.omega << "\n";
        std::cout << "  mg-conv " << result.row.mg_conv << ", cycles " << result.row.mg_cycles
                  << "\n";
        std::cout << "  Bi-CGSTAB iterations " << result.row.iterations
                  << (result.row.converged ? "" : " (not converged)") << ", mg cycles "
                  << result.report.mg_cycles << ", " << result.report.wall_seconds << " s\n";
    }

    if (!config.outputs.report.empty())
        write_report(result, resolve_output(config.outputs.report, out_dir).string());
    if (!config.outputs.field.empty())
        export_field(result.solution, result.grid,
                     resolve_output(config.outputs.field, out_dir).string());
    if (!config.outputs.spectrum.empty()) {
        const EcsGrid1D& gx = result.grid.gx;
        const int m = gx.m_hi > 0 ? gx.m_hi : gx.m_lo;
        if (m == 0) throw ConfigError("spectrum output needs a grid with at least one layer");
        const PitchforkParams params{gx.n, m, gx.h, gx.gamma()};
        const SpectrumReport spectrum = find_pitchfork(params, gx.n + m - 1);
        export_spectrum(spectrum, resolve_output(config.outputs.spectrum, out_dir).string());
    }
    return result.row.converged ? kExitOk : kExitNoConvergence;
}

int bench_command(int table_id, double scale, const std::string& out_dir, bool no_sensitivity) {
    const std::vector<BenchRow> rows = bench_table(table_id, scale, !no_sensitivity);
    const std::string markdown = render_markdown_table(rows, table_id);
    std::cout << markdown;

    const std::string stem = "table" + std::to_string(table_id) +
                             (scale != 1.0 ? "_scale" + std::to_string(scale).substr(0, 4) : "");
    const fs::path md_path = resolve_output(stem + ".md", out_dir);
    const fs::path csv_path = resolve_output(stem + ".csv", out_dir);
    std::ofstream md(md_path);
    if (!md) throw IoError("cannot open " + md_path.string());
    md << markdown;
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open " + csv_path.string());
    write_bench_csv(rows, csv);
    std::cout << "wrote " << md_path.string() << " and " << csv_path.string() << "\n";

    for (const BenchRow& r : rows)
        if (!r.converged) return kExitNoConvergence;
    return kExitOk;
}

int spectrum_command(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig config = load_config_file(config_path);
    const EcsGrid1D gx = build_grid(config.model.x.n, config.model.x.m_lo, config.model.x.m_hi,
                                    config.model.x.a, config.model.x.w, config.model.x.theta);
    const int m = gx.m_hi > 0 ? gx.m_hi : gx.m_lo;
    if (m == 0) throw ConfigError("spectrum requires a grid with at least one absorbing layer");
    const PitchforkParams params{gx.n, m, gx.h, gx.gamma()};
    const SpectrumReport report = find_pitchfork(params, gx.n + m - 1);

    const std::string path = config.outputs.spectrum.empty() ? config.label + "_spectrum.csv"
                                                             : config.outputs.spectrum;
    export_spectrum(report, resolve_output(path, out_dir).string());
    std::cout << "wrote " << report.eigenvalues.size() << " eigenvalues ("
              << report.failed_seeds << " failed seeds)\n";
    return kExitOk;
}

int field_command(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig config = load_config_file(config_path);
    const ExperimentResult result = run_experiment(config);
    const std::string path =
        config.outputs.field.empty() ? config.label + "_field.csv" : config.outputs.field;
    export_field(result.solution, result.grid, resolve_output(path, out_dir).string());
    std::cout << "wrote field for " << result.row.label << " ("
              << (result.row.converged ? "converged" : "NOT converged") << ")\n";
    return result.row.converged ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indefinite 2D Helmholtz solver toolkit: ECS absorbing layers, CSL/CSG/QD "
                 "preconditioners, multigrid, Bi-CGSTAB"};
    app.require_subcommand(1);

    std::string out_dir;
    app.add_option("--out-dir", out_dir, "Directory for output files (HELMECS_OUT_DIR overrides)");

    std::string config_path;
    bool quiet = false;
    CLI::App* run = app.add_subcommand("run", "Run one experiment from a config file");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_flag("--quiet", quiet, "Suppress the summary line");

    int table_id = 1;
    double scale = 1.0;
    bool no_sensitivity = false;
    CLI::App* bench = app.add_subcommand("bench", "Reproduce a benchmark table");
    bench->add_option("--table", table_id, "Table id (1-4)")->required()->check(CLI::Range(1, 4));
    bench->add_option("--scale", scale, "Cell-count scale factor (0.5 = smoke run)")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--no-sensitivity", no_sensitivity,
                    "Skip the 1e-5/1e-7 tolerance sensitivity columns");

    std::string spectrum_config;
    CLI::App* spectrum = app.add_subcommand("spectrum", "Export the 1D ECS eigenvalue pitchfork");
    spectrum->add_option("config", spectrum_config, "JSON config file")->required();

    std::string field_config;
    CLI::App* field = app.add_subcommand("field", "Solve and export the field magnitude");
    field->add_option("config", field_config, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, out_dir, quiet);
        if (bench->parsed()) return bench_command(table_id, scale, out_dir, no_sensitivity);
        if (spectrum->parsed()) return spectrum_command(spectrum_config, out_dir);
        if (field->parsed()) return field_command(field_config, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
