#include "helmecs/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace helmecs {

namespace {

using clock = std::chrono::steady_clock;

double seconds_since(clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string cycle_label(const MgConfig& mg) {
    std::ostringstream s;
    if (mg.gamma_f == 1 && mg.gamma_c == 1)
        s << "V(" << mg.nu1 << "," << mg.nu2 << ")";
    else if (mg.gamma_f == 2 && mg.gamma_c == 2)
        s << "W(" << mg.nu1 << "," << mg.nu2 << ")";
    else if (mg.gamma_f == 1)
        s << "F_1^" << mg.gamma_c << "(" << mg.nu1 << "," << mg.nu2 << ")";
    else
        s << "MG[" << mg.gamma_f << "," << mg.gamma_c << "](" << mg.nu1 << "," << mg.nu2 << ")";
    return s.str();
}

std::string smoother_label(const MgConfig& mg) {
    return mg.smoother == SmootherKind::jacobi ? "w-Jacobi" : "w-RB-Jacobi";
}

std::string precond_label(const PreconditionerSpec& p, cplx lambda0) {
    std::ostringstream s;
    switch (p.kind) {
        case PreconditionerKind::none: return "none";
        case PreconditionerKind::laplacian: return "Laplacian";
        case PreconditionerKind::csl:
            s << "CSL (b1,b2)=(" << p.beta1 << "," << p.beta2 << ")";
            return s.str();
        case PreconditionerKind::csg:
            s << "CSG theta_a=" << p.theta_alpha;
            return s.str();
        case PreconditionerKind::qd:
            s << "QD Re(l0)=" << lambda0.real();
            return s.str();
    }
    return "?";
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, bool tol_sensitivity) {
    ExperimentResult result;
    result.grid = make_grid(config.model);
    const TensorGrid2D& grid = result.grid;

    OperatorSpec target_spec;
    target_spec.model = config.model;
    const StencilOperator target = discretize(target_spec, grid);
    const cvec b = build_rhs(config.model, grid);

    // Resolve lambda0 once so the hierarchy and the report agree.
    PreconditionerSpec pc = config.preconditioner;
    cplx lambda0{0.0};
    std::string lambda0_source = "n/a";
    if (pc.kind == PreconditionerKind::qd) {
        lambda0_source = pc.lambda0 ? "config" : "auto";
        lambda0 = resolve_lambda0(config.model, pc);
        pc.lambda0 = lambda0;
    }

    BenchRow& row = result.row;
    row.label = precond_label(pc, lambda0);
    row.cycle = cycle_label(config.mg);
    row.smoother = smoother_label(config.mg);
    row.omega = config.mg.omega;

    int warm_cycles = 0;
    double warm_seconds = 0.0;
    cvec x0(b.size(), cplx{0.0});

    if (pc.kind == PreconditionerKind::none) {
        const LinearOp identity = [](std::span<const cplx> in, std::span<cplx> out) {
            std::copy(in.begin(), in.end(), out.begin());
        };
        KrylovConfig kr = config.krylov;
        if (tol_sensitivity) kr.tol = std::min(kr.tol, 1e-7);
        auto [x, report] = bicgstab(operator_action(target), identity, b, x0, kr);
        result.solution = std::move(x);
        result.report = std::move(report);
    } else {
        const OperatorSpec pre_spec = preconditioner_spec(config.model, pc);
        const Hierarchy hierarchy = build_hierarchy(pre_spec, grid, config.mg);

        const auto t_mg = clock::now();
        const MgResult mg_res = standalone_solve(hierarchy, b, config.mg);
        row.mg_seconds = seconds_since(t_mg);
        row.mg_conv = mg_res.conv_factor;
        row.mg_cycles = mg_res.cycles;

        if (config.krylov.warm_start) {
            const auto t_ws = clock::now();
            x0 = warm_start_guess(hierarchy, b, config.krylov.warm_start_tol, config.mg,
                                  warm_cycles);
            warm_seconds = seconds_since(t_ws);
        }

        KrylovConfig kr = config.krylov;
        if (tol_sensitivity) kr.tol = std::min(kr.tol, 1e-7);
        auto [x, report] = bicgstab(operator_action(target), mg_preconditioner(hierarchy, config.mg),
                                    b, x0, kr);
        result.solution = std::move(x);
        result.report = std::move(report);
    }

    SolveReport& report = result.report;
    report.mg_cycles += warm_cycles;
    report.wall_seconds += warm_seconds;

    row.iterations = report.iterations_to(config.krylov.tol);
    row.converged = row.iterations >= 0;
    if (!row.converged) row.iterations = report.iterations;
    row.iterations_tol_lo = report.iterations_to(1e-5);
    row.iterations_tol_hi = report.iterations_to(1e-7);
    row.total_seconds = report.wall_seconds;
    row.cycles_per_prec = 1;

    auto& prov = row.provenance;
    prov["label"] = config.label;
    prov["model"] = [&] {
        switch (config.model.kind) {
            case ModelKind::mp1: return "mp1";
            case ModelKind::mp2: return "mp2";
            case ModelKind::mp3: return "mp3";
            default: return "custom";
        }
    }();
    prov["k"] = fmt(config.model.k);
    prov["grid_x"] = std::to_string(config.model.x.n) + "+" + std::to_string(config.model.x.m_lo) +
                     "+" + std::to_string(config.model.x.m_hi);
    prov["grid_y"] = std::to_string(config.model.y.n) + "+" + std::to_string(config.model.y.m_lo) +
                     "+" + std::to_string(config.model.y.m_hi);
    prov["domain"] = fmt(config.model.x.a);
    prov["theta"] = fmt(config.model.x.theta);
    prov["rhs_sign"] = fmt(config.model.rhs_sign);
    prov["lambda0"] = fmt(lambda0.real()) + (lambda0.imag() != 0.0 ? "+" + fmt(lambda0.imag()) + "i" : "");
    prov["lambda0_source"] = lambda0_source;
    prov["krylov_tol"] = fmt(config.krylov.tol);
    prov["mg_tol"] = fmt(config.mg.tol);
    prov["cycle"] = row.cycle;
    prov["smoother"] = row.smoother;
    prov["omega"] = fmt(config.mg.omega);
    prov["warm_start"] = config.krylov.warm_start ? "on(" + fmt(config.krylov.warm_start_tol) + ")" : "off";
    prov["literal_swap"] = config.mg.literal_swap ? "true" : "false";
    report.config_echo = prov;
    return result;
}

namespace {

int scaled_cells(int cells, double scale, int minimum) {
    int v = static_cast<int>(std::lround(cells * scale));
    if (v % 2 != 0) ++v;
    return std::max(v, minimum);
}

struct TableRowSpec {
    PreconditionerSpec precond;
    MgConfig mg;
    PaperReference ref;
};

TableRowSpec table_row_spec(int table_id, const std::string& row) {
    TableRowSpec s;
    s.mg.nu1 = s.mg.nu2 = 1;
    const auto csl = [&](double b2, int gamma_c, double omega, PaperReference ref) {
        s.precond.kind = PreconditionerKind::csl;
        s.precond.beta1 = -1.0;
        s.precond.beta2 = b2;
        s.mg.gamma_f = 1;
        s.mg.gamma_c = gamma_c;
        s.mg.smoother = SmootherKind::jacobi;
        s.mg.omega = omega;
        s.ref = ref;
    };
    const auto csg = [&](double denom, int gamma_c, double omega, PaperReference ref) {
        s.precond.kind = PreconditionerKind::csg;
        s.precond.theta_alpha = std::numbers::pi / denom;
        s.mg.gamma_f = 1;
        s.mg.gamma_c = gamma_c;
        s.mg.smoother = SmootherKind::jacobi;
        s.mg.omega = omega;
        s.ref = ref;
    };
    const auto qd = [&](double lambda0, double omega, PaperReference ref) {
        s.precond.kind = PreconditionerKind::qd;
        s.precond.lambda0 = cplx{lambda0, 0.0};
        s.mg.gamma_f = s.mg.gamma_c = 1;
        s.mg.smoother = SmootherKind::rb_jacobi;
        s.mg.omega = omega;
        s.ref = ref;
    };

    switch (table_id) {
        case 1:
            if (row == "csl") csl(-0.3, 4, 0.8, {0.43, 17, 60});
            else if (row == "csg") csg(14.0, 3, 0.8, {0.39, 15, 62});
            else if (row == "qd") qd(-2.6e4, 1.0, {0.09, 6, 170});
            else throw ConfigError("unknown table row: " + row);
            return s;
        case 2:
            if (row == "csl") csl(-0.4, 3, 0.5, {0.53, 22, 137});
            else if (row == "csg") csg(17.0, 3, 0.5, {0.53, 22, 143});
            else if (row == "qd") qd(-16.88, 1.0, {0.15, 8, 357});
            else throw ConfigError("unknown table row: " + row);
            return s;
        case 3:
            if (row == "csl") csl(-0.6, 2, 0.8, {0.32, 13, 60});
            else if (row == "csg") csg(13.0, 2, 0.8, {0.32, 13, 61});
            else if (row == "qd") qd(-4.19, 1.05, {0.17, 8, 164});
            else throw ConfigError("unknown table row: " + row);
            return s;
        case 4:
            if (row == "csl") csl(-0.6, 4, 0.8, {0.32, 13, 210});
            else if (row == "csg") csg(13.0, 3, 0.8, {0.31, 12, 160});
            else if (row == "qd") qd(-16.18, 1.05, {0.13, 7, 545});
            else throw ConfigError("unknown table row: " + row);
            return s;
        default:
            throw ConfigError("table id must be 1..4");
    }
}

ModelProblem table_model(int table_id, double scale) {
    switch (table_id) {
        case 1:
            return make_mp1(160.0, scaled_cells(256, scale, 4), scaled_cells(64, scale, 2));
        case 2:
            return make_mp2(4.0, 7.0, scaled_cells(512, scale, 4), scaled_cells(128, scale, 2), 50.0);
        case 3:
            return make_mp3(2.0, scaled_cells(512, scale, 4), scaled_cells(128, scale, 2), 50.0);
        case 4:
            return make_mp3(4.0, scaled_cells(768, scale, 4), scaled_cells(128, scale, 2), 75.0);
        default:
            throw ConfigError("table id must be 1..4");
    }
}

}  // namespace

PaperReference paper_reference(int table_id, const std::string& row) {
    return table_row_spec(table_id, row).ref;
}

ExperimentConfig table_config(int table_id, const std::string& row, double scale) {
    const TableRowSpec spec = table_row_spec(table_id, row);
    ExperimentConfig c;
    c.label = "table" + std::to_string(table_id) + "-" + row +
              (scale != 1.0 ? "-scale" + fmt(scale, 3) : "");
    c.model = table_model(table_id, scale);
    c.preconditioner = spec.precond;
    c.mg = spec.mg;
    c.krylov.tol = 1e-6;
    c.krylov.max_iter = 5000;
    return c;
}

std::vector<BenchRow> bench_table(int table_id, double scale, bool tol_sensitivity) {
    std::vector<BenchRow> rows;
    for (const std::string row_name : {"csl", "csg", "qd"}) {
        const ExperimentConfig config = table_config(table_id, row_name, scale);
        ExperimentResult res = run_experiment(config, tol_sensitivity);
        const PaperReference ref = paper_reference(table_id, row_name);
        res.row.ref_mg_conv = ref.mg_conv;
        res.row.ref_mg_cycles = ref.mg_cycles;
        res.row.ref_iterations = ref.iterations;
        rows.push_back(std::move(res.row));
    }
    return rows;
}

std::string render_markdown_table(const std::vector<BenchRow>& rows, int table_id) {
    std::ostringstream out;
    out << "### Table " << table_id << " reproduction\n\n";
    out << "| Preconditioner | cyc, smooth., w | mg-conv, #cycles | mg s | per prec. | iter | s | "
           "ref mg-conv, #cycles | ref iter | d(mg-conv) | d(iter) % | iter@1e-5 | iter@1e-7 |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const BenchRow& r : rows) {
        out << "| " << r.label << " | " << r.cycle << ", " << r.smoother << ", w=" << r.omega
            << " | " << fmt(r.mg_conv, 3) << ", " << r.mg_cycles << " | " << fmt(r.mg_seconds, 3)
            << " | " << r.cycles_per_prec << " | " << r.iterations << (r.converged ? "" : " (!)")
            << " | " << fmt(r.total_seconds, 3) << " | ";
        if (r.ref_mg_conv >= 0.0) {
            out << fmt(r.ref_mg_conv, 3) << ", " << r.ref_mg_cycles << " | " << r.ref_iterations
                << " | " << fmt(r.mg_conv - r.ref_mg_conv, 3) << " | "
                << fmt(100.0 * (r.iterations - r.ref_iterations) / r.ref_iterations, 3) << " | ";
        } else {
            out << "- | - | - | - | ";
        }
        out << r.iterations_tol_lo << " | " << r.iterations_tol_hi << " |\n";
    }
    out << "\nProvenance: ";
    if (!rows.empty()) {
        bool first = true;
        for (const auto& [key, value] : rows.front().provenance) {
            if (!first) out << "; ";
            out << key << "=" << value;
            first = false;
        }
    }
    out << "\n";
    return out.str();
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
    out << "preconditioner,cycle,smoother,omega,mg_conv,mg_cycles,mg_seconds,cycles_per_prec,"
           "iterations,total_seconds,converged,ref_mg_conv,ref_mg_cycles,ref_iterations,"
           "delta_mg_conv,delta_iterations_pct,iterations_tol_1e-5,iterations_tol_1e-7\n";
    for (const BenchRow& r : rows) {
        out << r.label << "," << r.cycle << "," << r.smoother << "," << r.omega << ","
            << fmt(r.mg_conv) << "," << r.mg_cycles << "," << fmt(r.mg_seconds) << ","
            << r.cycles_per_prec << "," << r.iterations << "," << fmt(r.total_seconds) << ","
            << (r.converged ? "true" : "false") << ",";
        if (r.ref_mg_conv >= 0.0)
            out << fmt(r.ref_mg_conv) << "," << r.ref_mg_cycles << "," << r.ref_iterations << ","
                << fmt(r.mg_conv - r.ref_mg_conv) << ","
                << fmt(100.0 * (r.iterations - r.ref_iterations) / r.ref_iterations) << ",";
        else
            out << ",,,,,";
        out << r.iterations_tol_lo << "," << r.iterations_tol_hi << "\n";
    }
}

void export_field(const cvec& u, const TensorGrid2D& grid, std::ostream& out) {
    out << "x,y,re,im,abs\n";
    out << std::setprecision(16);
    for (int iy = 0; iy < grid.nuy(); ++iy) {
        if (!grid.gy.is_real_node(iy + 1)) continue;
        const double y = grid.coord_y(iy).real();
        for (int ix = 0; ix < grid.nux(); ++ix) {
            if (!grid.gx.is_real_node(ix + 1)) continue;
            const double x = grid.coord_x(ix).real();
            const cplx v = u[grid.index(ix, iy)];
            out << x << "," << y << "," << v.real() << "," << v.imag() << "," << std::abs(v)
                << "\n";
        }
    }
}

void export_field(const cvec& u, const TensorGrid2D& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open field output: " + path);
    export_field(u, grid, out);
    if (!out) throw IoError("failed writing field output: " + path);
}

void export_spectrum(const SpectrumReport& report, std::ostream& out) {
    out << "re,im,branch,residual\n";
    out << std::setprecision(16);
    for (const LabeledEigenvalue& e : report.eigenvalues) {
        const char* branch = e.branch == SpectralBranch::real_branch ? "real"
                             : e.branch == SpectralBranch::contour   ? "contour"
                                                                     : "tail";
        out << e.lambda.real() << "," << e.lambda.imag() << "," << branch << "," << e.residual
            << "\n";
    }
}

void export_spectrum(const SpectrumReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open spectrum output: " + path);
    export_spectrum(report, out);
    if (!out) throw IoError("failed writing spectrum output: " + path);
}

void write_report(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open report output: " + path);
    const SolveReport& rep = result.report;
    out << "status: "
        << (rep.status == KrylovStatus::converged        ? "converged"
            : rep.status == KrylovStatus::max_iterations ? "max_iterations"
                                                         : "breakdown")
        << "\n";
    out << "iterations: " << rep.iterations << "\n";
    out << "mg_cycles: " << rep.mg_cycles << "\n";
    out << "wall_seconds: " << fmt(rep.wall_seconds) << "\n";
    out << "final_relative_residual: "
        << (rep.residual_history.empty() ? 0.0 : rep.residual_history.back()) << "\n";
    out << "mg_conv: " << fmt(result.row.mg_conv, 4) << "\n";
    out << "mg_cycles_standalone: " << result.row.mg_cycles << "\n";
    for (const auto& [key, value] : rep.config_echo) out << "config." << key << ": " << value << "\n";
    if (!out) throw IoError("failed writing report output: " + path);
}

}  // namespace helmecs
