#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "helmecs/config.hpp"
#include "helmecs/spectral.hpp"

namespace helmecs {

/// One benchmark-table row: multigrid invertibility of the preconditioner
/// plus outer Bi-CGSTAB efficiency.
struct BenchRow {
    std::string label;           // preconditioner with its tunables
    std::string cycle;           // "V(1,1)", "F_1^4(1,1)", ...
    std::string smoother;        // smoother + omega
    double omega = 0.0;
    double mg_conv = 0.0;
    int mg_cycles = 0;
    double mg_seconds = 0.0;
    int cycles_per_prec = 1;
    int iterations = -1;  // Bi-CGSTAB iterations to the configured tolerance
    double total_seconds = 0.0;
    bool converged = false;

    // Paper reference values when the row reproduces a published one.
    double ref_mg_conv = -1.0;
    int ref_mg_cycles = -1;
    int ref_iterations = -1;

    // Iterations at neighboring tolerances (sensitivity; -1 = not reached).
    int iterations_tol_lo = -1;  // 1e-5
    int iterations_tol_hi = -1;  // 1e-7

    std::map<std::string, std::string> provenance;
};

struct ExperimentResult {
    BenchRow row;
    SolveReport report;
    cvec solution;
    TensorGrid2D grid;
};

/// Run one experiment: standalone multigrid solve of the preconditioner
/// system (mg-conv, cycles), then preconditioned Bi-CGSTAB on the model.
/// With tol_sensitivity the Krylov run continues to 1e-7 and the row reports
/// iteration counts at 1e-5/1e-6(configured)/1e-7 from one residual history.
ExperimentResult run_experiment(const ExperimentConfig& config, bool tol_sensitivity = false);

/// Built-in configuration for one row of tables 1-4 ("csl", "csg", "qd").
/// scale multiplies all cell counts (0.5 = desk-scale smoke run).
ExperimentConfig table_config(int table_id, const std::string& row, double scale = 1.0);

/// Paper reference values for a table row.
struct PaperReference {
    double mg_conv;
    int mg_cycles;
    int iterations;
};
PaperReference paper_reference(int table_id, const std::string& row);

/// All three rows of a table, in CSL, CSG, QD order.
std::vector<BenchRow> bench_table(int table_id, double scale = 1.0, bool tol_sensitivity = true);

std::string render_markdown_table(const std::vector<BenchRow>& rows, int table_id);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

/// CSV export of |u| over the real-region nodes: x, y, re, im, abs.
void export_field(const cvec& u, const TensorGrid2D& grid, const std::string& path);
void export_field(const cvec& u, const TensorGrid2D& grid, std::ostream& out);

/// CSV export of a spectrum report: re, im, branch, residual.
void export_spectrum(const SpectrumReport& report, const std::string& path);
void export_spectrum(const SpectrumReport& report, std::ostream& out);

/// Plain-text solve report (provenance block included).
void write_report(const ExperimentResult& result, const std::string& path);

}  // namespace helmecs
