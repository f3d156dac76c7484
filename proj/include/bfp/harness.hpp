//---------------------------------------------------------------------------//
//! \file bfp/harness.hpp
//! Batch driver: single-case runs, the SI/NDA benchmark matrix, and CSV
//! and report output.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "solvers.hpp"

namespace bfp
{
//---------------------------------------------------------------------------//
// OUTPUT
//---------------------------------------------------------------------------//
namespace detail
{
inline std::ofstream open_output(std::filesystem::path const& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    return out;
}
}  // namespace detail

//! max_i |a_i - b_i| / max_i |a_i|
inline double max_relative_difference(std::span<double const> a,
                                      std::span<double const> b)
{
    double diff = 0;
    double scale = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(a[i]));
    }
    return scale > 0 ? diff / scale : diff;
}

/*!
 * Write x_cm, phi0_si, phi0_nda, abs_diff for one case.
 *
 * Throws InvalidArgument if the two reports are on different grids.
 */
inline void emit_flux_profiles(SolveReport const& si,
                               SolveReport const& nda,
                               SpatialGrid const& grid,
                               std::filesystem::path const& path)
{
    if (si.phi0.size() != nda.phi0.size()
        || static_cast<int>(si.phi0.size()) != grid.cells())
    {
        throw InvalidArgument("flux profiles are on mismatched grids");
    }
    auto out = detail::open_output(path);
    out << "x_cm,phi0_si,phi0_nda,abs_diff\n";
    for (int i = 0; i < grid.cells(); ++i)
    {
        out << grid.node(i) << ',' << si.phi0[i] << ',' << nda.phi0[i] << ','
            << std::abs(si.phi0[i] - nda.phi0[i]) << '\n';
    }
}

inline void write_single_flux(std::span<double const> phi0,
                              SpatialGrid const& grid,
                              std::filesystem::path const& path)
{
    auto out = detail::open_output(path);
    out << "x_cm,phi0\n";
    for (int i = 0; i < grid.cells(); ++i)
        out << grid.node(i) << ',' << phi0[i] << '\n';
}

//! k, epsilon per iteration; one epsilon column per report.
inline void write_history(std::vector<SolveReport> const& reports,
                          std::filesystem::path const& path)
{
    auto out = detail::open_output(path);
    out << 'k';
    if (reports.size() == 1)
    {
        out << ",epsilon";
    }
    else
    {
        for (auto const& r : reports)
        {
            std::string tag = to_string(r.method);
            std::transform(tag.begin(), tag.end(), tag.begin(), ::tolower);
            out << ",epsilon_" << tag;
        }
    }
    out << '\n';
    std::size_t rows = 0;
    for (auto const& r : reports)
        rows = std::max(rows, r.error_history.size());
    for (std::size_t k = 0; k < rows; ++k)
    {
        out << k + 1;
        for (auto const& r : reports)
        {
            out << ',';
            if (k < r.error_history.size())
                out << r.error_history[k];
        }
        out << '\n';
    }
}

inline void write_report(std::vector<SolveReport> const& reports,
                         RunConfig const& cfg,
                         std::filesystem::path const& path)
{
    auto out = detail::open_output(path);
    for (auto const& r : reports)
    {
        out << '[' << to_string(r.method) << "]\n"
            << "method=" << to_string(r.method) << '\n'
            << "iterations=" << r.iterations << '\n'
            << "converged=" << (r.converged ? "true" : "false") << '\n'
            << "final_epsilon="
            << (r.error_history.empty() ? 0.0 : r.error_history.back()) << '\n'
            << "wall_seconds=" << r.wall_seconds << '\n';
    }
    out << "[config]\n" << serialize_config(cfg);
}

//---------------------------------------------------------------------------//
// SINGLE CASE
//---------------------------------------------------------------------------//
struct CaseResult
{
    std::vector<SolveReport> reports;
    std::vector<std::filesystem::path> files;

    bool all_converged() const
    {
        return std::all_of(reports.begin(), reports.end(), [](auto const& r) {
            return r.converged;
        });
    }
};

/*!
 * Run the configured method(s) and write <label>_flux.csv,
 * <label>_history.csv and <label>_report under output_dir.
 *
 * The oracle method writes the dense direct solution as its flux profile.
 */
inline CaseResult run_case(RunConfig const& cfg)
{
    validate(cfg);
    auto const problem = cfg.problem();
    SpatialGrid const grid(problem.length_cm, problem.cells);
    std::filesystem::path const dir(cfg.output_dir);

    CaseResult result;
    if (cfg.method == RunMethod::oracle)
    {
        SolveReport r;
        r.method = Method::oracle;
        auto const t0 = std::chrono::steady_clock::now();
        r.phi0 = dense_reference_solve(problem);
        r.wall_seconds = detail::seconds_since(t0);
        r.converged = true;
        result.reports.push_back(std::move(r));
    }
    else
    {
        if (cfg.method == RunMethod::si || cfg.method == RunMethod::both)
            result.reports.push_back(source_iteration(problem));
        if (cfg.method == RunMethod::nda || cfg.method == RunMethod::both)
            result.reports.push_back(nda_solve(problem));
    }

    if (cfg.emit_flux)
    {
        auto path = dir / (cfg.label + "_flux.csv");
        if (result.reports.size() == 2)
            emit_flux_profiles(result.reports[0], result.reports[1], grid, path);
        else
            write_single_flux(result.reports[0].phi0, grid, path);
        result.files.push_back(path);
    }
    if (cfg.emit_history && cfg.method != RunMethod::oracle)
    {
        auto path = dir / (cfg.label + "_history.csv");
        write_history(result.reports, path);
        result.files.push_back(path);
    }
    auto report_path = dir / (cfg.label + "_report");
    write_report(result.reports, cfg, report_path);
    result.files.push_back(report_path);
    return result;
}

//---------------------------------------------------------------------------//
// BENCHMARK MATRIX
//---------------------------------------------------------------------------//
/*!
 * Reference iteration counts for the 1 cm, 200 cell, S16, tol 1e-6 setup.
 */
struct ReferenceCounts
{
    KernelKind kernel;
    int smooth_moments;
    int si_iterations;
    int nda_iterations;
};

inline constexpr std::array<ReferenceCounts, 8> reference_counts{{
    {KernelKind::hgk, 1, 26, 12},
    {KernelKind::hgk, 5, 35, 18},
    {KernelKind::hgk, 9, 36, 18},
    {KernelKind::hgk, 13, 36, 18},
    {KernelKind::srk, 1, 2655, 351},
    {KernelKind::srk, 5, 2739, 318},
    {KernelKind::srk, 9, 2739, 318},
    {KernelKind::srk, 13, 2739, 314},
}};

//! Relative band on iteration counts.
inline constexpr double iteration_band = 0.4;
//! Max-norm relative SI/NDA flux difference.
inline constexpr double agreement_tol = 1e-3;
//! Minimum SI/NDA iteration ratio for the screened Rutherford rows.
inline constexpr double srk_min_speedup = 5;

inline bool within_band(int value, int reference)
{
    return std::abs(value - reference) <= iteration_band * reference;
}

//! Benchmark case configuration for one row of the matrix.
inline RunConfig bench_config(KernelKind kernel, int smooth_moments)
{
    RunConfig cfg;
    cfg.kernel = kernel;
    cfg.smooth_moments = smooth_moments;
    cfg.method = RunMethod::both;
    std::string const name = kernel == KernelKind::hgk ? "hgk" : "srk";
    cfg.label = name + "_B" + std::to_string(smooth_moments);
    return cfg;
}

struct BenchRow
{
    ReferenceCounts reference;
    SolveReport si;
    SolveReport nda;
    double flux_difference{0};

    double speedup_iter() const
    {
        return nda.iterations > 0
                   ? static_cast<double>(si.iterations) / nda.iterations
                   : 0;
    }
    double speedup_time() const
    {
        return nda.wall_seconds > 0 ? si.wall_seconds / nda.wall_seconds : 0;
    }
    bool si_in_band() const
    {
        return within_band(si.iterations, reference.si_iterations);
    }
    bool nda_in_band() const
    {
        return within_band(nda.iterations, reference.nda_iterations);
    }
    bool pass() const
    {
        double const min_speedup
            = reference.kernel == KernelKind::srk ? srk_min_speedup : 1.0;
        return si.converged && nda.converged && si_in_band() && nda_in_band()
               && speedup_iter() > 1 && speedup_iter() >= min_speedup
               && flux_difference <= agreement_tol;
    }
};

//! Solve one benchmark row with both methods.
inline BenchRow run_bench_row(ReferenceCounts const& ref)
{
    auto const problem = bench_config(ref.kernel, ref.smooth_moments).problem();
    BenchRow row{ref, source_iteration(problem), nda_solve(problem), 0};
    row.flux_difference = max_relative_difference(row.si.phi0, row.nda.phi0);
    return row;
}

inline void write_table1(std::vector<BenchRow> const& rows,
                         std::filesystem::path const& path)
{
    auto out = detail::open_output(path);
    out << "kernel,parameter,B,si_iterations,si_runtime_s,nda_iterations,"
           "nda_runtime_s,speedup_iter,speedup_time,flux_rel_diff,pass\n";
    for (auto const& r : rows)
    {
        bool const hgk = r.reference.kernel == KernelKind::hgk;
        out << (hgk ? "HGK" : "SRK") << ','
            << (hgk ? "g=0.9" : "C=0.3903 eta=2.836e-05") << ','
            << r.reference.smooth_moments << ',' << r.si.iterations << ','
            << r.si.wall_seconds << ',' << r.nda.iterations << ','
            << r.nda.wall_seconds << ',' << r.speedup_iter() << ','
            << r.speedup_time() << ',' << r.flux_difference << ','
            << (r.pass() ? "pass" : "fail") << '\n';
    }
}

/*!
 * Run the eight-case SI/NDA matrix, writing table1.csv and a flux profile
 * per case into output_dir.
 */
inline std::vector<BenchRow>
run_table1_bench(std::filesystem::path const& output_dir)
{
    std::vector<BenchRow> rows;
    std::string failures;
    for (auto const& ref : reference_counts)
    {
        try
        {
            rows.push_back(run_bench_row(ref));
            auto const cfg = bench_config(ref.kernel, ref.smooth_moments);
            emit_flux_profiles(rows.back().si,
                               rows.back().nda,
                               SpatialGrid(cfg.length_cm, cfg.cells),
                               output_dir / (cfg.label + "_flux.csv"));
        }
        catch (Error const& e)
        {
            failures += std::string(e.what()) + '\n';
        }
        // keep partial results on disk as each row completes
        write_table1(rows, output_dir / "table1.csv");
    }
    if (!failures.empty())
        throw Error("benchmark cases failed:\n" + failures);
    return rows;
}

//---------------------------------------------------------------------------//
}  // namespace bfp
