//---------------------------------------------------------------------------//
//! \file tools/bfp_cli.cpp
//! Command-line front end: single solves, dense oracle, benchmark matrix.
//---------------------------------------------------------------------------//
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bfp/config.hpp"
#include "bfp/harness.hpp"

namespace
{
bfp::RunConfig load_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw bfp::Error("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return bfp::parse_config(ss.str());
}

void print_summary(bfp::CaseResult const& result)
{
    for (auto const& r : result.reports)
    {
        std::cout << bfp::to_string(r.method) << ": iterations=" << r.iterations
                  << " converged=" << (r.converged ? "yes" : "no")
                  << " wall=" << r.wall_seconds << "s\n";
    }
    for (auto const& f : result.files)
        std::cout << "wrote " << f.string() << '\n';
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Slab Boltzmann-Fokker-Planck solver with nonlinear "
                 "diffusion acceleration"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;

    auto* solve = app.add_subcommand("solve", "run one configured case");
    solve->add_option("--config", config_path, "key=value config file")
        ->required();
    solve->add_option("--output-dir", output_dir, "override output_dir");

    auto* oracle = app.add_subcommand("oracle", "dense direct solve of a case");
    oracle->add_option("--config", config_path, "key=value config file")
        ->required();
    oracle->add_option("--output-dir", output_dir, "override output_dir");

    auto* bench = app.add_subcommand("bench", "benchmark matrices");
    bench->require_subcommand(1);
    auto* table1 = bench->add_subcommand("table1", "SI vs NDA iteration table");
    table1->add_option("--output-dir", output_dir, "output directory")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*solve || *oracle)
        {
            auto cfg = load_config(config_path);
            if (!output_dir.empty())
                cfg.output_dir = output_dir;
            if (*oracle)
                cfg.method = bfp::RunMethod::oracle;
            auto result = bfp::run_case(cfg);
            print_summary(result);
            return result.all_converged() ? 0 : 1;
        }
        auto rows = bfp::run_table1_bench(output_dir);
        bool ok = true;
        std::cout << "kernel  B   SI   NDA  speedup  flux_diff  status\n";
        for (auto const& r : rows)
        {
            std::cout << (r.reference.kernel == bfp::KernelKind::hgk ? "HGK"
                                                                     : "SRK")
                      << std::setw(5) << r.reference.smooth_moments
                      << std::setw(6) << r.si.iterations << std::setw(6)
                      << r.nda.iterations << std::setw(9)
                      << std::setprecision(3) << r.speedup_iter()
                      << std::setw(11) << r.flux_difference << "  "
                      << (r.pass() ? "pass" : "FAIL") << '\n';
            ok = ok && r.pass();
        }
        std::cout << "wrote " << (std::filesystem::path(output_dir) / "table1.csv")
                  << '\n';
        return ok ? 0 : 1;
    }
    catch (bfp::ConfigError const& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (bfp::Error const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
