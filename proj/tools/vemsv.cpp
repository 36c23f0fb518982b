// Command-line driver for the convergence, inf-sup and patch studies.

#include "vem/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <regex>

namespace {

void parse_levels(const std::string& text, vem::StudyConfig& config)
{
    static const std::regex pattern(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) {
        throw CLI::ValidationError("--levels", "expected A..B or a single level, got '" + text + "'");
    }
    config.level_min = std::stoi(m[1].str());
    config.level_max = m[2].matched ? std::stoi(m[2].str()) : config.level_min;
}

void print_table(const vem::StudyResult& r)
{
    std::printf("%-5s %-10s %-6s %-11s %-11s %-11s %-11s %-6s %-6s %-6s %-10s %s\n", "level", "h", "cells",
                "err_h1_u", "err_l2_u", "err_l2_p", "div_l2", "r_h1", "r_l2", "r_p", "beta", "status");
    for (const auto& row : r.rows) {
        std::printf("%-5d %-10.4g %-6d ", row.level, row.h, row.n_elements);
        if (row.has_errors) {
            std::printf("%-11.3e %-11.3e %-11.3e %-11.3e ", row.errors.h1_velocity_rel, row.errors.l2_velocity_rel,
                        row.errors.l2_pressure_rel, row.errors.div_l2);
        } else {
            std::printf("%-11s %-11s %-11s %-11s ", "-", "-", "-", "-");
        }
        if (row.has_rates) {
            std::printf("%-6.2f %-6.2f %-6.2f ", row.rate_h1_u, row.rate_l2_u, row.rate_l2_p);
        } else {
            std::printf("%-6s %-6s %-6s ", "-", "-", "-");
        }
        if (row.has_beta) {
            std::printf("%-10.4g ", row.beta);
        } else {
            std::printf("%-10s ", "-");
        }
        std::printf("%s\n", row.status.c_str());
        if (!row.message.empty()) std::printf("      %s\n", row.message.c_str());
    }
    for (const auto& flag : r.flags) std::printf("note: %s\n", flag.c_str());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Divergence-free virtual elements for 2D Stokes: convergence, inf-sup and patch studies"};
    vem::StudyConfig config;
    std::string study = "convergence";
    std::string family = "b";
    std::string levels = "1..4";
    std::string variant = "enhanced";
    std::string rhs = "full";
    int k_pressure = -1;

    app.add_option("--study", study, "convergence | infsup | patch")->capture_default_str();
    app.add_option("--family", family, "mesh family a..f")->capture_default_str();
    app.add_option("--levels", levels, "refinement levels A..B")->capture_default_str();
    app.add_option("--order,-k", config.k, "velocity order k (1..3)")->capture_default_str();
    app.add_option("--pressure-order", k_pressure, "pressure order (default k-1)");
    app.add_option("--variant", variant, "regular | enhanced")->capture_default_str();
    app.add_option("--rhs-projection", rhs, "full (P_k) | reduced (P_max(0,k-2))")->capture_default_str();
    app.add_option("--seed", config.seed, "mesh generator seed")->capture_default_str();
    app.add_option("--out", config.out_dir, "output directory for the CSV table and JSON summary");
    app.add_flag("--dump-system", config.dump_system, "write A, B, f in Matrix Market format per level");
    app.add_option("--mesh-out", config.mesh_out, "directory receiving the generated meshes");
    app.footer("Element loops use VEMSV_THREADS worker threads (default: all cores).");

    CLI11_PARSE(app, argc, argv);

    try {
        config.study = vem::parse_study_kind(study);
        config.family = vem::parse_family(family);
        parse_levels(levels, config);
        config.variant = vem::parse_variant(variant);
        config.rhs = vem::parse_rhs_projection(rhs);
        config.k_pressure = k_pressure < 0 ? config.k - 1 : k_pressure;
        if (config.dump_system && config.out_dir.empty()) {
            throw std::invalid_argument("--dump-system needs --out");
        }
        const vem::StudyResult result = vem::run_study(config);
        std::printf("%s\n", config.study_id().c_str());
        print_table(result);
        vem::write_study_outputs(result);
        return result.exit_status();
    } catch (const std::exception& err) {
        std::cerr << "vemsv: " << err.what() << '\n';
        return 2;
    }
}
