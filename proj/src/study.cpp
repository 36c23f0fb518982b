#include "vem/study.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vem {

StudyKind parse_study_kind(const std::string& s)
{
    if (s == "convergence") return StudyKind::Convergence;
    if (s == "infsup") return StudyKind::InfSup;
    if (s == "patch") return StudyKind::Patch;
    throw std::invalid_argument("unknown study '" + s + "' (convergence|infsup|patch)");
}

SpaceVariant parse_variant(const std::string& s)
{
    if (s == "regular") return SpaceVariant::Regular;
    if (s == "enhanced") return SpaceVariant::Enhanced;
    throw std::invalid_argument("unknown variant '" + s + "' (regular|enhanced)");
}

RhsProjection parse_rhs_projection(const std::string& s)
{
    if (s == "full") return RhsProjection::Full;
    if (s == "reduced") return RhsProjection::Reduced;
    throw std::invalid_argument("unknown rhs projection '" + s + "' (full|reduced)");
}

std::string to_string(StudyKind kind)
{
    switch (kind) {
    case StudyKind::Convergence: return "convergence";
    case StudyKind::InfSup: return "infsup";
    case StudyKind::Patch: return "patch";
    }
    return "?";
}

std::string to_string(SpaceVariant variant) { return variant == SpaceVariant::Regular ? "regular" : "enhanced"; }
std::string to_string(RhsProjection rhs) { return rhs == RhsProjection::Full ? "full" : "reduced"; }

int StudyConfig::rhs_degree() const { return rhs == RhsProjection::Full ? k : std::max(0, k - 2); }

std::string StudyConfig::study_id() const
{
    std::ostringstream s;
    s << to_string(study) << '-' << family_char(family) << "-k" << k << "-kp" << k_pressure << '-'
      << to_string(variant) << '-' << to_string(rhs);
    return s.str();
}

std::vector<std::string> validate(const StudyConfig& c)
{
    if (c.k < 1 || c.k > 3) throw std::invalid_argument("order k must be 1, 2 or 3");
    if (c.k_pressure < 0 || c.k_pressure > c.k - 1) {
        throw std::invalid_argument("pressure order must satisfy 0 <= k_pressure <= k - 1");
    }
    if (c.level_min < 0 || c.level_max < c.level_min || c.level_max > 12) {
        throw std::invalid_argument("levels must satisfy 0 <= A <= B <= 12");
    }
    std::vector<std::string> flags;
    if (c.variant == SpaceVariant::Regular && c.rhs == RhsProjection::Full && c.k >= 2) {
        throw std::invalid_argument("the regular space cannot project the load onto P_k; use --rhs-projection reduced");
    }
    if (c.variant == SpaceVariant::Enhanced && c.rhs == RhsProjection::Reduced) {
        flags.push_back("reduced load projection in the enhanced space");
    }
    if (c.variant == SpaceVariant::Regular && c.study == StudyKind::Convergence) {
        flags.push_back("regular space: errors use the elliptic projection of u_h");
    }
    return flags;
}

int StudyResult::exit_status() const
{
    for (const auto& r : rows) {
        if (r.status == "error" || r.status == "FAIL") return 1;
    }
    return 0;
}

namespace {

DiscretizationConfig discretization(const StudyConfig& c)
{
    DiscretizationConfig d;
    d.k = c.k;
    d.k_pressure = c.k_pressure;
    d.variant = c.variant;
    d.rhs_degree = c.rhs_degree();
    return d;
}

void run_solve_level(const StudyConfig& c, const PolygonalMesh& mesh, StudyRow& row)
{
    const VemSpace space(mesh, discretization(c));
    row.n_dofs = space.dofs().n_velocity() + space.dofs().n_pressure();
    const bool patch = c.study == StudyKind::Patch;
    const ExactSolution exact = patch ? polynomial_solution(c.k, c.k_pressure) : manufactured();
    const SaddleSystem sys = assemble(space, exact.f);
    if (c.dump_system && !c.out_dir.empty()) {
        dump_system(sys, c.out_dir + "/" + c.study_id() + "-L" + std::to_string(row.level));
    }
    const BoundaryData bc = interpolate_boundary(space, exact.u);
    const ReducedSystem reduced = apply_dirichlet(sys, space.dofs(), bc);
    row.kernel_dim = pressure_kernel_dimension(reduced);
    SolveOptions opt;
    opt.allow_minimum_norm = patch;
    opt.context = c.study_id() + " level " + std::to_string(row.level);
    const StokesSolution sol = solve_saddle(reduced, opt);
    row.residual = sol.residual;
    row.minimum_norm = sol.minimum_norm;
    row.errors = compute_errors(space, sol, exact);
    row.has_errors = true;
    row.orthogonality = orthogonality_check(space, sys, sol, exact).relative;
    if (patch) {
        const auto& e = row.errors;
        const bool pass = e.h1_velocity_rel <= kPatchTolerance && e.l2_velocity_rel <= kPatchTolerance &&
                          e.l2_pressure_rel <= kPatchTolerance;
        row.status = pass ? "PASS" : "FAIL";
    } else {
        row.status = "ok";
    }
}

void run_infsup_level(const StudyConfig& c, const PolygonalMesh& mesh, StudyRow& row)
{
    const GlobalDofMap dofs = build_dof_map(mesh, c.k, c.k_pressure);
    row.n_dofs = dofs.n_velocity() + dofs.n_pressure();
    const InfSupReport rep = infsup_constant(mesh, c.k, c.k_pressure, c.variant);
    row.beta = rep.beta;
    row.has_beta = true;
    row.beta_monomial = rep.beta_monomial;
    row.kernel_dim = rep.kernel_dim;
    row.ambiguous = rep.ambiguous;
    row.status = "ok";
}

}  // namespace

StudyResult run_study(const StudyConfig& config)
{
    using clock = std::chrono::steady_clock;
    StudyResult result;
    result.config = config;
    result.flags = validate(config);
    const auto start = clock::now();
    if (!config.mesh_out.empty()) std::filesystem::create_directories(config.mesh_out);

    for (int level = config.level_min; level <= config.level_max; ++level) {
        StudyRow row;
        row.level = level;
        const auto t0 = clock::now();
        try {
            const PolygonalMesh mesh = generate_family(config.family, level, config.seed);
            row.h = mesh.h;
            row.n_elements = static_cast<int>(mesh.num_elements());
            if (!config.mesh_out.empty()) {
                write_mesh(config.mesh_out + "/" + std::string(1, family_char(config.family)) + "-L" +
                               std::to_string(level) + ".json",
                           mesh);
            }
            if (config.study == StudyKind::InfSup) {
                run_infsup_level(config, mesh, row);
            } else {
                run_solve_level(config, mesh, row);
            }
        } catch (const SingularSystemError& err) {
            row.status = "singular";
            row.message = err.what();
        } catch (const std::exception& err) {
            row.status = "error";
            row.message = err.what();
        }
        row.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        result.rows.push_back(std::move(row));
    }

    // Rates over consecutive levels that both produced errors.
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        StudyRow& b = result.rows[i];
        const StudyRow& a = result.rows[i - 1];
        if (!a.has_errors || !b.has_errors || config.study != StudyKind::Convergence) continue;
        b.rate_h1_u = convergence_rate(a.errors.h1_velocity_rel, b.errors.h1_velocity_rel, a.h, b.h);
        b.rate_l2_u = convergence_rate(a.errors.l2_velocity_rel, b.errors.l2_velocity_rel, a.h, b.h);
        b.rate_l2_p = convergence_rate(a.errors.l2_pressure_rel, b.errors.l2_pressure_rel, a.h, b.h);
        b.has_rates = true;
    }
    for (const auto& r : result.rows) {
        if (r.has_errors && r.errors.pressure_absolute) {
            result.flags.push_back("exact pressure is zero: absolute pressure error reported");
            break;
        }
    }
    result.seconds = std::chrono::duration<double>(clock::now() - start).count();
    return result;
}

namespace {

std::string num(double v)
{
    if (!std::isfinite(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

nlohmann::json json_number(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string study_csv(const StudyResult& result)
{
    std::ostringstream out;
    out << "study_id,family,level,h,n_elements,n_dofs,err_h1_u,err_l2_u,err_l2_p,div_l2,rate_h1_u,rate_l2_u,"
           "rate_l2_p,beta,status\n";
    const std::string id = result.config.study_id();
    for (const auto& r : result.rows) {
        out << id << ',' << family_char(result.config.family) << ',' << r.level << ',' << num(r.h) << ','
            << r.n_elements << ',' << r.n_dofs << ',';
        if (r.has_errors) {
            out << num(r.errors.h1_velocity_rel) << ',' << num(r.errors.l2_velocity_rel) << ','
                << num(r.errors.l2_pressure_rel) << ',' << num(r.errors.div_l2) << ',';
        } else {
            out << ",,,,";
        }
        if (r.has_rates) {
            out << num(r.rate_h1_u) << ',' << num(r.rate_l2_u) << ',' << num(r.rate_l2_p) << ',';
        } else {
            out << ",,,";
        }
        out << (r.has_beta ? num(r.beta) : "") << ',' << r.status << '\n';
    }
    return out.str();
}

std::string study_json(const StudyResult& result)
{
    const StudyConfig& c = result.config;
    nlohmann::json doc;
    doc["study_id"] = c.study_id();
    doc["config"] = {{"study", to_string(c.study)},
                     {"family", std::string(1, family_char(c.family))},
                     {"levels", {c.level_min, c.level_max}},
                     {"k", c.k},
                     {"k_pressure", c.k_pressure},
                     {"variant", to_string(c.variant)},
                     {"rhs_projection", to_string(c.rhs)},
                     {"rhs_degree", c.rhs_degree()},
                     {"seed", c.seed}};
    doc["flags"] = result.flags;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : result.rows) {
        nlohmann::json j;
        j["level"] = r.level;
        j["h"] = r.h;
        j["n_elements"] = r.n_elements;
        j["n_dofs"] = r.n_dofs;
        j["status"] = r.status;
        if (!r.message.empty()) j["message"] = r.message;
        if (r.has_errors) {
            j["err_h1_u"] = json_number(r.errors.h1_velocity_rel);
            j["err_l2_u"] = json_number(r.errors.l2_velocity_rel);
            j["err_l2_p"] = json_number(r.errors.l2_pressure_rel);
            j["div_l2"] = json_number(r.errors.div_l2);
            j["residual"] = json_number(r.residual);
            j["orthogonality"] = json_number(r.orthogonality);
            j["minimum_norm_solve"] = r.minimum_norm;
        }
        if (r.has_rates) {
            j["rate_h1_u"] = json_number(r.rate_h1_u);
            j["rate_l2_u"] = json_number(r.rate_l2_u);
            j["rate_l2_p"] = json_number(r.rate_l2_p);
        }
        if (r.has_beta) {
            j["beta"] = r.beta;
            j["beta_monomial"] = r.beta_monomial;
            j["ambiguous_kernel"] = r.ambiguous;
        }
        j["kernel_dim"] = r.kernel_dim;
        j["wall_seconds"] = r.seconds;
        rows.push_back(std::move(j));
    }
    doc["rows"] = std::move(rows);
    doc["wall_seconds"] = result.seconds;
    doc["exit_status"] = result.exit_status();
    return doc.dump(2) + "\n";
}

void write_study_outputs(const StudyResult& result)
{
    const std::string& dir = result.config.out_dir;
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    const std::string base = dir + "/" + result.config.study_id();
    {
        std::ofstream out(base + ".csv");
        if (!out) throw std::runtime_error("cannot write " + base + ".csv");
        out << study_csv(result);
    }
    std::ofstream out(base + ".json");
    if (!out) throw std::runtime_error("cannot write " + base + ".json");
    out << study_json(result);
}

}  // namespace vem
