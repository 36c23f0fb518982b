#pragma once

#include "vem/analysis.hpp"
#include "vem/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vem {

enum class StudyKind { Convergence, InfSup, Patch };

/// Full: load projected onto P_k. Reduced: onto P_{max(0, k-2)}.
enum class RhsProjection { Full, Reduced };

StudyKind parse_study_kind(const std::string& s);
SpaceVariant parse_variant(const std::string& s);
RhsProjection parse_rhs_projection(const std::string& s);
std::string to_string(StudyKind kind);
std::string to_string(SpaceVariant variant);
std::string to_string(RhsProjection rhs);

struct StudyConfig {
    StudyKind study = StudyKind::Convergence;
    Family family = Family::b;
    int level_min = 1;
    int level_max = 4;
    int k = 2;
    int k_pressure = 1;
    SpaceVariant variant = SpaceVariant::Enhanced;
    RhsProjection rhs = RhsProjection::Full;
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir;      // empty: no files written
    bool dump_system = false; // Matrix Market files per level under out_dir
    std::string mesh_out;     // directory for the generated meshes; empty: none

    int rhs_degree() const;
    std::string study_id() const;
};

/// Throws std::invalid_argument for inconsistent settings and returns the
/// list of non-fatal flags (for example reduced load in the enhanced space).
std::vector<std::string> validate(const StudyConfig& config);

inline constexpr double kPatchTolerance = 1e-9;

struct StudyRow {
    int level = 0;
    double h = 0.0;
    int n_elements = 0;
    int n_dofs = 0;
    ErrorReport errors;
    bool has_errors = false;
    double rate_h1_u = 0.0;
    double rate_l2_u = 0.0;
    double rate_l2_p = 0.0;
    bool has_rates = false;
    double beta = 0.0;
    bool has_beta = false;
    std::string status;  // ok | singular | error | PASS | FAIL
    std::string message;

    // Summary-only diagnostics.
    double seconds = 0.0;
    double residual = 0.0;
    double orthogonality = 0.0;
    double beta_monomial = 0.0;
    int kernel_dim = 0;
    bool ambiguous = false;
    bool minimum_norm = false;
};

struct StudyResult {
    StudyConfig config;
    std::vector<std::string> flags;
    std::vector<StudyRow> rows;
    double seconds = 0.0;

    /// Non-zero iff a level failed for a reason other than expected instability.
    int exit_status() const;
};

StudyResult run_study(const StudyConfig& config);

/// Fixed-column CSV; timing is kept out so that output is reproducible.
std::string study_csv(const StudyResult& result);
std::string study_json(const StudyResult& result);

/// Writes <out_dir>/<study_id>.csv and .json.
void write_study_outputs(const StudyResult& result);

}  // namespace vem
