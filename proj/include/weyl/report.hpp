#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "weyl/config.hpp"
#include "weyl/experiments.hpp"
#include "weyl/identities.hpp"

namespace weyl {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "weyllab.report.v1";
inline constexpr const char* kTrialsSchema = "weyllab.trials.v1";
inline constexpr const char* kEigsSchema = "weyllab.eigs.v1";
inline constexpr const char* kPseudospecSchema = "weyllab.pseudospec.v1";

/// "%.17g"; round-trips every double.
std::string format_double(double v);

/// Short form used in file names, e.g. 0.01 -> "0.01".
std::string format_h(double h);

ojson plan_json(const PerturbationPlan& plan);
ojson trial_json(const TrialResult& trial);
ojson report_json(const WeylReport& report, const LabConfig& config);
ojson identity_json(const IdentityReport& report);
ojson line_check_json(const LineCheckResult& result);

/// Header block shared by every CSV: schema on row 1, then the resolved
/// config as '#'-prefixed lines.
void write_csv_header(std::ostream& out, const char* schema, const LabConfig& config);

/// One row per (h, trial), baseline rows carry trial = -1.
void write_trials_csv(std::ostream& out, const WeylReport& report, const LabConfig& config);

/// Columns re, im.
void write_eigs_csv(std::ostream& out, const std::vector<cplx>& values, const LabConfig& config);

/// Columns re, im, value (smallest singular value; empty when the solve failed).
void write_pseudospec_csv(std::ostream& out, const std::vector<PseudospectrumPoint>& points, const LabConfig& config);

}  // namespace weyl
