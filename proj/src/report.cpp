#include "weyl/report.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace weyl {

namespace {

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson complex_list(const std::vector<cplx>& zs) {
    ojson arr = ojson::array();
    for (const auto& z : zs) arr.push_back({z.real(), z.imag()});
    return arr;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_h(double h) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", h);
    return buf;
}

ojson plan_json(const PerturbationPlan& plan) { return ojson::parse(plan_to_json(plan)); }

ojson trial_json(const TrialResult& t) {
    ojson j;
    j["trial"] = t.trial_index;
    j["seed"] = t.seed;
    j["count"] = t.count;
    j["prediction"] = t.prediction;
    j["relative_error"] = t.relative_error;
    j["sigma_min"] = t.sigma_min;
    ojson ld = ojson::array();
    for (const auto& v : t.log_det) ld.push_back(optional_number(v));
    j["log_det"] = ld;
    j["eigen_residual"] = t.eigen_residual;
    j["error"] = t.error ? ojson(*t.error) : ojson(nullptr);
    return j;
}

ojson report_json(const WeylReport& report, const LabConfig& config) {
    ojson j;
    j["schema"] = kReportSchema;
    j["config"] = config_to_yaml(config);
    j["c_fit"] = report.c_fit;
    j["tube_r"] = config.experiment.tube_r;
    j["rel_tol"] = config.experiment.rel_tol;
    j["z_probes"] = complex_list(config.experiment.probes());
    j["warnings"] = report.warnings;
    ojson per_h = ojson::array();
    for (const auto& hr : report.per_h) {
        ojson e;
        e["h"] = hr.h;
        e["K"] = hr.grid.K;
        e["dim"] = hr.grid.dim();
        e["volume"] = hr.volume;
        e["prediction"] = hr.prediction;
        e["tube_volume"] = hr.tube_volume;
        e["eps0"] = hr.eps0;
        e["bound_base"] = hr.bound_base;
        e["bound_rhs"] = hr.bound_rhs;
        e["median_rel_error"] = hr.median_rel_error;
        e["q1_rel_error"] = hr.q1_rel_error;
        e["q3_rel_error"] = hr.q3_rel_error;
        e["success_fraction_rel"] = hr.success_fraction_rel;
        e["success_fraction_bound"] = hr.success_fraction_bound;
        ojson ref = ojson::array();
        for (const auto& v : hr.logdet_reference) ref.push_back(optional_number(v));
        e["logdet_reference"] = ref;
        e["logdet_median_deviation"] = optional_number(hr.logdet_median_deviation);
        e["sigma_raised_fraction"] = hr.sigma_raised_fraction;
        e["guard_error"] = hr.guard_error ? ojson(*hr.guard_error) : ojson(nullptr);
        e["plan"] = plan_json(hr.plan);
        e["baseline"] = trial_json(hr.baseline);
        ojson trials = ojson::array();
        for (const auto& t : hr.trials) trials.push_back(trial_json(t));
        e["trials"] = trials;
        per_h.push_back(e);
    }
    j["per_h"] = per_h;
    return j;
}

ojson identity_json(const IdentityReport& rep) {
    ojson j;
    j["max_factorization_residual"] = rep.max_factorization_residual;
    j["max_block_residual"] = rep.max_block_residual;
    j["max_e_minus_plus_error"] = rep.max_e_minus_plus_error;
    j["min_t1"] = rep.min_t1;
    j["max_deriv_residual"] = rep.max_deriv_residual;
    ojson fac = ojson::array();
    for (const auto& c : rep.factorization)
        fac.push_back({{"index", c.index},
                       {"n_small", c.n_small},
                       {"t1", c.t1},
                       {"residual", c.residual},
                       {"block_residual", c.block_residual},
                       {"e_minus_plus_error", c.e_minus_plus_error}});
    j["factorization"] = fac;
    ojson der = ojson::array();
    for (const auto& c : rep.derivative) der.push_back({{"index", c.index}, {"deriv_residual", c.deriv_residual}});
    j["derivative"] = der;
    return j;
}

ojson line_check_json(const LineCheckResult& r) {
    ojson j;
    j["k"] = r.k;
    j["lambda"] = complex_list(r.lambda);
    j["residuals"] = r.residuals;
    j["max_tail"] = r.max_tail;
    j["max_imag_deviation"] = r.max_imag_deviation;
    return j;
}

void write_csv_header(std::ostream& out, const char* schema, const LabConfig& config) {
    out << "# schema: " << schema << "\n";
    std::istringstream cfg(config_to_yaml(config));
    for (std::string line; std::getline(cfg, line);) out << "# " << line << "\n";
}

void write_trials_csv(std::ostream& out, const WeylReport& report, const LabConfig& config) {
    write_csv_header(out, kTrialsSchema, config);
    out << "h,trial,seed,count,prediction,relative_error,min_sigma_min,eigen_residual,error\n";
    for (const auto& hr : report.per_h) {
        auto row = [&](const TrialResult& t) {
            double smin = std::numeric_limits<double>::infinity();
            for (double s : t.sigma_min) smin = std::min(smin, s);
            out << format_double(hr.h) << ',' << t.trial_index << ',' << t.seed << ',' << t.count << ','
                << format_double(t.prediction) << ',' << format_double(t.relative_error) << ','
                << (t.sigma_min.empty() ? std::string() : format_double(smin)) << ',' << format_double(t.eigen_residual)
                << ',';
            if (t.error) {
                std::string e = *t.error;
                for (auto& c : e)
                    if (c == ',' || c == '\n') c = ';';
                out << e;
            }
            out << '\n';
        };
        row(hr.baseline);
        for (const auto& t : hr.trials) row(t);
    }
}

void write_eigs_csv(std::ostream& out, const std::vector<cplx>& values, const LabConfig& config) {
    write_csv_header(out, kEigsSchema, config);
    out << "re,im\n";
    for (const auto& z : values) out << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
}

void write_pseudospec_csv(std::ostream& out, const std::vector<PseudospectrumPoint>& points, const LabConfig& config) {
    write_csv_header(out, kPseudospecSchema, config);
    out << "re,im,value\n";
    for (const auto& p : points) {
        out << format_double(p.z.real()) << ',' << format_double(p.z.imag()) << ',';
        if (!p.error) out << format_double(p.sigma_min);
        out << '\n';
    }
}

}  // namespace weyl
