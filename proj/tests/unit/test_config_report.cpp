#include <doctest.h>

#include <sstream>
#include <string>

#include "weyl/config.hpp"
#include "weyl/errors.hpp"
#include "weyl/report.hpp"

using namespace weyl;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "lab.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

LabConfig tiny() {
    LabConfig c = parse_config("h_list: [0.1]\nn_trials: 2\nmaster_seed: 5\nquad_n: 200\n");
    return c;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const LabConfig c = parse_config("");
    CHECK(c.experiment.spec.order == 2);
    CHECK(c.experiment.kappa_value() == 0.25);
    CHECK_NOTHROW(validate_config(c.experiment));
}

TEST_CASE("config errors carry source, line and key") {
    CHECK(error_of("s: 2\nbogus: 1\n") == "lab.yaml:2: bogus: unknown key");
    CHECK(error_of("s: 2\nvolume:\n  t_lo: 1e-4\n  nope: 3\n") == "lab.yaml:4: volume.nope: unknown key");
    CHECK(error_of("eps: abc\n").rfind("lab.yaml:1: eps:", 0) == 0);
    CHECK(error_of("mode: sloppy\n") == "lab.yaml:1: mode: expected 'paper' or 'effective'");
    CHECK(error_of("K: 2.5\n") == "lab.yaml:1: K: expected an integer or 'auto'");
    CHECK(error_of("z_probes: [[1, 2, 3]]\n") == "lab.yaml:1: z_probes: expected [re, im]");
    CHECK(error_of("s: [1,\n").rfind("lab.yaml:", 0) == 0);
}

TEST_CASE("auto values") {
    const LabConfig c = parse_config("kappa: auto\nK: auto\n");
    CHECK_FALSE(c.experiment.kappa.has_value());
    CHECK_FALSE(c.experiment.K.has_value());
    CHECK(parse_config("kappa: 0.5\nK: 40\n").experiment.K == 40);
}

TEST_CASE("missing file names the path") {
    try {
        load_config("/nonexistent/dir/lab.yaml");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/lab.yaml") != std::string::npos);
    }
}

TEST_CASE("resolved config round trips") {
    const std::string text =
        "h_list: [0.05, 0.02]\n"
        "s: 3\n"
        "eps: 0.25\n"
        "kappa: 0.5\n"
        "mode: paper\n"
        "n_trials: 7\n"
        "master_seed: 123\n"
        "K: 60\n"
        "z_probes: [[0.1, 0.2], [-0.3, 0.4]]\n"
        "region: {type: disk, center: [0.25, 0.5], radius: 0.3}\n"
        "volume: {t_lo: 0.001, n_points: 5}\n"
        "spectrum: {trial: -1, box: {re_lo: -1, re_hi: 1, im_lo: -1, im_hi: 1}}\n"
        "identity: {n_matrices: 9, alpha: 0.2}\n";
    const LabConfig c = parse_config(text);
    const std::string once = config_to_yaml(c);
    const LabConfig back = parse_config(once);
    CHECK(config_to_yaml(back) == once);
    CHECK(back.experiment.h_list == std::vector<double>{0.05, 0.02});
    CHECK(back.experiment.master_seed == 123);
    CHECK(back.experiment.K == 60);
    CHECK(back.experiment.z_probes == c.experiment.z_probes);
    CHECK(back.spectrum.trial == -1);
    CHECK(back.identity.n_matrices == 9);
    CHECK(back.volume.t_lo == 0.001);

    LabConfig threaded = c;
    threaded.experiment.threads = 8;
    CHECK(config_to_yaml(threaded) == once);
}

TEST_CASE("doubles round trip through text") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_h(0.01) == "0.01");
    CHECK(format_h(0.05) == "0.05");
}

TEST_CASE("csv files start with the schema and the config") {
    const LabConfig c = tiny();
    std::ostringstream out;
    write_eigs_csv(out, {cplx(1.0, -2.0), cplx(0.5, 0.0)}, c);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == std::string("# schema: ") + kEigsSchema);
    int comment_lines = 0;
    while (std::getline(in, line) && line.rfind("#", 0) == 0) ++comment_lines;
    CHECK(comment_lines > 3);
    CHECK(line == "re,im");
    std::getline(in, line);
    CHECK(line == "1,-2");
}

TEST_CASE("reports embed the config and do not depend on threads") {
    LabConfig c = tiny();
    c.experiment.threads = 1;
    const WeylReport serial = run_ensemble(c.experiment);
    const ojson a = report_json(serial, c);
    CHECK(a["schema"] == kReportSchema);
    CHECK(a["config"] == config_to_yaml(c));
    std::ostringstream csv_a;
    write_trials_csv(csv_a, serial, c);

    c.experiment.threads = 4;
    const WeylReport parallel = run_ensemble(c.experiment);
    const ojson b = report_json(parallel, c);
    std::ostringstream csv_b;
    write_trials_csv(csv_b, parallel, c);
    CHECK(a.dump() == b.dump());
    CHECK(csv_a.str() == csv_b.str());
}
