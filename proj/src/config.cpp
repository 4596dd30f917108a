#include "weyl/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "weyl/errors.hpp"
#include "yaml_nodes.hpp"

namespace weyl {

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& problem) const {
        std::ostringstream msg;
        msg << source_ << ":" << node.Mark().line + 1 << ": " << key << ": " << problem;
        throw ConfigError(msg.str());
    }

    void check_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) const {
        if (!map.IsMap()) fail(map, where, "expected a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, where.empty() ? key : where + "." + key, "unknown key");
        }
    }

    template <typename T>
    void read(const YAML::Node& map, const std::string& key, T& out, const std::string& where = "") const {
        const auto node = map[key];
        if (!node) return;
        try {
            out = node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, qualified(where, key), "cannot convert '" + scalar_text(node) + "'");
        }
    }

    double read_auto(const YAML::Node& node, const std::string& key, bool& is_auto) const {
        is_auto = false;
        try {
            if (node.IsScalar() && node.Scalar() == "auto") {
                is_auto = true;
                return 0.0;
            }
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, key, "expected a number or 'auto'");
        }
    }

    cplx read_complex(const YAML::Node& node, const std::string& key) const {
        if (!node.IsSequence() || node.size() != 2) fail(node, key, "expected [re, im]");
        try {
            return {node[0].as<double>(), node[1].as<double>()};
        } catch (const YAML::Exception&) {
            fail(node, key, "expected [re, im]");
        }
    }

    std::vector<cplx> read_complex_list(const YAML::Node& node, const std::string& key) const {
        if (!node.IsSequence()) fail(node, key, "expected a list of [re, im] pairs");
        std::vector<cplx> out;
        for (const auto& item : node) out.push_back(read_complex(item, key));
        return out;
    }

    template <typename F>
    auto wrap(const YAML::Node& node, const std::string& key, F&& f) const {
        try {
            return f();
        } catch (const ConfigError& e) {
            fail(node, key, e.what());
        } catch (const Error& e) {
            fail(node, key, e.what());
        } catch (const YAML::Exception& e) {
            fail(node, key, e.msg);
        }
    }

private:
    static std::string qualified(const std::string& where, const std::string& key) {
        return where.empty() ? key : where + "." + key;
    }
    static std::string scalar_text(const YAML::Node& node) { return node.IsScalar() ? node.Scalar() : "<non-scalar>"; }

    std::string source_;
};

TrigPoly read_terms(const Reader& rd, const YAML::Node& node, const std::string& key) {
    if (!node.IsSequence()) rd.fail(node, key, "expected a list of [k, re, im] triples");
    std::map<int, cplx> coeffs;
    for (const auto& term : node) {
        if (!term.IsSequence() || term.size() != 3) rd.fail(term, key, "terms must be [k, re, im]");
        try {
            coeffs[term[0].as<int>()] += cplx(term[1].as<double>(), term[2].as<double>());
        } catch (const YAML::Exception&) {
            rd.fail(term, key, "terms must be [k, re, im]");
        }
    }
    return TrigPoly(std::move(coeffs));
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

YAML::Node complex_node(cplx z) {
    YAML::Node n(YAML::NodeType::Sequence);
    n.SetStyle(YAML::EmitterStyle::Flow);
    n.push_back(num(z.real()));
    n.push_back(num(z.imag()));
    return n;
}

YAML::Node terms_node(const TrigPoly& u) {
    YAML::Node n(YAML::NodeType::Sequence);
    n.SetStyle(YAML::EmitterStyle::Flow);
    for (const auto& [k, c] : u.coeffs()) {
        YAML::Node t(YAML::NodeType::Sequence);
        t.SetStyle(YAML::EmitterStyle::Flow);
        t.push_back(k);
        t.push_back(num(c.real()));
        t.push_back(num(c.imag()));
        n.push_back(t);
    }
    return n;
}

YAML::Node rectangle_node(const Rectangle& r) {
    YAML::Node n;
    n.SetStyle(YAML::EmitterStyle::Flow);
    n["re_lo"] = num(r.re_lo);
    n["re_hi"] = num(r.re_hi);
    n["im_lo"] = num(r.im_lo);
    n["im_hi"] = num(r.im_hi);
    return n;
}

}  // namespace

LabConfig parse_config(const std::string& text, const std::string& source) {
    const Reader rd(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    LabConfig cfg;
    cfg.experiment.spec = make_symbol({TrigPoly::monomial(1), TrigPoly(), TrigPoly::constant(1.0)});
    if (root.IsNull()) return cfg;
    rd.check_keys(root, "",
                  {"symbol", "region", "omega", "h_list", "s", "eps", "kappa", "tau0", "mode", "delta_eff", "real_mode",
                   "n_trials", "master_seed", "K", "k_margin", "threads", "z_probes", "determinant_probes", "tube_r",
                   "rel_tol", "quad_n", "volume", "spectrum", "line_check", "identity"});

    ExperimentConfig& ex = cfg.experiment;
    if (auto n = root["symbol"]) {
        rd.check_keys(n, "symbol", {"order", "coefficients", "h_corrections"});
        if (!n["order"]) rd.fail(n, "symbol", "missing key 'order'");
        if (!n["coefficients"]) rd.fail(n, "symbol", "missing key 'coefficients'");
        for (const auto& sect : {"coefficients", "h_corrections"}) {
            if (!n[sect]) continue;
            if (!n[sect].IsSequence()) rd.fail(n[sect], std::string("symbol.") + sect, "expected a list");
            for (const auto& entry : n[sect]) rd.check_keys(entry, std::string("symbol.") + sect, {"alpha", "real", "terms"});
        }
        ex.spec = rd.wrap(n, "symbol", [&] { return symbol_from_node(n); });
    }
    if (auto n = root["region"]) ex.region = rd.wrap(n, "region", [&] { return region_from_node(n); });
    if (auto n = root["omega"]) ex.omega = rd.wrap(n, "omega", [&] { return region_from_node(n); });
    rd.read(root, "h_list", ex.h_list);
    rd.read(root, "s", ex.s);
    rd.read(root, "eps", ex.eps);
    if (auto n = root["kappa"]) {
        bool is_auto = false;
        const double v = rd.read_auto(n, "kappa", is_auto);
        ex.kappa = is_auto ? std::nullopt : std::optional<double>(v);
    }
    rd.read(root, "tau0", ex.tau0);
    if (auto n = root["mode"]) {
        const auto m = n.IsScalar() ? n.Scalar() : std::string();
        if (m == "paper") ex.mode = DeltaMode::paper;
        else if (m == "effective") ex.mode = DeltaMode::effective;
        else rd.fail(n, "mode", "expected 'paper' or 'effective'");
    }
    rd.read(root, "delta_eff", ex.delta_eff);
    rd.read(root, "real_mode", ex.real_mode);
    rd.read(root, "n_trials", ex.n_trials);
    rd.read(root, "master_seed", ex.master_seed);
    if (auto n = root["K"]) {
        bool is_auto = false;
        const double v = rd.read_auto(n, "K", is_auto);
        if (!is_auto && v != std::floor(v)) rd.fail(n, "K", "expected an integer or 'auto'");
        ex.K = is_auto ? std::nullopt : std::optional<int>(static_cast<int>(v));
    }
    rd.read(root, "k_margin", ex.k_margin);
    rd.read(root, "threads", ex.threads);
    if (auto n = root["z_probes"]) ex.z_probes = rd.read_complex_list(n, "z_probes");
    rd.read(root, "determinant_probes", ex.determinant_probes);
    rd.read(root, "tube_r", ex.tube_r);
    rd.read(root, "rel_tol", ex.rel_tol);
    rd.read(root, "quad_n", ex.quad_n);

    if (auto n = root["volume"]) {
        rd.check_keys(n, "volume", {"kappa_points", "t_lo", "t_hi", "n_points"});
        if (auto p = n["kappa_points"]) cfg.volume.kappa_points = rd.read_complex_list(p, "volume.kappa_points");
        rd.read(n, "t_lo", cfg.volume.t_lo, "volume");
        rd.read(n, "t_hi", cfg.volume.t_hi, "volume");
        rd.read(n, "n_points", cfg.volume.n_points, "volume");
    }
    if (auto n = root["spectrum"]) {
        rd.check_keys(n, "spectrum", {"trial", "box", "n_re", "n_im"});
        rd.read(n, "trial", cfg.spectrum.trial, "spectrum");
        if (auto b = n["box"]) {
            rd.check_keys(b, "spectrum.box", {"re_lo", "re_hi", "im_lo", "im_hi"});
            Rectangle r{};
            for (auto [key, field] : {std::pair{"re_lo", &r.re_lo}, {"re_hi", &r.re_hi}, {"im_lo", &r.im_lo}, {"im_hi", &r.im_hi}}) {
                if (!b[key]) rd.fail(b, "spectrum.box", std::string("missing key '") + key + "'");
                rd.read(b, key, *field, "spectrum.box");
            }
            cfg.spectrum.box = r;
        }
        rd.read(n, "n_re", cfg.spectrum.n_re, "spectrum");
        rd.read(n, "n_im", cfg.spectrum.n_im, "spectrum");
    }
    if (auto n = root["line_check"]) {
        rd.check_keys(n, "line_check", {"g", "h", "k_max", "K", "n_trials", "regions"});
        if (auto g = n["g"]) cfg.line_check.g = rd.wrap(g, "line_check.g", [&] { return read_terms(rd, g, "line_check.g"); });
        rd.read(n, "h", cfg.line_check.h, "line_check");
        rd.read(n, "k_max", cfg.line_check.k_max, "line_check");
        rd.read(n, "K", cfg.line_check.K, "line_check");
        rd.read(n, "n_trials", cfg.line_check.n_trials, "line_check");
        if (auto rs = n["regions"]) {
            if (!rs.IsSequence()) rd.fail(rs, "line_check.regions", "expected a list of regions");
            cfg.line_check.regions.clear();
            for (const auto& r : rs)
                cfg.line_check.regions.push_back(rd.wrap(r, "line_check.regions", [&] { return region_from_node(r); }));
        }
    }
    if (auto n = root["identity"]) {
        rd.check_keys(n, "identity", {"n_matrices", "dim", "n_psd", "psd_dim", "alpha", "t_probe", "chi_c"});
        rd.read(n, "n_matrices", cfg.identity.n_matrices, "identity");
        rd.read(n, "dim", cfg.identity.dim, "identity");
        rd.read(n, "n_psd", cfg.identity.n_psd, "identity");
        rd.read(n, "psd_dim", cfg.identity.psd_dim, "identity");
        rd.read(n, "alpha", cfg.identity.alpha, "identity");
        rd.read(n, "t_probe", cfg.identity.t_probe, "identity");
        rd.read(n, "chi_c", cfg.identity.chi_c, "identity");
    }
    return cfg;
}

LabConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string config_to_yaml(const LabConfig& cfg) {
    const ExperimentConfig& ex = cfg.experiment;
    YAML::Node root;
    root["symbol"] = YAML::Load(symbol_to_yaml(ex.spec));
    root["region"] = YAML::Load(region_to_yaml(ex.region));
    root["omega"] = YAML::Load(region_to_yaml(ex.omega));
    YAML::Node hl(YAML::NodeType::Sequence);
    hl.SetStyle(YAML::EmitterStyle::Flow);
    for (double h : ex.h_list) hl.push_back(num(h));
    root["h_list"] = hl;
    root["s"] = num(ex.s);
    root["eps"] = num(ex.eps);
    root["kappa"] = ex.kappa ? num(*ex.kappa) : std::string("auto");
    root["tau0"] = num(ex.tau0);
    root["mode"] = ex.mode == DeltaMode::paper ? "paper" : "effective";
    root["delta_eff"] = num(ex.delta_eff);
    root["real_mode"] = ex.real_mode;
    root["n_trials"] = ex.n_trials;
    root["master_seed"] = ex.master_seed;
    root["K"] = ex.K ? std::to_string(*ex.K) : std::string("auto");
    root["k_margin"] = num(ex.k_margin);
    if (!ex.z_probes.empty()) {
        YAML::Node zp(YAML::NodeType::Sequence);
        for (const auto& z : ex.z_probes) zp.push_back(complex_node(z));
        root["z_probes"] = zp;
    }
    root["determinant_probes"] = ex.determinant_probes;
    root["tube_r"] = num(ex.tube_r);
    root["rel_tol"] = num(ex.rel_tol);
    root["quad_n"] = ex.quad_n;

    YAML::Node vol;
    if (!cfg.volume.kappa_points.empty()) {
        YAML::Node kp(YAML::NodeType::Sequence);
        for (const auto& z : cfg.volume.kappa_points) kp.push_back(complex_node(z));
        vol["kappa_points"] = kp;
    }
    vol["t_lo"] = num(cfg.volume.t_lo);
    vol["t_hi"] = num(cfg.volume.t_hi);
    vol["n_points"] = cfg.volume.n_points;
    root["volume"] = vol;

    YAML::Node sp;
    sp["trial"] = cfg.spectrum.trial;
    if (cfg.spectrum.box) sp["box"] = rectangle_node(*cfg.spectrum.box);
    sp["n_re"] = cfg.spectrum.n_re;
    sp["n_im"] = cfg.spectrum.n_im;
    root["spectrum"] = sp;

    YAML::Node lc;
    lc["g"] = terms_node(cfg.line_check.g);
    lc["h"] = num(cfg.line_check.h);
    lc["k_max"] = cfg.line_check.k_max;
    lc["K"] = cfg.line_check.K;
    lc["n_trials"] = cfg.line_check.n_trials;
    YAML::Node regs(YAML::NodeType::Sequence);
    for (const auto& r : cfg.line_check.regions) regs.push_back(YAML::Load(region_to_yaml(r)));
    lc["regions"] = regs;
    root["line_check"] = lc;

    YAML::Node id;
    id["n_matrices"] = cfg.identity.n_matrices;
    id["dim"] = cfg.identity.dim;
    id["n_psd"] = cfg.identity.n_psd;
    id["psd_dim"] = cfg.identity.psd_dim;
    id["alpha"] = num(cfg.identity.alpha);
    id["t_probe"] = num(cfg.identity.t_probe);
    id["chi_c"] = num(cfg.identity.chi_c);
    root["identity"] = id;

    YAML::Emitter out;
    out << root;
    return std::string(out.c_str()) + "\n";
}

}  // namespace weyl
