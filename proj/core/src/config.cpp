#include "wavekin/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wavekin/errors.hpp"

namespace wavekin {

using nlohmann::json;

GridPtr GridSpec::build() const {
    return std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(kind, omega_min, omega_max, cells, rep));
}

SpectralState RunConfig::build_initial(const GridPtr& g) const {
    if (const auto* tail = std::get_if<PowerLawTailInit>(&init))
        return init_power_law_tail(g, tail->C_in, tail->c_in, tail->r0);
    const auto& table = std::get<TableInit>(init);
    std::ifstream f(table.path);
    if (!f) throw DataError("init: cannot open state table " + table.path);
    SpectralState s = read_snapshot_csv(f);
    if (!(*s.grid == *g))
        throw ConfigError("init: state table grid does not match the configured grid");
    s.grid = g;
    return s;
}

namespace {

// Strict field extraction: every key must be known, types must match.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError("config: section " + name_ + " must be an object");
    }
    ~Section() = default;

    double num(const char* key, double dflt) {
        mark(key);
        if (!j_.contains(key)) return dflt;
        if (!j_[key].is_number()) fail(key, "a number");
        return j_[key].get<double>();
    }
    int integer(const char* key, int dflt) {
        mark(key);
        if (!j_.contains(key)) return dflt;
        if (!j_[key].is_number_integer()) fail(key, "an integer");
        return j_[key].get<int>();
    }
    bool boolean(const char* key, bool dflt) {
        mark(key);
        if (!j_.contains(key)) return dflt;
        if (!j_[key].is_boolean()) fail(key, "a boolean");
        return j_[key].get<bool>();
    }
    std::string str(const char* key, const std::string& dflt) {
        mark(key);
        if (!j_.contains(key)) return dflt;
        if (!j_[key].is_string()) fail(key, "a string");
        return j_[key].get<std::string>();
    }
    std::vector<double> num_list(const char* key, std::vector<double> dflt) {
        mark(key);
        if (!j_.contains(key)) return dflt;
        if (!j_[key].is_array()) fail(key, "an array of numbers");
        return j_[key].get<std::vector<double>>();
    }
    std::vector<int> int_list(const char* key, std::vector<int> dflt) {
        mark(key);
        if (!j_.contains(key)) return dflt;
        if (!j_[key].is_array()) fail(key, "an array of integers");
        return j_[key].get<std::vector<int>>();
    }
    std::optional<double> opt_num(const char* key) {
        mark(key);
        if (!j_.contains(key) || j_[key].is_null()) return std::nullopt;
        if (!j_[key].is_number()) fail(key, "a number or null");
        return j_[key].get<double>();
    }
    std::optional<int> opt_int(const char* key) {
        mark(key);
        if (!j_.contains(key) || j_[key].is_null()) return std::nullopt;
        if (!j_[key].is_number_integer()) fail(key, "an integer or null");
        return j_[key].get<int>();
    }
    bool has(const char* key) {
        mark(key);
        return j_.contains(key);
    }
    const json& raw(const char* key) { return j_.at(key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw ConfigError("config: unknown key \"" + it.key() + "\" in section " +
                                  name_);
    }

private:
    void mark(const char* key) { seen_.emplace_back(key); }
    [[noreturn]] void fail(const char* key, const char* what) const {
        throw ConfigError("config: " + name_ + "." + key + " must be " + what);
    }
    const json& j_;
    std::string name_;
    std::vector<std::string> seen_;
};

RunConfig parse_json(const json& root) {
    if (!root.is_object()) throw ConfigError("config: document root must be an object");
    RunConfig cfg;

    Section top(root, "top level");
    const std::string schema = top.str("schema", "wavekin-config-v1");
    if (schema != "wavekin-config-v1")
        throw ConfigError("config: unsupported schema \"" + schema + "\"");

    if (top.has("kernel")) {
        Section k(top.raw("kernel"), "kernel");
        cfg.dispersion.theta = k.num("theta", cfg.dispersion.theta);
        cfg.dispersion.c_omega = k.num("c_omega", cfg.dispersion.c_omega);
        cfg.exponents.varpi1 = k.num("varpi1", cfg.exponents.varpi1);
        cfg.exponents.varpi2 = k.num("varpi2", cfg.exponents.varpi2);
        cfg.exponents.varpi3 = k.num("varpi3", cfg.exponents.varpi3);
        cfg.exponents.kappa2 = k.num("kappa2", cfg.exponents.kappa2);
        cfg.exponents.gamma = k.num("gamma", cfg.exponents.gamma);
        cfg.exponents.alpha = k.num("alpha", cfg.exponents.alpha);
        cfg.exponents.c_p = k.num("c_p", cfg.exponents.c_p);
        cfg.exponents.c_r = k.num("c_r", cfg.exponents.c_r);
        cfg.exponents.c_q = k.num("c_q", cfg.exponents.c_q);
        cfg.exponents.c_rprime = k.num("c_rprime", cfg.exponents.c_rprime);
        cfg.couplings.c12 = k.num("c12", cfg.couplings.c12);
        cfg.couplings.c22 = k.num("c22", cfg.couplings.c22);
        cfg.couplings.c31 = k.num("c31", cfg.couplings.c31);
        cfg.toggles.c12 = k.boolean("enable_c12", cfg.toggles.c12);
        cfg.toggles.c22 = k.boolean("enable_c22", cfg.toggles.c22);
        cfg.toggles.c31 = k.boolean("enable_c31", cfg.toggles.c31);
        cfg.toggles.use_ro_factor = k.boolean("use_ro_factor", cfg.toggles.use_ro_factor);
        k.finish();
    }

    if (top.has("grid")) {
        Section g(top.raw("grid"), "grid");
        const std::string kind = g.str("kind", "geometric");
        if (kind == "geometric")
            cfg.grid.kind = GridKind::geometric;
        else if (kind == "uniform")
            cfg.grid.kind = GridKind::uniform;
        else
            throw ConfigError("config: grid.kind must be \"uniform\" or \"geometric\"");
        cfg.grid.omega_min = g.num("omega_min", cfg.grid.omega_min);
        cfg.grid.omega_max = g.num("omega_max", cfg.grid.omega_max);
        cfg.grid.cells = g.integer("cells", cfg.grid.cells);
        const std::string rep = g.str("rep", "auto");
        if (rep == "auto")
            cfg.grid.rep = RepRule::automatic;
        else if (rep == "midpoint")
            cfg.grid.rep = RepRule::midpoint;
        else if (rep == "geometric_mean")
            cfg.grid.rep = RepRule::geometric_mean;
        else
            throw ConfigError("config: grid.rep must be auto|midpoint|geometric_mean");
        g.finish();
    }

    if (top.has("init")) {
        Section s(top.raw("init"), "init");
        const std::string kind = s.str("kind", "power_law_tail");
        if (kind == "power_law_tail") {
            PowerLawTailInit t;
            t.C_in = s.num("C_in", t.C_in);
            t.c_in = s.num("c_in", t.c_in);
            t.r0 = s.num("r0", t.r0);
            cfg.init = t;
        } else if (kind == "table") {
            TableInit t;
            t.path = s.str("path", "");
            if (t.path.empty()) throw ConfigError("config: init.path required for table init");
            cfg.init = t;
        } else {
            throw ConfigError("config: init.kind must be power_law_tail|table");
        }
        s.finish();
    }

    if (top.has("step")) {
        Section s(top.raw("step"), "step");
        const std::string method = s.str("method", "euler");
        if (method == "euler")
            cfg.step.method = StepMethod::euler;
        else if (method == "heun")
            cfg.step.method = StepMethod::heun;
        else
            throw ConfigError("config: step.method must be euler|heun");
        cfg.step.dt_init = s.num("dt_init", cfg.step.dt_init);
        cfg.step.dt_min = s.num("dt_min", cfg.step.dt_min);
        cfg.step.dt_max = s.num("dt_max", std::max(cfg.step.dt_max, cfg.step.dt_init));
        cfg.step.safety = s.num("safety", cfg.step.safety);
        cfg.step.t_end = s.num("t_end", cfg.step.t_end);
        cfg.step.snapshot_stride = s.integer("snapshot_stride", cfg.step.snapshot_stride);
        s.finish();
    }

    if (top.has("diagnostics")) {
        Section d(top.raw("diagnostics"), "diagnostics");
        cfg.step.probe_R = d.num_list("probe_R", cfg.step.probe_R);
        cfg.diagnostics.ddm_levels = d.int_list("ddm_levels", cfg.diagnostics.ddm_levels);
        cfg.diagnostics.epsilon = d.num("epsilon", cfg.diagnostics.epsilon);
        cfg.diagnostics.sigma = d.num("sigma", cfg.diagnostics.sigma);
        cfg.diagnostics.c_o = d.num("c_o", cfg.diagnostics.c_o);
        cfg.diagnostics.lambda = d.opt_num("lambda");
        cfg.diagnostics.tstar_tol = d.num("tstar_tol", cfg.diagnostics.tstar_tol);
        cfg.diagnostics.upsilon_override = d.opt_int("upsilon_override");
        const std::string integrand = d.str("level_set_integrand", "mass");
        if (integrand == "mass")
            cfg.diagnostics.level_set_energy = false;
        else if (integrand == "energy")
            cfg.diagnostics.level_set_energy = true;
        else
            throw ConfigError("config: diagnostics.level_set_integrand must be mass|energy");
        d.finish();
    }
    if (const auto* tail = std::get_if<PowerLawTailInit>(&cfg.init))
        cfg.diagnostics.c_in = tail->c_in;

    if (top.has("output")) {
        Section o(top.raw("output"), "output");
        cfg.out_dir = o.str("dir", cfg.out_dir);
        o.finish();
    }

    if (top.has("sweep")) {
        Section s(top.raw("sweep"), "sweep");
        s.has("axes");  // validated in load_sweep_axes
        s.finish();
    }
    top.finish();
    return cfg;
}

json to_json_doc(const RunConfig& cfg) {
    json j;
    j["schema"] = "wavekin-config-v1";
    json k;
    k["theta"] = cfg.dispersion.theta;
    k["c_omega"] = cfg.dispersion.c_omega;
    k["varpi1"] = cfg.exponents.varpi1;
    k["varpi2"] = cfg.exponents.varpi2;
    k["varpi3"] = cfg.exponents.varpi3;
    k["kappa2"] = cfg.exponents.kappa2;
    k["gamma"] = cfg.exponents.gamma;
    k["alpha"] = cfg.exponents.alpha;
    k["c_p"] = cfg.exponents.c_p;
    k["c_r"] = cfg.exponents.c_r;
    k["c_q"] = cfg.exponents.c_q;
    k["c_rprime"] = cfg.exponents.c_rprime;
    k["c12"] = cfg.couplings.c12;
    k["c22"] = cfg.couplings.c22;
    k["c31"] = cfg.couplings.c31;
    k["enable_c12"] = cfg.toggles.c12;
    k["enable_c22"] = cfg.toggles.c22;
    k["enable_c31"] = cfg.toggles.c31;
    k["use_ro_factor"] = cfg.toggles.use_ro_factor;
    j["kernel"] = k;

    json g;
    g["kind"] = cfg.grid.kind == GridKind::geometric ? "geometric" : "uniform";
    g["omega_min"] = cfg.grid.omega_min;
    g["omega_max"] = cfg.grid.omega_max;
    g["cells"] = cfg.grid.cells;
    g["rep"] = cfg.grid.rep == RepRule::automatic
                   ? "auto"
                   : (cfg.grid.rep == RepRule::midpoint ? "midpoint" : "geometric_mean");
    j["grid"] = g;

    json in;
    if (const auto* tail = std::get_if<PowerLawTailInit>(&cfg.init)) {
        in["kind"] = "power_law_tail";
        in["C_in"] = tail->C_in;
        in["c_in"] = tail->c_in;
        in["r0"] = tail->r0;
    } else {
        in["kind"] = "table";
        in["path"] = std::get<TableInit>(cfg.init).path;
    }
    j["init"] = in;

    json s;
    s["method"] = cfg.step.method == StepMethod::euler ? "euler" : "heun";
    s["dt_init"] = cfg.step.dt_init;
    s["dt_min"] = cfg.step.dt_min;
    s["dt_max"] = cfg.step.dt_max;
    s["safety"] = cfg.step.safety;
    s["t_end"] = cfg.step.t_end;
    s["snapshot_stride"] = cfg.step.snapshot_stride;
    j["step"] = s;

    json d;
    d["probe_R"] = cfg.step.probe_R;
    d["ddm_levels"] = cfg.diagnostics.ddm_levels;
    d["epsilon"] = cfg.diagnostics.epsilon;
    d["sigma"] = cfg.diagnostics.sigma;
    d["c_o"] = cfg.diagnostics.c_o;
    if (cfg.diagnostics.lambda)
        d["lambda"] = *cfg.diagnostics.lambda;
    else
        d["lambda"] = nullptr;
    d["tstar_tol"] = cfg.diagnostics.tstar_tol;
    if (cfg.diagnostics.upsilon_override)
        d["upsilon_override"] = *cfg.diagnostics.upsilon_override;
    else
        d["upsilon_override"] = nullptr;
    d["level_set_integrand"] = cfg.diagnostics.level_set_energy ? "energy" : "mass";
    j["diagnostics"] = d;

    j["output"]["dir"] = cfg.out_dir;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_json(root);
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& cfg) { return to_json_doc(cfg).dump(2); }

std::vector<SweepAxis> load_sweep_axes(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    // ordered parse: axes iterate in document order, last axis fastest
    nlohmann::ordered_json root;
    try {
        root = nlohmann::ordered_json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.contains("sweep") || !root["sweep"].is_object() ||
        !root["sweep"].contains("axes"))
        throw ConfigError("sweep: config has no sweep.axes section");
    const nlohmann::ordered_json& axes = root["sweep"]["axes"];
    if (!axes.is_object() || axes.empty())
        throw ConfigError("sweep: sweep.axes must be a non-empty object");
    std::vector<SweepAxis> out;
    for (auto it = axes.begin(); it != axes.end(); ++it) {
        if (!it.value().is_array() || it.value().empty())
            throw ConfigError("sweep: axis \"" + it.key() + "\" must be a non-empty array");
        SweepAxis ax;
        ax.key = it.key();
        ax.values = it.value().get<std::vector<double>>();
        out.push_back(std::move(ax));
    }
    return out;
}

RunConfig with_override(const RunConfig& cfg, const std::string& key, double value) {
    json doc = to_json_doc(cfg);
    json* node = &doc;
    size_t start = 0;
    while (true) {
        const size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (part.empty()) throw ConfigError("sweep: malformed axis key \"" + key + "\"");
        if (dot == std::string::npos) {
            if (!node->contains(part))
                throw ConfigError("sweep: axis key \"" + key + "\" not found in config");
            if ((*node)[part].is_number_integer())
                (*node)[part] = static_cast<long long>(value);
            else
                (*node)[part] = value;
            break;
        }
        if (!node->contains(part) || !(*node)[part].is_object())
            throw ConfigError("sweep: axis key \"" + key + "\" not found in config");
        node = &(*node)[part];
        start = dot + 1;
    }
    return parse_json(doc);
}

}  // namespace wavekin
