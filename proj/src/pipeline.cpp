#include "phamp/pipeline.hpp"

#include "phamp/io.hpp"

#include <fstream>
#include <sstream>

namespace phamp {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw UsageError("'" + key + "' expects a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v)
{
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 2e9)
        throw UsageError("'" + key + "' expects an integer, got '" + v + "'");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw UsageError("'" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(key, trim(item)));
    if (out.empty())
        throw UsageError("'" + key + "' expects a comma-separated list");
    return out;
}

Vec3 to_vec3(const std::string& key, const std::string& v)
{
    const auto l = to_list(key, v);
    if (l.size() != 3)
        throw UsageError("'" + key + "' expects three comma-separated numbers");
    return {l[0], l[1], l[2]};
}

using Setter = void (*)(RunConfig&, const std::string&, const std::string&);

const std::vector<std::pair<std::string, Setter>>& setters()
{
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"model.name", [](RunConfig& c, const std::string&, const std::string& v) { c.model = v; }},
        {"solver.L", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.L = to_int(k, v); }},
        {"solver.N", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.N = to_int(k, v); }},
        {"solver.b1", [](RunConfig& c, const std::string& k, const std::string& v) { c.b1 = to_double(k, v); }},
        {"solver.b2", [](RunConfig& c, const std::string& k, const std::string& v) { c.b2 = to_double(k, v); }},
        {"solver.etail",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.e_tail = to_double(k, v); }},
        {"solver.auto_double",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.auto_double = to_bool(k, v); }},
        {"solver.n_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.n_max = to_int(k, v); }},
        {"domain.etol", [](RunConfig& c, const std::string& k, const std::string& v) { c.e_tol = to_double(k, v); }},
        {"domain.stride",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.stride = to_int(k, v); }},
        {"domain.n_angles",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.n_angles = to_int(k, v); }},
        {"domain.r_max",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.r_max = to_double(k, v); }},
        {"globalize.delta_max",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.globalize.delta_max = to_double(k, v); }},
        {"globalize.omega_c.lo",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.omega_lo = to_vec3(k, v); }},
        {"globalize.omega_c.hi",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.omega_hi = to_vec3(k, v); }},
        {"globalize.thetas",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.thetas = to_list(k, v); }},
        {"globalize.max_periods",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.globalize.max_periods = to_int(k, v); }},
        {"globalize.max_points",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.globalize.max_points = to_int(k, v); }},
        {"globalize.max_sweep_points",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.globalize.max_sweep_points = to_int(k, v);
         }},
        {"globalize.anchor_stride",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.globalize.anchor_stride = to_int(k, v); }},
        {"globalize.with_response",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.globalize.with_response = to_bool(k, v); }},
        {"globalize.phase_resolution",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.globalize.phase_resolution = to_double(k, v);
         }},
        {"isostable.i", [](RunConfig& c, const std::string& k, const std::string& v) { c.isostable_i = to_int(k, v); }},
        {"isostable.c",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.isostable_c = to_double(k, v); }},
        {"isostable.c_star",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.isostable_c_star = to_double(k, v); }},
        {"strobe.map", [](RunConfig& c, const std::string&, const std::string& v) { c.map = v; }},
        {"strobe.eps",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.stimulus.eps = to_double(k, v); }},
        {"strobe.v", [](RunConfig& c, const std::string& k, const std::string& v) { c.stimulus.v = to_vec3(k, v); }},
        {"strobe.n", [](RunConfig& c, const std::string& k, const std::string& v) { c.stimulus.n = to_int(k, v); }},
        {"strobe.ts", [](RunConfig& c, const std::string& k, const std::string& v) { c.stimulus.Ts = to_double(k, v); }},
        {"strobe.tp", [](RunConfig& c, const std::string& k, const std::string& v) { c.stimulus.Tp = to_double(k, v); }},
        {"strobe.iters", [](RunConfig& c, const std::string& k, const std::string& v) { c.iters = to_int(k, v); }},
        {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
        {"cache.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.cache_dir = v; }},
    };
    return table;
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const UsageError& e) {
        throw UsageError(std::string(name) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(name) + ": " + e.what());
    }
}

} // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    const std::string params = "model.params.";
    if (key.rfind(params, 0) == 0 && key.size() > params.size()) {
        cfg.params[key.substr(params.size())] = to_double(key, value);
        return;
    }
    for (const auto& [k, set] : setters())
        if (k == key) {
            set(cfg, key, value);
            return;
        }
    throw UsageError("unknown configuration key '" + key + "'");
}

void read_config(RunConfig& cfg, std::istream& is, const std::string& source)
{
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(source + ":" + std::to_string(n) + ": expected 'key = value'");
        try {
            apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const UsageError& e) {
            throw UsageError(source + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

void read_config_file(RunConfig& cfg, const std::filesystem::path& file)
{
    std::ifstream is(file);
    if (!is)
        throw UsageError("cannot read config file " + file.string());
    read_config(cfg, is, file.string());
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& [k, set] : setters())
        keys.push_back(k);
    keys.push_back("model.params.<name>");
    return keys;
}

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg))
{
    if (cfg_.model.empty())
        throw UsageError("no model given (--model or model.name)");
    stage("model", [&] {
        spec_ = &find_model(cfg_.model);
        X_ = spec_->field(cfg_.params);
    });
    if (!cfg_.b1)
        cfg_.b1 = spec_->b1;
    if (!cfg_.b2)
        cfg_.b2 = spec_->b2;
    cfg_.solver.b1 = *cfg_.b1;
    cfg_.solver.b2 = *cfg_.b2;
    cfg_.domain.e_tol = e_tol();
    if (!spec_->oscillator)
        throw UsageError("model '" + cfg_.model + "' has no limit cycle");
}

double Pipeline::e_tol() const { return cfg_.e_tol.value_or(spec_->e_tol); }

const Orbit& Pipeline::orbit()
{
    if (!orbit_)
        orbit_ = stage("limit-cycle", [&] {
            LimitCycleOptions lo;
            lo.voltage_index = spec_->voltage_index;
            lo.transient = spec_->transient;
            return find_limit_cycle(*X_, spec_->guess, lo);
        });
    return *orbit_;
}

namespace {

Metadata run_metadata(const RunConfig& cfg, const ModelSpec& spec)
{
    Metadata m;
    m.set("model", cfg.model);
    for (const auto& [k, v] : spec.resolve(cfg.params))
        m.set("param." + k, v);
    m.set("requested_N", cfg.solver.N);
    m.set("etail", cfg.solver.e_tail);
    m.set("auto_double", std::string(cfg.solver.auto_double ? "true" : "false"));
    return m;
}

} // namespace

const TaylorFourierMap& Pipeline::map()
{
    if (K_)
        return *K_;
    if (!cfg_.cache_dir.empty() && std::filesystem::exists(std::filesystem::path(cfg_.cache_dir) / "map.meta")) {
        const std::filesystem::path dir = cfg_.cache_dir;
        const Metadata want = run_metadata(cfg_, *spec_);
        const Metadata have = Metadata::read(dir / "map.meta");
        bool match = have.has("L") && have.integer("L") == cfg_.solver.L && have.number("b1") == *cfg_.b1 &&
                     have.number("b2") == *cfg_.b2;
        for (const auto& key : {"model", "requested_N", "etail", "auto_double"})
            match = match && have.has(key) && have.get(key) == want.get(key);
        for (const auto& [k, v] : spec_->resolve(cfg_.params))
            match = match && have.has("param." + k) && have.get("param." + k) == want.get("param." + k);
        if (match && std::filesystem::exists(dir / "manifest.sha256"))
            match = verify_manifest(dir).empty();
        if (match) {
            K_ = stage("cache", [&] { return read_map(dir); });
            from_cache_ = true;
            return *K_;
        }
    }
    const Orbit& o = orbit();
    SolveReport rep;
    K_ = stage("invariance-solver", [&] { return solve_invariance(*X_, o, cfg_.solver, &rep); });
    report_ = rep;
    return *K_;
}

void Pipeline::save_map(const std::filesystem::path& dir)
{
    const TaylorFourierMap& K = map();
    stage("output", [&] { write_map(dir, K, run_metadata(cfg_, *spec_)); });
}

const AccuracyDomain& Pipeline::domain()
{
    if (!D_) {
        const TaylorFourierMap& K = map();
        D_ = stage("domain", [&] { return compute_accuracy_domain(*X_, K, cfg_.domain); });
    }
    return *D_;
}

const PhaseAmplitude& Pipeline::phase_amplitude()
{
    if (!pa_) {
        const AccuracyDomain& D = domain();
        pa_ = std::make_unique<PhaseAmplitude>(*X_, *K_, D);
    }
    return *pa_;
}

GlobalizationConfig Pipeline::globalization() const
{
    GlobalizationConfig g = cfg_.globalize;
    g.omega_c = spec_->omega_c;
    if (cfg_.omega_lo)
        g.omega_c.lo = *cfg_.omega_lo;
    if (cfg_.omega_hi)
        g.omega_c.hi = *cfg_.omega_hi;
    return g;
}

} // namespace phamp
