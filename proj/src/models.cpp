#include "phamp/models.hpp"

#include <mutex>
#include <numbers>

namespace phamp {

Vec3 VectorField::value(const Vec3& x) const
{
    const Vec3 y = eval(x);
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(y(i)))
            throw DomainError("vector field: non-finite component " + std::to_string(i) + " at x = (" +
                              std::to_string(x(0)) + ", " + std::to_string(x(1)) + ", " + std::to_string(x(2)) + ")");
    return y;
}

Mat3 VectorField::jacobian(const Vec3& x) const
{
    const Mat3 J = eval_jacobian(x);
    if (!J.allFinite())
        throw DomainError("vector field: non-finite Jacobian at x = (" + std::to_string(x(0)) + ", " +
                          std::to_string(x(1)) + ", " + std::to_string(x(2)) + ")");
    return J;
}

namespace {

using std::exp;
using std::pow;

template <class S>
S sigmoid(const S& u)
{
    return 1.0 / (1.0 + exp(u));
}

template <class S>
S fourth(const S& x)
{
    const S y = x * x;
    return y * y;
}

struct Rt {
    double Cm, gL, VL, gNa, VNa, gK, VK, gT, VT, Iapp;

    explicit Rt(const ParamSet& p)
        : Cm(p.at("C_m")), gL(p.at("g_L")), VL(p.at("V_L")), gNa(p.at("g_Na")), VNa(p.at("V_Na")), gK(p.at("g_K")),
          VK(p.at("V_K")), gT(p.at("g_T")), VT(p.at("V_T")), Iapp(p.at("I_app"))
    {
    }

    template <class S>
    std::array<S, 3> operator()(const std::array<S, 3>& x) const
    {
        const S& V = x[0];
        const S& h = x[1];
        const S& r = x[2];
        const S hinf = sigmoid((V + 41.0) / 4.0);
        const S rinf = sigmoid((V + 84.0) / 4.0);
        const S minf = sigmoid(-(V + 37.0) / 7.0);
        const S pinf = sigmoid(-(V + 60.0) / 6.2);
        const S taur = 28.0 + exp(-(V + 25.0) / 10.5);
        const S ah = 0.128 * exp(-(V + 46.0) / 18.0);
        const S bh = 4.0 * sigmoid(-(V + 23.0) / 5.0);
        const S tauh = 1.0 / (ah + bh);
        const S IL = gL * (V - VL);
        const S INa = gNa * (minf * minf * minf) * h * (V - VNa);
        const S IK = gK * fourth(0.75 * (1.0 - h)) * (V - VK);
        const S IT = gT * (pinf * pinf) * r * (V - VT);
        return {(-IL - INa - IK - IT + Iapp) / Cm, (hinf - h) / tauh, (rinf - r) / taur};
    }
};

struct Hh {
    double Cm, gL, VL, gNa, VNa, gK, VK, Iapp;

    explicit Hh(const ParamSet& p)
        : Cm(p.at("C_m")), gL(p.at("g_L")), VL(p.at("V_L")), gNa(p.at("g_Na")), VNa(p.at("V_Na")), gK(p.at("g_K")),
          VK(p.at("V_K")), Iapp(p.at("I_app"))
    {
    }

    template <class S>
    std::array<S, 3> operator()(const std::array<S, 3>& x) const
    {
        const S& V = x[0];
        const S& n = x[1];
        const S& h = x[2];
        const S ninf = sigmoid(-(V + 53.0) / 15.0);
        const S hinf = sigmoid((V + 62.0) / 7.0);
        const S minf = sigmoid(-(V + 40.0) / 9.0);
        const S uh = (67.0 + V) / 20.0;
        const S un = (79.0 + V) / 50.0;
        const S tauh = 7.4 * exp(-(uh * uh)) + 1.2;
        const S taun = 4.7 * exp(-(un * un)) + 1.1;
        const S IL = gL * (V - VL);
        const S INa = gNa * (minf * minf * minf) * h * (V - VNa);
        const S IK = gK * fourth(n) * (V - VK);
        return {(-IL - INa - IK + Iapp) / Cm, (ninf - n) / taun, (hinf - h) / tauh};
    }
};

struct WcSyn {
    double P, tau_e, a, b, aE, thetaE, Q, d, tau_i, c, aI, thetaI, tau_d;

    explicit WcSyn(const ParamSet& p)
        : P(p.at("P")), tau_e(p.at("tau_e")), a(p.at("a")), b(p.at("b")), aE(p.at("a_E")), thetaE(p.at("theta_E")),
          Q(p.at("Q")), d(p.at("d")), tau_i(p.at("tau_i")), c(p.at("c")), aI(p.at("a_I")), thetaI(p.at("theta_I")),
          tau_d(p.at("tau_d"))
    {
    }

    template <class S>
    std::array<S, 3> operator()(const std::array<S, 3>& x) const
    {
        const S& E = x[0];
        const S& I = x[1];
        const S& s = x[2];
        const S dE = sigmoid(-aE * ((a * E - b * s + P) - thetaE));
        const S dI = sigmoid(-aI * ((c * E - d * s + Q) - thetaI));
        return {(-E + dE) / tau_e, (-I + dI) / tau_i, (-s + tau_d * I) / tau_d};
    }
};

struct Qif {
    double tau_m, Delta, J, Theta, tau_d;

    explicit Qif(const ParamSet& p)
        : tau_m(p.at("tau_m")), Delta(p.at("Delta")), J(p.at("J")), Theta(p.at("Theta")), tau_d(p.at("tau_d"))
    {
    }

    template <class S>
    std::array<S, 3> operator()(const std::array<S, 3>& x) const
    {
        constexpr double pi = std::numbers::pi;
        const S& R = x[0];
        const S& V = x[1];
        const S& Sy = x[2];
        const S piR = (pi * tau_m) * R;
        return {(Delta / (pi * tau_m) + 2.0 * R * V) / tau_m, (V * V - piR * piR - J * tau_m * Sy + Theta) / tau_m,
                (-Sy + R) / tau_d};
    }
};

// x' = A x
struct Linear {
    Mat3 A;

    explicit Linear(const ParamSet& p)
    {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                A(i, j) = p.at("a" + std::to_string(i + 1) + std::to_string(j + 1));
    }

    template <class S>
    std::array<S, 3> operator()(const std::array<S, 3>& x) const
    {
        std::array<S, 3> r;
        for (int i = 0; i < 3; ++i)
            r[i] = A(i, 0) * x[0] + A(i, 1) * x[1] + A(i, 2) * x[2];
        return r;
    }
};

// Radial/axial contraction around the unit circle in the (x1, x2) plane:
// rho' = lambda2 (rho - 1), x3' = lambda1 x3, angular speed 2 pi / T.
struct NormalForm {
    double T, l1, l2;

    explicit NormalForm(const ParamSet& p) : T(p.at("T")), l1(p.at("lambda1")), l2(p.at("lambda2")) {}

    template <class S>
    std::array<S, 3> operator()(const std::array<S, 3>& x) const
    {
        const double w = 2.0 * std::numbers::pi / T;
        const S inv_rho = pow(x[0] * x[0] + x[1] * x[1], -0.5);
        const S g = l2 * (1.0 - inv_rho);
        return {g * x[0] - w * x[1], g * x[1] + w * x[0], l1 * x[2]};
    }
};

template <class F>
std::function<std::shared_ptr<const VectorField>(const ParamSet&)> builder()
{
    return [](const ParamSet& p) { return make_field(F(p)); };
}

std::vector<ModelSpec> builtin_models()
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<ModelSpec> out;

    ModelSpec rt;
    rt.name = "rt";
    rt.description = "thalamic neuron (V, h, r)";
    rt.defaults = {{"C_m", 1.0}, {"g_L", 0.05}, {"V_L", -70.0}, {"g_Na", 3.0}, {"V_Na", 50.0},
                   {"g_K", 5.0}, {"V_K", -90.0}, {"g_T", 5.0},  {"V_T", 0.0},   {"I_app", 5.0}};
    rt.labels = {"V", "h", "r"};
    rt.voltage_index = 0;
    rt.omega_c.lo = Vec3(-inf, 0.0, 0.0);
    rt.omega_c.hi = Vec3(inf, 1.0, 1.0);
    rt.b1 = 0.5;
    rt.b2 = 0.5;
    rt.e_tol = 1e-8;
    rt.guess = Vec3(-60.0, 0.2, 0.003);
    rt.equilibrium_guess = Vec3(-39.1, 0.38, 1.3e-5);
    rt.transient = 400.0;
    rt.build = builder<Rt>();
    out.push_back(rt);

    ModelSpec hh;
    hh.name = "hh";
    hh.description = "reduced Hodgkin-Huxley neuron (V, n, h)";
    hh.defaults = {{"C_m", 1.0}, {"g_L", 0.1}, {"V_L", -75.6}, {"g_Na", 30.0},
                   {"V_Na", 55.0}, {"g_K", 9.0}, {"V_K", -77.0}, {"I_app", 20.0}};
    hh.labels = {"V", "n", "h"};
    hh.voltage_index = 0;
    hh.omega_c.lo = Vec3(-inf, 0.0, 0.0);
    hh.omega_c.hi = Vec3(60.0, 1.0, 1.0);
    hh.b1 = 2.0;
    hh.b2 = 2.0;
    hh.e_tol = 1e-6;
    hh.guess = Vec3(-60.0, 0.4, 0.3);
    hh.equilibrium_guess = Vec3(-49.1, 0.564, 0.137);
    hh.transient = 200.0;
    hh.build = builder<Hh>();
    out.push_back(hh);

    ModelSpec wc;
    wc.name = "wcsyn";
    wc.description = "Wilson-Cowan with inhibitory synapse (E, I, s), calibrated P, tau_e, tau_i";
    wc.defaults = {{"P", 4.6623},  {"tau_e", 3.6222}, {"a", 8.0},   {"b", 16.0},      {"a_E", 3.0},
                   {"theta_E", 4.0}, {"Q", 0.0},        {"d", 3.0},   {"tau_i", 2.751}, {"c", 7.0},
                   {"a_I", 2.0},     {"theta_I", 3.0},  {"tau_r", 1.0}, {"tau_d", 6.0}};
    wc.labels = {"E", "I", "s"};
    wc.voltage_index = 0;
    wc.omega_c.lo = Vec3(0.0, 0.0, 0.0);
    wc.omega_c.hi = Vec3(1.0, 1.0, 1.0);
    wc.b1 = 1.0;
    wc.b2 = 1.0;
    wc.e_tol = 1e-8;
    wc.guess = Vec3(0.3, 0.05, 0.2);
    wc.equilibrium_guess = Vec3(0.272, 0.033, 0.198);
    wc.transient = 600.0;
    wc.build = builder<WcSyn>();
    out.push_back(wc);

    ModelSpec wcl = wc;
    wcl.name = "wcsyn-literal";
    wcl.description = "Wilson-Cowan with inhibitory synapse, parameter set as listed (P = 4.5, tau_e = tau_i = 3)";
    wcl.defaults["P"] = 4.5;
    wcl.defaults["tau_e"] = 3.0;
    wcl.defaults["tau_i"] = 3.0;
    out.push_back(wcl);

    ModelSpec qif;
    qif.name = "qif";
    qif.description = "QIF mean-field population (R, V, S)";
    qif.defaults = {{"tau_m", 10.0}, {"Delta", 0.3}, {"J", 21.0}, {"Theta", 4.0}, {"tau_d", 5.0}};
    qif.labels = {"R", "V", "S"};
    qif.voltage_index = 1;
    qif.omega_c.lo = Vec3(0.0, -6.0, 0.0);
    qif.omega_c.hi = Vec3(inf, 6.0, inf);
    qif.b1 = 0.2;
    qif.b2 = 1.0;
    qif.e_tol = 1e-8;
    qif.guess = Vec3(0.05, -1.0, 0.05);
    qif.equilibrium_guess = Vec3(0.018, -0.267, 0.018);
    qif.transient = 1500.0;
    qif.build = builder<Qif>();
    out.push_back(qif);

    ModelSpec nf;
    nf.name = "normal-form";
    nf.description = "synthetic cycle with linear phase-amplitude conjugacy";
    nf.defaults = {{"T", 2.0}, {"lambda1", -1.0}, {"lambda2", -0.3}};
    nf.labels = {"x1", "x2", "x3"};
    nf.voltage_index = 0;
    nf.omega_c.lo = Vec3(-10.0, -10.0, -10.0);
    nf.omega_c.hi = Vec3(10.0, 10.0, 10.0);
    nf.b1 = 0.5;
    nf.b2 = 0.5;
    nf.e_tol = 1e-8;
    nf.guess = Vec3(1.2, 0.1, 0.3);
    nf.transient = 100.0;
    nf.build = builder<NormalForm>();
    out.push_back(nf);

    ModelSpec lin;
    lin.name = "linear";
    lin.description = "linear test field x' = A x";
    lin.defaults = {{"a11", -1.0}, {"a12", 2.0},  {"a13", 0.0}, {"a21", -2.0}, {"a22", -1.0},
                    {"a23", 0.0},  {"a31", 0.5},  {"a32", 0.0}, {"a33", -0.5}};
    lin.labels = {"x1", "x2", "x3"};
    lin.oscillator = false;
    lin.build = builder<Linear>();
    out.push_back(lin);

    return out;
}

struct Registry {
    std::mutex mutex;
    std::map<std::string, std::unique_ptr<ModelSpec>> models;

    Registry()
    {
        for (auto& m : builtin_models()) {
            auto key = m.name;
            models.emplace(key, std::make_unique<ModelSpec>(std::move(m)));
        }
    }
};

Registry& registry()
{
    static Registry r;
    return r;
}

} // namespace

ParamSet ModelSpec::resolve(const ParamSet& overrides) const
{
    ParamSet p = defaults;
    for (const auto& [k, v] : overrides) {
        auto it = p.find(k);
        if (it == p.end())
            throw UsageError("model " + name + ": unknown parameter '" + k + "'");
        it->second = v;
    }
    return p;
}

std::shared_ptr<const VectorField> ModelSpec::field(const ParamSet& overrides) const
{
    return build(resolve(overrides));
}

Vec3 find_equilibrium(const VectorField& X, Vec3 x, double tol, int max_iterations)
{
    for (int it = 0; it < max_iterations; ++it) {
        const Vec3 f = X.value(x);
        if (f.norm() < tol)
            return x;
        const Vec3 dx = X.jacobian(x).fullPivLu().solve(-f);
        x += dx;
        if (!x.allFinite())
            throw ConvergenceError("equilibrium: Newton diverged");
        if (dx.norm() < tol * std::max(1.0, x.norm()))
            return x;
    }
    throw ConvergenceError("equilibrium: Newton did not converge");
}

void register_model(ModelSpec spec)
{
    if (spec.name.empty() || !spec.build)
        throw UsageError("register_model: name and builder are required");
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto key = spec.name;
    r.models[key] = std::make_unique<ModelSpec>(std::move(spec));
}

const ModelSpec& find_model(const std::string& name)
{
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.models.find(name);
    if (it == r.models.end())
        throw UsageError("unknown model '" + name + "'");
    return *it->second;
}

std::vector<std::string> model_names()
{
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> names;
    for (const auto& [k, v] : r.models)
        names.push_back(k);
    return names;
}

} // namespace phamp
