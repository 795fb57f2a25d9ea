#include "phamp/acceptance.hpp"
#include "phamp/io.hpp"
#include "phamp/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace phamp;

namespace {

struct Common {
    std::string model, config, out, cache;
    std::vector<std::string> sets;
};

void add_common(CLI::App* s, Common& c)
{
    s->add_option("--model", c.model, "rt, hh, wcsyn, wcsyn-literal, qif, normal-form");
    s->add_option("--config", c.config, "key = value configuration file");
    s->add_option("--set", c.sets, "key=value override (repeatable)");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--cache", c.cache, "directory of a previous solve to reuse");
}

// Config file, then --set, then dedicated flags (applied by the caller).
RunConfig base_config(const Common& c)
{
    RunConfig cfg;
    if (!c.config.empty())
        read_config_file(cfg, c.config);
    for (const std::string& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw UsageError("--set expects key=value, got '" + s + "'");
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!c.model.empty())
        cfg.model = c.model;
    if (!c.out.empty())
        cfg.output_dir = c.out;
    if (!c.cache.empty())
        cfg.cache_dir = c.cache;
    return cfg;
}

std::string g17(double v) { return format_double(v); }

std::ofstream open_out(const fs::path& file)
{
    fs::create_directories(file.parent_path());
    std::ofstream os(file);
    if (!os)
        throw UsageError("cannot write " + file.string());
    return os;
}

std::string theta_tag(double theta)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", theta);
    return buf;
}

int cmd_solve(Pipeline& p)
{
    const fs::path dir = p.config().output_dir;
    const TaylorFourierMap& K = p.map();
    p.save_map(dir);
    std::ostringstream rep;
    rep << "# model=" << p.config().model << "\n";
    rep << "T = " << g17(K.T()) << "\nlambda1 = " << g17(K.lambda1()) << "\nlambda2 = " << g17(K.lambda2()) << "\n";
    rep << "L = " << K.order() << "\nN = " << K.size() << "\n";
    if (const auto& r = p.solve_report()) {
        rep << "doublings = " << r->doublings << "\nmax_residual_l1 = " << g17(r->max_residual)
            << "\nmax_tail = " << g17(r->max_tail) << "\n# a b residual_l1 tail max_abs\n";
        for (int m = 0; m <= K.order(); ++m)
            for (int b = 0; b <= m; ++b) {
                const auto i = static_cast<size_t>(Jet2::index(m - b, b));
                rep << m - b << " " << b << " " << g17(r->residual_l1[i]) << " " << g17(r->tail[i]) << " "
                    << g17(K.coeff(m - b, b).max_abs()) << "\n";
            }
    }
    open_out(dir / "solve.report") << rep.str();
    write_manifest(dir);
    std::cout << rep.str();
    return 0;
}

int cmd_domain(Pipeline& p)
{
    const fs::path dir = p.config().output_dir;
    const AccuracyDomain& D = p.domain();
    auto os = open_out(dir / "domain.txt");
    os << "# model=" << p.config().model << " etol=" << g17(D.e_tol) << " N=" << D.n_grid << " stride=" << D.stride
       << " angles=" << D.n_angles << "\n# theta phi R E_at_R capped\n";
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (int i = 0; i < D.rows(); ++i)
        for (int j = 0; j < D.n_angles; ++j) {
            os << g17(D.theta(i)) << " " << g17(D.phi(j)) << " " << g17(D.R(i, j)) << " " << g17(D.boundary(i, j))
               << " " << D.capped(i, j) << "\n";
            rmin = std::min(rmin, D.R(i, j));
            rmax = std::max(rmax, D.R(i, j));
        }
    os.close();
    write_manifest(dir);
    std::cout << "rows " << D.rows() << " angles " << D.n_angles << " R in [" << g17(rmin) << ", " << g17(rmax)
              << "]\n";
    return 0;
}

int cmd_leaf(Pipeline& p, int axis)
{
    const fs::path dir = p.config().output_dir;
    const PhaseAmplitude& pa = p.phase_amplitude();
    const GlobalizationConfig g = p.globalization();
    for (double th : p.config().thetas) {
        const ManifoldObject leaf = grow_leaf(pa, th, axis, g);
        auto os = open_out(dir / ((axis == 2 ? "slow-leaf_" : "fast-leaf_") + theta_tag(th) + ".txt"));
        write_object(os, leaf, p.config().model);
        std::cout << leaf.kind << " theta=" << g17(th) << " points=" << leaf.points.size() << "\n";
    }
    write_manifest(dir);
    return 0;
}

int cmd_isochron(Pipeline& p)
{
    const fs::path dir = p.config().output_dir;
    const PhaseAmplitude& pa = p.phase_amplitude();
    const GlobalizationConfig g = p.globalization();
    for (double th : p.config().thetas) {
        const ManifoldObject leaf = grow_slow_leaf(pa, th, g);
        const ManifoldObject iso = grow_isochron(pa, th, leaf, g);
        auto os = open_out(dir / ("isochron_" + theta_tag(th) + ".txt"));
        write_object(os, iso, p.config().model);
        std::cout << "isochron theta=" << g17(th) << " points=" << iso.points.size() << "\n";
        for (const auto& n : iso.notes)
            std::cout << "  note: " << n << "\n";
    }
    write_manifest(dir);
    return 0;
}

int cmd_isostable(Pipeline& p)
{
    const RunConfig& c = p.config();
    const fs::path dir = c.output_dir;
    const auto objs = grow_isostable(p.phase_amplitude(), c.isostable_i, c.isostable_c, c.thetas, p.globalization(),
                                     c.isostable_c_star);
    for (const auto& o : objs) {
        auto os = open_out(dir / ("isostable" + std::to_string(c.isostable_i) + "_c" + theta_tag(c.isostable_c) +
                                  "_" + theta_tag(o.theta) + ".txt"));
        write_object(os, o, c.model);
        std::cout << o.kind << " theta=" << g17(o.theta) << " points=" << o.points.size() << "\n";
    }
    write_manifest(dir);
    return 0;
}

int cmd_response(Pipeline& p, int samples, double s1, double s2)
{
    if (samples < 1)
        throw UsageError("--samples must be positive");
    const fs::path dir = p.config().output_dir;
    const bool on_cycle = s1 == 0.0 && s2 == 0.0;
    const TaylorFourierMap& K = p.map();
    const PhaseAmplitude* pa = on_cycle ? nullptr : &p.phase_amplitude();
    auto os = open_out(dir / "response.txt");
    os << "# model=" << p.config().model << " sigma1=" << g17(s1) << " sigma2=" << g17(s2)
       << "\n# theta x1 x2 x3 gradTheta_1..3 gradSigma1_1..3 gradSigma2_1..3 truncated\n";
    for (int k = 0; k < samples; ++k) {
        const double th = static_cast<double>(k) / samples;
        const ResponseEval r = on_cycle ? local_response(K, th, 0.0, 0.0) : pa->evaluate(th, s1, s2, true, false);
        os << g17(th);
        for (const Vec3* v : {&r.x, &r.grad_theta, &r.grad_sigma1, &r.grad_sigma2})
            for (int i = 0; i < 3; ++i)
                os << " " << g17((*v)(i));
        os << " " << r.truncated << "\n";
    }
    os.close();
    write_manifest(dir);
    std::cout << "wrote " << samples << " samples to " << (dir / "response.txt").string() << "\n";
    return 0;
}

int cmd_strobe(Pipeline& p, bool find_fixed)
{
    const RunConfig& c = p.config();
    const fs::path dir = c.output_dir;
    const PhaseAmplitude& pa = p.phase_amplitude();
    const MapKind kind = parse_map_kind(c.map);
    const StroboscopicMap F(pa, c.stimulus, kind);
    if (c.iters < 0)
        throw UsageError("--iters must be non-negative");
    const auto& lab = p.model().labels;
    std::ostringstream table;
    table << "# model=" << c.model << " map=" << c.map << " eps=" << g17(c.stimulus.eps) << " n=" << c.stimulus.n
          << " ts=" << g17(c.stimulus.Ts) << " tp=" << g17(c.stimulus.Tp) << "\n";
    table << "# iterate theta sigma1 sigma2 " << lab[0] << " " << lab[1] << " " << lab[2] << "\n";
    auto row = [&](const std::string& tag, const MapPoint& m) {
        double th = m.theta, a = m.s1, b = m.s2;
        Vec3 x = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
        try {
            x = F.state_of(m);
            if (kind == MapKind::State) {
                const Coordinates co = pa.coordinates_of(x);
                th = co.theta;
                a = co.sigma1;
                b = co.sigma2;
            }
        } catch (const NumericalError&) {
            if (kind == MapKind::State)
                th = a = b = std::numeric_limits<double>::quiet_NaN();
        }
        table << tag << " " << g17(th) << " " << g17(a) << " " << g17(b) << " " << g17(x(0)) << " " << g17(x(1))
              << " " << g17(x(2)) << "\n";
    };
    const auto pts = iterate(F, F.on_cycle(0.0), c.iters);
    for (size_t k = 0; k < pts.size(); ++k)
        row(std::to_string(k), pts[k]);
    if (find_fixed) {
        const FixedPointRecord f = fixed_point(F, F.on_cycle(0.0));
        MapPoint m = f.point;
        if (kind == MapKind::State)
            m.x = f.state;
        table << "# fixed point: iterations=" << f.iterations << " converged=" << (f.converged ? "true" : "false")
              << " spread=" << g17(f.spread) << "\n";
        row("fixed", m);
    }
    auto os = open_out(dir / ("strobe_" + c.map + ".txt"));
    os << table.str();
    os.close();
    write_manifest(dir);
    std::cout << table.str();
    return 0;
}

int cmd_verify(const std::vector<int>& only)
{
    AcceptanceOptions opt;
    opt.only = only;
    opt.log = &std::cerr;
    const auto results = run_acceptance(opt);
    bool all = true;
    for (const auto& r : results) {
        std::cout << summary_line(r) << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"phase-amplitude toolkit"};
    app.require_subcommand(1);
    Common c;

    auto* solve = app.add_subcommand("solve", "limit cycle, Floquet data and the local parameterization");
    add_common(solve, c);
    std::optional<int> L, N;
    std::optional<double> b1, b2, etol;
    solve->add_option("--L", L, "Taylor order");
    solve->add_option("--N", N, "initial Fourier grid size");
    solve->add_option("--b1", b1);
    solve->add_option("--b2", b2);
    solve->add_option("--etol", etol, "invariance tolerance of the accuracy domain");

    auto* domain = app.add_subcommand("domain", "accuracy domain R_theta(phi)");
    add_common(domain, c);
    domain->add_option("--etol", etol);
    std::optional<int> stride;
    domain->add_option("--stride", stride, "theta rows every k grid nodes");

    std::vector<double> thetas;
    auto* slow = app.add_subcommand("slow-manifold", "slow-manifold leaves");
    add_common(slow, c);
    slow->add_option("--theta", thetas, "phases (repeatable)");
    bool fast_leaf = false;
    slow->add_flag("--fast", fast_leaf, "grow the fast leaf instead");

    auto* isochron = app.add_subcommand("isochron", "global isochrons");
    add_common(isochron, c);
    isochron->add_option("--theta", thetas);
    std::optional<int> anchor_stride;
    isochron->add_option("--anchor-stride", anchor_stride);

    auto* isostable = app.add_subcommand("isostable", "global isostables Sigma_i = c");
    add_common(isostable, c);
    isostable->add_option("--theta", thetas);
    std::optional<int> iso_i;
    std::optional<double> iso_c, iso_cstar;
    isostable->add_option("--i", iso_i);
    isostable->add_option("--c", iso_c);
    isostable->add_option("--c-star", iso_cstar);

    auto* response = app.add_subcommand("response", "iPRF and iARFs along a constant-sigma curve");
    add_common(response, c);
    int samples = 256;
    double rs1 = 0.0, rs2 = 0.0;
    response->add_option("--samples", samples);
    response->add_option("--sigma1", rs1);
    response->add_option("--sigma2", rs2);

    auto* strobe = app.add_subcommand("strobe", "stroboscopic maps under pulse trains");
    add_common(strobe, c);
    std::optional<std::string> map;
    std::optional<double> eps, ts, tp;
    std::optional<int> npulse, iters;
    bool fixed = false;
    strobe->add_option("--map", map, "state, pa, pa-lin, slow, phase");
    strobe->add_option("--eps", eps);
    strobe->add_option("--n", npulse);
    strobe->add_option("--ts", ts);
    strobe->add_option("--tp", tp);
    strobe->add_option("--iters", iters);
    strobe->add_flag("--fixed-point", fixed, "also locate the fixed point");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<int> only;
    verify->add_option("--only", only, "criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed())
            return cmd_verify(only);

        RunConfig cfg = base_config(c);
        if (L)
            cfg.solver.L = *L;
        if (N)
            cfg.solver.N = *N;
        if (b1)
            cfg.b1 = *b1;
        if (b2)
            cfg.b2 = *b2;
        if (etol)
            cfg.e_tol = *etol;
        if (stride)
            cfg.domain.stride = *stride;
        if (!thetas.empty())
            cfg.thetas = thetas;
        if (anchor_stride)
            cfg.globalize.anchor_stride = *anchor_stride;
        if (iso_i)
            cfg.isostable_i = *iso_i;
        if (iso_c)
            cfg.isostable_c = *iso_c;
        if (iso_cstar)
            cfg.isostable_c_star = *iso_cstar;
        if (map)
            cfg.map = *map;
        if (eps)
            cfg.stimulus.eps = *eps;
        if (npulse)
            cfg.stimulus.n = *npulse;
        if (ts)
            cfg.stimulus.Ts = *ts;
        if (tp)
            cfg.stimulus.Tp = *tp;
        if (iters)
            cfg.iters = *iters;

        Pipeline p(cfg);
        if (solve->parsed())
            return cmd_solve(p);
        if (domain->parsed())
            return cmd_domain(p);
        if (slow->parsed())
            return cmd_leaf(p, fast_leaf ? 1 : 2);
        if (isochron->parsed())
            return cmd_isochron(p);
        if (isostable->parsed())
            return cmd_isostable(p);
        if (response->parsed())
            return cmd_response(p, samples, rs1, rs2);
        if (strobe->parsed())
            return cmd_strobe(p, fixed);
    } catch (const UsageError& e) {
        std::cerr << "phamp: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "phamp: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "phamp: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
