#include "phamp/globalize.hpp"

#include <algorithm>

#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace phamp {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

PhaseAmplitude::PhaseAmplitude(const VectorField& X, const TaylorFourierMap& K, const AccuracyDomain& D,
                               OdeTolerance ode, int max_periods)
    : X_(X), K_(K), D_(D), ode_(ode), max_periods_(max_periods)
{
}

bool PhaseAmplitude::newton_local(double& th, double& a, double& b, const Vec3& x, double reach, double scale) const
{
    for (int it = 0; it < 40; ++it) {
        const LocalSlice s = K_.slice(th);
        const Vec3 r = s.value(a, b) - x;
        if (!r.allFinite())
            return false;
        Vec3 d = s.jacobian(a, b).partialPivLu().solve(-r);
        if (!d.allFinite())
            return false;
        if (std::abs(d(0)) > 0.05)
            d *= 0.05 / std::abs(d(0));
        th += d(0);
        a += d(1);
        b += d(2);
        if (std::hypot(a, b) > reach)
            return false;
        if (r.norm() < 1e-13 * scale || d.norm() < 1e-15 * (1.0 + std::hypot(a, b)))
            return true;
    }
    return (K_.slice(th).value(a, b) - x).norm() < 1e-10 * scale;
}

bool PhaseAmplitude::invert_local(const Vec3& x, double& theta, double& s1, double& s2) const
{
    const int n = K_.size();
    const auto& g = K_.coeff(0, 0).samples();
    const auto& dg = K_.dcoeff(0, 0).samples();
    const auto& k10 = K_.coeff(1, 0).samples();
    const auto& k01 = K_.coeff(0, 1).samples();
    // Linearized guesses; each sign change of the phase correction along the
    // nodes is a candidate. Try them by increasing amplitude.
    struct Candidate {
        double amp;
        Vec3 guess;
    };
    std::vector<Candidate> cands;
    Vec3 prev = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
    Vec3 first = prev;
    auto node_guess = [&](int i) {
        Mat3 A;
        A.col(0) = dg.row(i).transpose();
        A.col(1) = k10.row(i).transpose();
        A.col(2) = k01.row(i).transpose();
        return Vec3(A.partialPivLu().solve(x - g.row(i).transpose()));
    };
    for (int i = 0; i <= n; ++i) {
        const Vec3 d = i < n ? node_guess(i) : first;
        if (i == 0)
            first = d;
        if (d.allFinite() && prev.allFinite() && prev(0) >= 0.0 && d(0) <= 0.0) {
            const bool use_prev = std::abs(prev(0)) < std::abs(d(0));
            const Vec3& c = use_prev ? prev : d;
            const int node = use_prev ? i - 1 : i % n;
            cands.push_back({std::hypot(c(1), c(2)), Vec3(static_cast<double>(node) / n + c(0), c(1), c(2))});
        }
        prev = d;
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) { return l.amp < r.amp; });
    const double reach = 4.0 * D_.r_max;
    const double scale = 1.0 + x.norm();
    double th = 0.0, a = 0.0, b = 0.0;
    bool found = false;
    for (size_t k = 0; k < std::min<size_t>(cands.size(), 6) && !found; ++k) {
        if (cands[k].amp > reach)
            break;
        th = cands[k].guess(0);
        a = cands[k].guess(1);
        b = cands[k].guess(2);
        found = newton_local(th, a, b, x, reach, scale) && D_.contains(wrap_phase(th), a, b);
    }
    if (!found)
        return false;
    th = wrap_phase(th);
    theta = th;
    s1 = a;
    s2 = b;
    return true;
}

Coordinates PhaseAmplitude::coordinates_of(const Vec3& x) const
{
    Vec3 y = x;
    const double T = K_.T();
    for (int m = 0; m <= max_periods_; ++m) {
        Coordinates c;
        if (invert_local(y, c.theta, c.sigma1, c.sigma2)) {
            c.periods = m;
            c.sigma1 *= std::exp(-K_.lambda1() * m * T);
            c.sigma2 *= std::exp(-K_.lambda2() * m * T);
            return c;
        }
        y = flow(X_, y, T, ode_);
    }
    throw ConvergenceError("coordinates: point did not enter the accuracy domain within " +
                           std::to_string(max_periods_) + " periods");
}

ResponseEval PhaseAmplitude::evaluate(double theta, double s1, double s2, bool with_response, bool whole_periods,
                                      double* t_back) const
{
    const double T = K_.T();
    const double l1 = K_.lambda1(), l2 = K_.lambda2();
    auto inside = [&](double t) { return D_.contains(theta + t / T, s1 * std::exp(l1 * t), s2 * std::exp(l2 * t)); };
    double t = 0.0;
    if (!inside(0.0)) {
        const int sub = whole_periods ? 1 : 64;
        const double h = T / sub;
        int k = 1;
        for (; k <= max_periods_ * sub; ++k)
            if (inside(k * h))
                break;
        if (k > max_periods_ * sub)
            throw ConvergenceError("evaluate: amplitudes too large for " + std::to_string(max_periods_) + " periods");
        t = k * h;
        if (!whole_periods) {
            double lo = (k - 1) * h, hi = t;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                (inside(mid) ? hi : lo) = mid;
            }
            t = hi;
        }
    }
    if (t_back)
        *t_back = t;
    const double th = theta + t / T;
    const double a = s1 * std::exp(l1 * t), b = s2 * std::exp(l2 * t);
    ResponseEval r;
    if (with_response) {
        r = local_response(K_, th, a, b);
        if (t > 0.0)
            r = propagate_response(X_, r, t, l1, l2, ode_);
    } else {
        r.x = K_.evaluate(th, a, b);
        if (t > 0.0)
            r.x = flow(X_, r.x, -t, ode_);
    }
    r.theta = wrap_phase(theta);
    r.sigma1 = s1;
    r.sigma2 = s2;
    return r;
}

double default_delta_max(const TaylorFourierMap& K)
{
    const auto& g = K.coeff(0, 0).samples();
    return 0.01 * (g.colwise().maxCoeff() - g.colwise().minCoeff()).norm();
}

namespace {

struct Sweep {
    const PhaseAmplitude& pa;
    const GlobalizationConfig& cfg;
    double delta_max;
    ManifoldObject& obj;

    // Point phi_{-n T}(K(theta, a, b)) with coordinates and responses.
    bool make(double theta, double a, double b, int n, AtlasPoint& p) const
    {
        const TaylorFourierMap& K = pa.map();
        const double T = K.T();
        const Vec3 xi = K.evaluate(theta, a, b);
        try {
            p.x = n > 0 ? flow(pa.field(), xi, -n * T, cfg.ode) : xi;
        } catch (const NumericalError& e) {
            obj.notes.push_back(std::string("backward flow failed: ") + e.what());
            return false;
        }
        p.theta = wrap_phase(theta);
        p.seed1 = a;
        p.seed2 = b;
        p.periods = n;
        p.sigma1 = a * std::exp(-K.lambda1() * n * T);
        p.sigma2 = b * std::exp(-K.lambda2() * n * T);
        return true;
    }

    void respond(AtlasPoint& p) const
    {
        if (!cfg.with_response)
            return;
        const TaylorFourierMap& K = pa.map();
        ResponseEval r = local_response(K, p.theta, p.seed1, p.seed2);
        if (p.periods > 0)
            r = propagate_response(pa.field(), r, p.periods * K.T(), K.lambda1(), K.lambda2(), cfg.ode);
        p.grad_theta = r.grad_theta;
        p.grad_sigma1 = r.grad_sigma1;
        p.grad_sigma2 = r.grad_sigma2;
        p.truncated = r.truncated;
    }

    bool full() const { return static_cast<int>(obj.points.size()) >= cfg.max_points; }

    // Phase uncertainty from integration roundoff, |grad Theta| |x| rel_tol.
    bool resolvable(const AtlasPoint& p) const
    {
        if (!cfg.with_response)
            return true;
        if (p.truncated || p.grad_theta.norm() * p.x.norm() * cfg.ode.rel > cfg.phase_resolution) {
            obj.notes.push_back("phase unresolvable beyond sigma = (" + std::to_string(p.sigma1) + ", " +
                                std::to_string(p.sigma2) + ")");
            return false;
        }
        return true;
    }
};

} // namespace

ManifoldObject grow_leaf(const PhaseAmplitude& pa, double theta, int axis, const GlobalizationConfig& cfg)
{
    if (axis != 1 && axis != 2)
        throw UsageError("leaf axis must be 1 or 2");
    const TaylorFourierMap& K = pa.map();
    const AccuracyDomain& D = pa.domain();
    const double T = K.T();
    const double lam = pa.lambda(axis);
    ManifoldObject obj;
    obj.kind = axis == 2 ? "slow-leaf" : "fast-leaf";
    obj.theta = wrap_phase(theta);
    obj.family = axis == 2 ? 1 : 2;
    const Sweep sw{pa, cfg, cfg.delta_max > 0.0 ? cfg.delta_max : default_delta_max(K), obj};

    AtlasPoint origin;
    sw.make(theta, 0.0, 0.0, 0, origin);
    sw.respond(origin);

    std::vector<AtlasPoint> branches[2];
    for (int side = 0; side < 2; ++side) {
        const double sign = side == 0 ? 1.0 : -1.0;
        const double phi = axis == 2 ? (side == 0 ? kPi / 2 : 3 * kPi / 2) : (side == 0 ? 0.0 : kPi);
        const double smax = sign * D.radius(theta, phi);
        if (smax == 0.0)
            continue;
        Vec3 prev = origin.x;
        double s = 0.0, ds = 0.8 * smax;
        int n = 0;
        auto& out = branches[side];
        while (!sw.full()) {
            if (static_cast<int>(out.size()) >= cfg.max_sweep_points) {
                obj.notes.push_back("sweep point limit reached");
                break;
            }
            if (std::abs(s + ds) > std::abs(smax) && std::abs(s) < std::abs(smax))
                ds = smax - s;
            if (std::abs(s) >= std::abs(smax)) {
                if (++n > cfg.max_periods) {
                    obj.notes.push_back("period limit reached");
                    break;
                }
                s = smax * std::exp(lam * T);
                ds = 0.8 * (smax - s);
                continue;
            }
            AtlasPoint p;
            const double seed = s + ds;
            if (!sw.make(theta, axis == 1 ? seed : 0.0, axis == 2 ? seed : 0.0, n, p))
                break;
            if ((p.x - prev).norm() < sw.delta_max) {
                if (!cfg.omega_c.contains(p.x))
                    break;
                sw.respond(p);
                if (!sw.resolvable(p))
                    break;
                out.push_back(p);
                prev = p.x;
                s = seed;
            } else {
                ds /= 2.0;
                if (std::abs(ds) < 1e-14) {
                    obj.notes.push_back("spacing not achieved at sigma = " + std::to_string(s));
                    break;
                }
            }
        }
    }
    obj.points.assign(branches[1].rbegin(), branches[1].rend());
    obj.points.push_back(origin);
    obj.points.insert(obj.points.end(), branches[0].begin(), branches[0].end());
    return obj;
}

ManifoldObject grow_isochron(const PhaseAmplitude& pa, double theta, const ManifoldObject& slow_leaf,
                             const GlobalizationConfig& cfg)
{
    const TaylorFourierMap& K = pa.map();
    const AccuracyDomain& D = pa.domain();
    const double T = K.T();
    ManifoldObject obj;
    obj.kind = "isochron";
    obj.theta = wrap_phase(theta);
    const Sweep sw{pa, cfg, cfg.delta_max > 0.0 ? cfg.delta_max : default_delta_max(K), obj};
    const int stride = std::max(1, cfg.anchor_stride);
    int clamps = 0;
    for (size_t k = 0; k < slow_leaf.points.size(); k += static_cast<size_t>(stride)) {
        const AtlasPoint& anchor = slow_leaf.points[k];
        obj.points.push_back(anchor);
        for (int side = 0; side < 2 && !sw.full(); ++side) {
            const double sign = side == 0 ? 1.0 : -1.0;
            double s2 = anchor.seed2;
            int n = static_cast<int>(anchor.periods);
            double smax = sign * D.line_extent(theta, s2, sign, 1);
            double s = 0.0, ds = 0.8 * smax;
            Vec3 prev = anchor.x;
            int emitted = 0;
            while (!sw.full()) {
                if (emitted >= cfg.max_sweep_points) {
                    obj.notes.push_back("sweep point limit reached at anchor " + std::to_string(k));
                    break;
                }
                if (std::abs(s + ds) > std::abs(smax) && std::abs(s) < std::abs(smax))
                    ds = smax - s;
                if (smax == 0.0 || std::abs(s) >= std::abs(smax)) {
                    if (++n > cfg.max_periods)
                        break;
                    const double old = smax;
                    s2 *= std::exp(K.lambda2() * T);
                    smax = sign * D.line_extent(theta, s2, sign, 1);
                    s = old * std::exp(K.lambda1() * T);
                    if (std::abs(s) > std::abs(smax)) {
                        s = smax;
                        ++clamps;
                    }
                    ds = 0.8 * (smax - s);
                    continue;
                }
                AtlasPoint p;
                const double seed = s + ds;
                if (!sw.make(theta, seed, s2, n, p))
                    break;
                if ((p.x - prev).norm() < sw.delta_max) {
                    if (!cfg.omega_c.contains(p.x))
                        break;
                    sw.respond(p);
                    if (!sw.resolvable(p))
                        break;
                    obj.points.push_back(p);
                    ++emitted;
                    prev = p.x;
                    s = seed;
                } else {
                    ds /= 2.0;
                    if (std::abs(ds) < 1e-14) {
                        obj.notes.push_back("spacing not achieved at anchor " + std::to_string(k));
                        break;
                    }
                }
            }
        }
    }
    if (clamps > 0)
        obj.notes.push_back("sigma clamped to the recomputed extent " + std::to_string(clamps) + " times");
    return obj;
}

std::vector<ManifoldObject> grow_isostable(const PhaseAmplitude& pa, int i, double c, const std::vector<double>& thetas,
                                           const GlobalizationConfig& cfg, double c_star)
{
    if (i != 1 && i != 2)
        throw UsageError("isostable index must be 1 or 2");
    std::vector<ManifoldObject> out;
    if (c == 0.0) {
        // {Sigma_i = 0} is the leaf family grown along the other amplitude.
        for (double th : thetas) {
            ManifoldObject leaf = grow_leaf(pa, th, i == 1 ? 2 : 1, cfg);
            leaf.kind = "isostable";
            leaf.family = i;
            leaf.level = 0.0;
            out.push_back(std::move(leaf));
        }
        return out;
    }
    const TaylorFourierMap& K = pa.map();
    const AccuracyDomain& D = pa.domain();
    const double T = K.T();
    const int other = 3 - i;
    const double phi_i = i == 1 ? (c > 0 ? 0.0 : kPi) : (c > 0 ? kPi / 2 : 3 * kPi / 2);
    if (c_star == 0.0) {
        double r = std::numeric_limits<double>::infinity();
        for (int row = 0; row < D.rows(); ++row)
            r = std::min(r, D.radius(D.theta(row), phi_i));
        c_star = std::copysign(std::min(std::abs(c), 0.5 * r), c);
    }
    if ((c > 0) != (c_star > 0))
        throw UsageError("isostable level and local level must have the same sign");
    if (std::abs(c_star) > std::abs(c))
        throw UsageError("local isostable level must not exceed the requested level in magnitude");
    const double lam_i = pa.lambda(i), lam_o = pa.lambda(other);
    const double t = std::log(c / c_star) / lam_i; // <= 0
    for (double th : thetas) {
        ManifoldObject obj;
        obj.kind = "isostable";
        obj.theta = wrap_phase(th);
        obj.family = i;
        obj.level = c;
        const Sweep sw{pa, cfg, cfg.delta_max > 0.0 ? cfg.delta_max : default_delta_max(K), obj};
        const double th_local = th - t / T;
        auto make = [&](double s, AtlasPoint& p) {
            const double a = i == 1 ? c_star : s, b = i == 1 ? s : c_star;
            const Vec3 xi = K.evaluate(th_local, a, b);
            try {
                p.x = t < 0.0 ? flow(pa.field(), xi, t, cfg.ode) : xi;
            } catch (const NumericalError& e) {
                obj.notes.push_back(std::string("backward flow failed: ") + e.what());
                return false;
            }
            p.theta = wrap_phase(th);
            p.seed1 = a;
            p.seed2 = b;
            p.periods = -t / T;
            p.sigma1 = i == 1 ? c : s * std::exp(-lam_o * t);
            p.sigma2 = i == 2 ? c : s * std::exp(-lam_o * t);
            return true;
        };
        auto respond = [&](AtlasPoint& p) {
            if (!cfg.with_response)
                return;
            ResponseEval r = local_response(K, th_local, p.seed1, p.seed2);
            if (t < 0.0)
                r = propagate_response(pa.field(), r, -t, K.lambda1(), K.lambda2(), cfg.ode);
            p.grad_theta = r.grad_theta;
            p.grad_sigma1 = r.grad_sigma1;
            p.grad_sigma2 = r.grad_sigma2;
            p.truncated = r.truncated;
        };
        AtlasPoint centre;
        if (!D.contains(th_local, i == 1 ? c_star : 0.0, i == 2 ? c_star : 0.0) || !make(0.0, centre)) {
            obj.notes.push_back("local isostable level outside the accuracy domain");
            out.push_back(std::move(obj));
            continue;
        }
        respond(centre);
        std::vector<AtlasPoint> branches[2];
        for (int side = 0; side < 2; ++side) {
            const double sign = side == 0 ? 1.0 : -1.0;
            const double smax = sign * D.line_extent(th_local, c_star, sign, other);
            double s = 0.0, ds = 0.8 * smax;
            Vec3 prev = centre.x;
            while (smax != 0.0 && std::abs(s + ds) <= std::abs(smax) &&
                   static_cast<int>(branches[side].size()) < cfg.max_sweep_points) {
                AtlasPoint p;
                const double seed = s + ds;
                if (!make(seed, p))
                    break;
                if ((p.x - prev).norm() < sw.delta_max) {
                    if (!cfg.omega_c.contains(p.x))
                        break;
                    respond(p);
                    if (!sw.resolvable(p))
                        break;
                    branches[side].push_back(p);
                    prev = p.x;
                    s = seed;
                } else {
                    ds /= 2.0;
                    if (std::abs(ds) < 1e-14) {
                        obj.notes.push_back("spacing not achieved");
                        break;
                    }
                }
            }
        }
        obj.points.assign(branches[1].rbegin(), branches[1].rend());
        obj.points.push_back(centre);
        obj.points.insert(obj.points.end(), branches[0].begin(), branches[0].end());
        out.push_back(std::move(obj));
    }
    return out;
}

void write_object(std::ostream& os, const ManifoldObject& obj, const std::string& model)
{
    os << std::setprecision(17);
    os << "# object=" << obj.kind;
    if (obj.kind == "isostable")
        os << " i=" << obj.family << " c=" << obj.level;
    os << " theta=" << obj.theta << " model=" << model << "\n";
    for (const auto& n : obj.notes)
        os << "# note: " << n << "\n";
    os << "# x1 x2 x3 theta sigma1 sigma2 Nk gradTheta_1 gradTheta_2 gradTheta_3 gradSigma1_1 gradSigma1_2 "
          "gradSigma1_3 gradSigma2_1 gradSigma2_2 gradSigma2_3\n";
    for (const auto& p : obj.points) {
        os << p.x(0) << ' ' << p.x(1) << ' ' << p.x(2) << ' ' << p.theta << ' ' << p.sigma1 << ' ' << p.sigma2 << ' '
           << p.periods;
        for (const Vec3* v : {&p.grad_theta, &p.grad_sigma1, &p.grad_sigma2})
            os << ' ' << (*v)(0) << ' ' << (*v)(1) << ' ' << (*v)(2);
        os << "\n";
    }
}

ManifoldObject read_object(std::istream& is)
{
    ManifoldObject obj;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (line.rfind("# object=", 0) == 0) {
                std::istringstream hs(line.substr(2));
                std::string kv;
                while (hs >> kv) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        continue;
                    const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                    if (k == "object")
                        obj.kind = v;
                    else if (k == "theta")
                        obj.theta = std::stod(v);
                    else if (k == "i")
                        obj.family = std::stoi(v);
                    else if (k == "c")
                        obj.level = std::stod(v);
                }
            } else if (line.rfind("# note: ", 0) == 0) {
                obj.notes.push_back(line.substr(8));
            }
            continue;
        }
        std::istringstream ls(line);
        AtlasPoint p;
        ls >> p.x(0) >> p.x(1) >> p.x(2) >> p.theta >> p.sigma1 >> p.sigma2 >> p.periods;
        for (Vec3* v : {&p.grad_theta, &p.grad_sigma1, &p.grad_sigma2})
            ls >> (*v)(0) >> (*v)(1) >> (*v)(2);
        if (!ls)
            throw UsageError("malformed point-cloud row: " + line);
        obj.points.push_back(p);
    }
    return obj;
}

} // namespace phamp
