#include "phamp/strobe.hpp"

namespace phamp {

void StimulusSpec::validate() const
{
    if (!(Ts > 0.0))
        throw UsageError("interpulse time must be positive");
    if (n < 1)
        throw UsageError("a train needs at least one pulse");
    if (!(Tp >= 0.0))
        throw UsageError("intertrain time must be non-negative");
    if (!v.allFinite() || !std::isfinite(eps))
        throw UsageError("stimulus amplitude and direction must be finite");
}

MapKind parse_map_kind(const std::string& s)
{
    if (s == "state")
        return MapKind::State;
    if (s == "pa")
        return MapKind::PhaseAmplitude;
    if (s == "pa-lin")
        return MapKind::PhaseAmplitudeLinear;
    if (s == "slow")
        return MapKind::Slow;
    if (s == "phase")
        return MapKind::Phase;
    throw UsageError("unknown map '" + s + "' (state, pa, pa-lin, slow, phase)");
}

std::string to_string(MapKind k)
{
    switch (k) {
    case MapKind::State:
        return "state";
    case MapKind::PhaseAmplitude:
        return "pa";
    case MapKind::PhaseAmplitudeLinear:
        return "pa-lin";
    case MapKind::Slow:
        return "slow";
    case MapKind::Phase:
        return "phase";
    }
    return "?";
}

StroboscopicMap::StroboscopicMap(const PhaseAmplitude& pa, StimulusSpec stim, MapKind kind)
    : pa_(pa), stim_(stim), kind_(kind)
{
    stim_.validate();
}

MapPoint StroboscopicMap::on_cycle(double theta) const
{
    MapPoint p;
    p.theta = wrap_phase(theta);
    p.x = pa_.map().evaluate(p.theta, 0.0, 0.0);
    p.has_state = true;
    return p;
}

Vec3 StroboscopicMap::state_of(const MapPoint& p) const
{
    if (kind_ == MapKind::State || p.has_state)
        return p.x;
    return pa_.evaluate(p.theta, p.s1, p.s2, false, false).x;
}

double StroboscopicMap::distance(const MapPoint& a, const MapPoint& b) const
{
    if (kind_ == MapKind::State || (a.has_state && b.has_state))
        return (a.x - b.x).norm();
    return std::abs(phase_distance(a.theta, b.theta)) + std::abs(a.s1 - b.s1) + std::abs(a.s2 - b.s2);
}

MapPoint StroboscopicMap::kick(const MapPoint& p) const
{
    const double T = pa_.T();
    const double l1 = pa_.lambda(1), l2 = pa_.lambda(2);
    const double Ts = stim_.Ts;
    const Vec3 dv = stim_.eps * stim_.v;
    MapPoint q = p;
    switch (kind_) {
    case MapKind::State:
    case MapKind::PhaseAmplitude:
        // The exact map is kicked in state space; apply() reads the
        // coordinates once per train.
        q.x = flow(pa_.field(), p.x + dv, Ts, pa_.ode());
        return q;
    case MapKind::PhaseAmplitudeLinear:
    case MapKind::Slow: {
        const double s1 = kind_ == MapKind::Slow ? 0.0 : p.s1;
        const ResponseEval r = pa_.evaluate(p.theta, s1, p.s2, true, false);
        if (r.truncated)
            throw NumericalError("strobe: response propagation failed at theta = " + std::to_string(p.theta));
        q.theta = p.theta + r.grad_theta.dot(dv) + Ts / T;
        q.s1 = kind_ == MapKind::Slow ? 0.0 : (s1 + r.grad_sigma1.dot(dv)) * std::exp(l1 * Ts);
        q.s2 = (p.s2 + r.grad_sigma2.dot(dv)) * std::exp(l2 * Ts);
        break;
    }
    case MapKind::Phase: {
        const ResponseEval r = local_response(pa_.map(), p.theta, 0.0, 0.0);
        q.theta = p.theta + r.grad_theta.dot(dv) + Ts / T;
        q.s1 = q.s2 = 0.0;
        break;
    }
    }
    q.theta = wrap_phase(q.theta);
    q.has_state = false;
    return q;
}

MapPoint StroboscopicMap::apply(const MapPoint& p) const
{
    MapPoint q = p;
    if (kind_ == MapKind::PhaseAmplitude && !q.has_state) {
        q.x = state_of(q);
        q.has_state = true;
    }
    for (int j = 0; j < stim_.n; ++j)
        q = kick(q);
    const double Tp = stim_.Tp;
    if (kind_ == MapKind::State || kind_ == MapKind::PhaseAmplitude) {
        q.x = flow(pa_.field(), q.x, Tp, pa_.ode());
        if (kind_ == MapKind::PhaseAmplitude) {
            const Coordinates c = pa_.coordinates_of(q.x);
            q.theta = c.theta;
            q.s1 = c.sigma1;
            q.s2 = c.sigma2;
        }
        return q;
    }
    q.theta = wrap_phase(q.theta + Tp / pa_.T());
    q.s1 *= std::exp(pa_.lambda(1) * Tp);
    q.s2 *= std::exp(pa_.lambda(2) * Tp);
    return q;
}

std::vector<MapPoint> iterate(const StroboscopicMap& F, const MapPoint& start, int count)
{
    std::vector<MapPoint> out{start};
    out.reserve(static_cast<size_t>(count) + 1);
    for (int i = 0; i < count; ++i)
        out.push_back(F.apply(out.back()));
    return out;
}

namespace {

Vec3 pack(const StroboscopicMap& F, const MapPoint& p)
{
    return F.kind() == MapKind::State ? p.x : Vec3(p.theta, p.s1, p.s2);
}

MapPoint unpack(const StroboscopicMap& F, const Vec3& v)
{
    MapPoint p;
    if (F.kind() == MapKind::State)
        p.x = v;
    else {
        p.theta = wrap_phase(v(0));
        p.s1 = F.kind() == MapKind::PhaseAmplitude || F.kind() == MapKind::PhaseAmplitudeLinear ? v(1) : 0.0;
        p.s2 = F.kind() == MapKind::Phase ? 0.0 : v(2);
    }
    return p;
}

// F(p) - p with the phase difference taken on the circle.
Vec3 defect(const StroboscopicMap& F, const MapPoint& p)
{
    const MapPoint q = F.apply(p);
    Vec3 d = pack(F, q) - pack(F, p);
    if (F.kind() != MapKind::State)
        d(0) = phase_distance(q.theta, p.theta);
    return d;
}

} // namespace

FixedPointRecord fixed_point(const StroboscopicMap& F, const MapPoint& guess, double tol, int max_iterations,
                             int stall_window)
{
    FixedPointRecord rec;
    MapPoint p = guess;
    double step = std::numeric_limits<double>::infinity();
    double best = step;
    int best_at = 0;
    std::vector<MapPoint> tail;
    int it = 0;
    for (; it < max_iterations; ++it) {
        const MapPoint q = F.apply(p);
        step = F.distance(p, q);
        p = q;
        if (step < tol)
            break;
        if (step < 0.5 * best) {
            best = step;
            best_at = it;
        }
        tail.push_back(p);
        if (static_cast<int>(tail.size()) > stall_window)
            tail.erase(tail.begin());
        if (stall_window > 0 && it - best_at >= stall_window) {
            // Updates stopped shrinking: report the mean of the last window
            // and its spread.
            Vec3 mean = Vec3::Zero();
            const Vec3 ref = pack(F, tail.back());
            std::vector<Vec3> rel;
            for (const MapPoint& m : tail) {
                Vec3 v = pack(F, m);
                if (F.kind() != MapKind::State)
                    v(0) = ref(0) + phase_distance(m.theta, tail.back().theta);
                rel.push_back(v);
                mean += v;
            }
            mean /= static_cast<double>(rel.size());
            double spread = 0.0;
            for (const Vec3& v : rel)
                spread = std::max(spread, (v - mean).cwiseAbs().maxCoeff());
            rec.point = unpack(F, mean);
            rec.iterations = it + 1;
            rec.step = step;
            rec.converged = false;
            rec.spread = spread;
            rec.state = tail.back().has_state ? tail.back().x : F.state_of(rec.point);
            return rec;
        }
    }
    rec.iterations = it;
    if (!(step < tol)) {
        // Newton on F(p) - p over the map's active variables.
        const int dim = F.kind() == MapKind::Phase ? 1
                        : F.kind() == MapKind::Slow ? 2
                                                      : 3;
        const int idx[3] = {0, dim == 2 ? 2 : 1, 2};
        for (int k = 0; k < 30; ++k) {
            const Vec3 d0 = defect(F, p);
            Eigen::MatrixXd J(dim, dim);
            Eigen::VectorXd r(dim);
            for (int a = 0; a < dim; ++a)
                r(a) = d0(idx[a]);
            if (r.norm() < tol) {
                step = r.norm();
                break;
            }
            const Vec3 base = pack(F, p);
            for (int b = 0; b < dim; ++b) {
                Vec3 v = base;
                const double h = 1e-6 * std::max(1.0, std::abs(base(idx[b])));
                v(idx[b]) += h;
                const Vec3 d1 = defect(F, unpack(F, v));
                for (int a = 0; a < dim; ++a)
                    J(a, b) = (d1(idx[a]) - d0(idx[a])) / h;
            }
            const Eigen::VectorXd dx = J.fullPivLu().solve(-r);
            Vec3 v = base;
            for (int a = 0; a < dim; ++a)
                v(idx[a]) += dx(a);
            p = unpack(F, v);
            step = dx.norm();
            rec.newton = true;
            if (step < tol)
                break;
        }
        if (!(step < tol))
            throw ConvergenceError("strobe: fixed point not found (last update " + std::to_string(step) + ")");
    }
    rec.point = p;
    rec.step = step;
    rec.state = F.state_of(p);
    return rec;
}

FiniteResponse prf_arf_finite(const PhaseAmplitude& pa, double A, const Vec3& v, double theta, double s1, double s2)
{
    FiniteResponse r;
    if (A == 0.0)
        return r;
    const Vec3 x = pa.evaluate(theta, s1, s2, false, false).x + A * v;
    const Coordinates c = pa.coordinates_of(x);
    r.dtheta = phase_distance(c.theta, theta);
    r.dsigma1 = c.sigma1 - s1;
    r.dsigma2 = c.sigma2 - s2;
    return r;
}

} // namespace phamp
