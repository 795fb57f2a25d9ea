#include "phamp/domain.hpp"

#include <numbers>

namespace phamp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double AccuracyDomain::phi(int j) const { return kTwoPi * j / n_angles; }

double AccuracyDomain::radius(double th, double ph) const
{
    const int rows_ = rows();
    const double x = wrap_phase(th) * n_grid / stride;
    const int i0 = static_cast<int>(std::floor(x)) % rows_;
    const int i1 = std::abs(x - std::round(x)) < 1e-9 ? (static_cast<int>(std::round(x)) % rows_) : (i0 + 1) % rows_;
    const int i0e = std::abs(x - std::round(x)) < 1e-9 ? i1 : i0;
    const double y = wrap_phase(ph / kTwoPi) * n_angles;
    const int j0 = static_cast<int>(std::floor(y)) % n_angles;
    const int j1 = std::abs(y - std::round(y)) < 1e-9 ? (static_cast<int>(std::round(y)) % n_angles) : (j0 + 1) % n_angles;
    const int j0e = std::abs(y - std::round(y)) < 1e-9 ? j1 : j0;
    return std::min({R(i0e, j0e), R(i0e, j1), R(i1, j0e), R(i1, j1)});
}

bool AccuracyDomain::contains(double th, double s1, double s2) const
{
    const double r = std::hypot(s1, s2);
    if (r == 0.0)
        return true;
    return r < radius(th, std::atan2(s2, s1));
}

double AccuracyDomain::line_extent(double th, double fixed, double dir, int axis) const
{
    auto inside = [&](double s) { return axis == 1 ? contains(th, s, fixed) : contains(th, fixed, s); };
    if (!inside(0.0))
        return 0.0;
    const double sgn = dir < 0.0 ? -1.0 : 1.0;
    const int steps = 400;
    const double h = r_max / steps;
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= steps; ++k) {
        if (!inside(sgn * k * h)) {
            hi = k * h;
            break;
        }
        lo = k * h;
    }
    if (hi < 0.0)
        return r_max;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(sgn * mid) ? lo : hi) = mid;
    }
    return lo;
}

double residual_norm(const VectorField& X, const LocalSlice& s, double r, double phi)
{
    try {
        const double e = s.residual(X, r * std::cos(phi), r * std::sin(phi)).norm();
        return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
    }
}

double ray_radius(const VectorField& X, const LocalSlice& s, double phi, const DomainOptions& opt, bool* capped,
                  double* e_at_radius)
{
    auto f = [&](double r) { return residual_norm(X, s, r, phi); };
    const double tol = opt.e_tol;
    double lo, hi;
    double flo;
    if (capped)
        *capped = false;
    double r = opt.r0;
    double fr = f(r);
    if (fr >= tol) {
        hi = r;
        lo = r / 2.0;
        flo = f(lo);
        while (flo >= tol && lo > 1e-12) {
            hi = lo;
            lo /= 2.0;
            flo = f(lo);
        }
        if (flo >= tol) {
            if (e_at_radius)
                *e_at_radius = f(0.0);
            return 0.0;
        }
    } else {
        lo = r;
        flo = fr;
        hi = 2.0 * r;
        double fh = f(hi);
        while (fh < tol) {
            lo = hi;
            flo = fh;
            if (hi >= opt.r_max) {
                if (capped)
                    *capped = true;
                if (e_at_radius)
                    *e_at_radius = flo;
                return opt.r_max;
            }
            hi = std::min(2.0 * hi, opt.r_max);
            fh = f(hi);
        }
    }
    while (hi - lo > opt.rel_tol * lo) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm < tol) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if (e_at_radius)
        *e_at_radius = flo;
    return lo;
}

AccuracyDomain compute_accuracy_domain(const VectorField& X, const TaylorFourierMap& K, const DomainOptions& opt)
{
    if (opt.stride < 1 || K.size() % opt.stride != 0)
        throw UsageError("domain stride must divide N");
    if (opt.n_angles < 4 || opt.n_angles % 4 != 0)
        throw UsageError("number of angles must be a positive multiple of 4");
    AccuracyDomain d;
    d.e_tol = opt.e_tol;
    d.n_grid = K.size();
    d.stride = opt.stride;
    d.n_angles = opt.n_angles;
    d.r_max = opt.r_max;
    const int rows = K.size() / opt.stride;
    d.R.resize(rows, opt.n_angles);
    d.boundary.resize(rows, opt.n_angles);
    d.capped.resize(rows, opt.n_angles);
    for (int i = 0; i < rows; ++i) {
        const LocalSlice s = K.node(i * opt.stride);
        for (int j = 0; j < opt.n_angles; ++j) {
            bool cap = false;
            double e = 0.0;
            d.R(i, j) = ray_radius(X, s, d.phi(j), opt, &cap, &e);
            d.boundary(i, j) = e;
            d.capped(i, j) = cap ? 1 : 0;
        }
    }
    return d;
}

} // namespace phamp
