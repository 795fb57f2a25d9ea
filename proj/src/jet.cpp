#include "phamp/jet.hpp"

#include <cmath>
#include <string>

namespace phamp {

namespace {

void require_compatible(const Jet2& f, const Jet2& g)
{
    if (f.order() != g.order() || f.points() != g.points())
        throw UsageError("jet mismatch: order " + std::to_string(f.order()) + "/" + std::to_string(g.order()) +
                         ", points " + std::to_string(f.points()) + "/" + std::to_string(g.points()));
}

// Throws if any constant-term sample fails pred.
template <class Pred>
void require_pointwise(const Eigen::ArrayXd& f0, Pred pred, const char* what)
{
    for (Eigen::Index i = 0; i < f0.size(); ++i)
        if (!pred(f0(i)))
            throw DomainError(std::string(what) + ": constant term " + std::to_string(f0(i)) + " at grid index " +
                              std::to_string(i));
}

// Visits all (k, l) <= (a, b) componentwise, excluding (0, 0) and (a, b)
// as requested.
template <class F>
void for_lower(int a, int b, bool with_zero, bool with_top, F&& fn)
{
    for (int k = 0; k <= a; ++k)
        for (int l = 0; l <= b; ++l) {
            if (!with_zero && k == 0 && l == 0)
                continue;
            if (!with_top && k == a && l == b)
                continue;
            fn(k, l);
        }
}

} // namespace

Jet2::Jet2(int order, int points) : order_(order), points_(points)
{
    if (order < 0 || points <= 0)
        throw UsageError("jet: invalid order or size");
    c_.assign(static_cast<size_t>(count(order)), Eigen::ArrayXd::Zero(points));
}

Jet2 Jet2::constant(int order, int points, double value)
{
    Jet2 j(order, points);
    j.c_[0].setConstant(value);
    return j;
}

Jet2 Jet2::constant(int order, const Eigen::ArrayXd& value)
{
    Jet2 j(order, static_cast<int>(value.size()));
    j.c_[0] = value;
    return j;
}

Jet2 Jet2::variable(int order, int points, int which)
{
    Jet2 j(order, points);
    if (order >= 1)
        j(which == 0 ? 1 : 0, which == 0 ? 0 : 1).setOnes();
    return j;
}

Eigen::ArrayXd Jet2::evaluate(double s1, double s2) const
{
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(points_);
    std::vector<double> p1(static_cast<size_t>(order_ + 1), 1.0), p2(static_cast<size_t>(order_ + 1), 1.0);
    for (int i = 1; i <= order_; ++i) {
        p1[i] = p1[i - 1] * s1;
        p2[i] = p2[i - 1] * s2;
    }
    for (int m = 0; m <= order_; ++m)
        for (int a = m; a >= 0; --a)
            v += (*this)(a, m - a) * (p1[a] * p2[m - a]);
    return v;
}

Jet2 Jet2::restricted(int order) const
{
    if (order > order_)
        throw UsageError("jet: cannot restrict to a higher order");
    Jet2 j(order, points_);
    for (int i = 0; i < count(order); ++i)
        j.c_[i] = c_[i];
    return j;
}

Jet2& Jet2::operator+=(const Jet2& g)
{
    require_compatible(*this, g);
    for (size_t i = 0; i < c_.size(); ++i)
        c_[i] += g.c_[i];
    return *this;
}

Jet2& Jet2::operator-=(const Jet2& g)
{
    require_compatible(*this, g);
    for (size_t i = 0; i < c_.size(); ++i)
        c_[i] -= g.c_[i];
    return *this;
}

Jet2& Jet2::operator*=(double s)
{
    for (auto& c : c_)
        c *= s;
    return *this;
}

Jet2& Jet2::operator+=(double s)
{
    c_[0] += s;
    return *this;
}

Jet2 operator+(Jet2 f, const Jet2& g) { return f += g; }
Jet2 operator-(Jet2 f, const Jet2& g) { return f -= g; }
Jet2 operator-(Jet2 f) { return f *= -1.0; }
Jet2 operator+(Jet2 f, double s) { return f += s; }
Jet2 operator+(double s, Jet2 f) { return f += s; }
Jet2 operator-(Jet2 f, double s) { return f += -s; }
Jet2 operator-(double s, const Jet2& f) { return -f + s; }
Jet2 operator*(Jet2 f, double s) { return f *= s; }
Jet2 operator*(double s, Jet2 f) { return f *= s; }
Jet2 operator/(Jet2 f, double s) { return f *= 1.0 / s; }
Jet2 operator/(double s, const Jet2& f) { return reciprocal(f) *= s; }
Jet2 operator/(const Jet2& f, const Jet2& g) { return f * reciprocal(g); }

Jet2 operator*(const Jet2& f, const Jet2& g)
{
    require_compatible(f, g);
    const int L = f.order();
    Jet2 h(L, f.points());
    for (int m = 0; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            Eigen::ArrayXd& out = h(a, b);
            for_lower(a, b, true, true, [&](int k, int l) { out += f(k, l) * g(a - k, b - l); });
        }
    return h;
}

Jet2 square(const Jet2& f) { return f * f; }

Jet2 ipow(const Jet2& f, int k)
{
    if (k < 0)
        return reciprocal(ipow(f, -k));
    Jet2 result = Jet2::constant(f.order(), f.points(), 1.0);
    Jet2 base = f;
    while (k > 0) {
        if (k & 1)
            result = result * base;
        k >>= 1;
        if (k)
            base = base * base;
    }
    return result;
}

// m e_n = sum_{0 < j <= n} |j| f_j e_{n-j}
Jet2 exp(const Jet2& f)
{
    const int L = f.order();
    Jet2 e(L, f.points());
    e(0, 0) = f(0, 0).exp();
    for (int m = 1; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(f.points());
            for_lower(a, b, false, true, [&](int k, int l) { acc += static_cast<double>(k + l) * f(k, l) * e(a - k, b - l); });
            e(a, b) = acc / m;
        }
    return e;
}

// g_n = -(1/f_0) sum_{0 < j <= n} f_j g_{n-j}
Jet2 reciprocal(const Jet2& f)
{
    const int L = f.order();
    require_pointwise(f(0, 0), [](double v) { return v != 0.0 && std::isfinite(v); }, "reciprocal");
    Jet2 g(L, f.points());
    const Eigen::ArrayXd inv = f(0, 0).inverse();
    g(0, 0) = inv;
    for (int m = 1; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(f.points());
            for_lower(a, b, false, true, [&](int k, int l) { acc += f(k, l) * g(a - k, b - l); });
            g(a, b) = -acc * inv;
        }
    return g;
}

// m f_0 g_n = m f_n - sum_{0 < j < n} |j| g_j f_{n-j}
Jet2 log(const Jet2& f)
{
    const int L = f.order();
    require_pointwise(f(0, 0), [](double v) { return v > 0.0; }, "log");
    Jet2 g(L, f.points());
    const Eigen::ArrayXd inv = f(0, 0).inverse();
    g(0, 0) = f(0, 0).log();
    for (int m = 1; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            Eigen::ArrayXd acc = static_cast<double>(m) * f(a, b);
            for_lower(a, b, false, false, [&](int k, int l) { acc -= static_cast<double>(k + l) * g(k, l) * f(a - k, b - l); });
            g(a, b) = acc * inv / m;
        }
    return g;
}

// m f_0 g_n = sum_{j < n} (p |n - j| - |j|) g_j f_{n-j}
Jet2 pow(const Jet2& f, double p)
{
    const int L = f.order();
    if (p == std::floor(p) && std::abs(p) <= 16.0)
        return ipow(f, static_cast<int>(p));
    require_pointwise(f(0, 0), [](double v) { return v > 0.0; }, "pow");
    Jet2 g(L, f.points());
    const Eigen::ArrayXd inv = f(0, 0).inverse();
    g(0, 0) = f(0, 0).pow(p);
    for (int m = 1; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(f.points());
            for_lower(a, b, true, false, [&](int k, int l) {
                const double w = p * (m - k - l) - (k + l);
                acc += w * g(k, l) * f(a - k, b - l);
            });
            g(a, b) = acc * inv / m;
        }
    return g;
}

Jet2 sqrt(const Jet2& f) { return pow(f, 0.5); }

// m s_n = sum_{j < n} |n - j| c_j f_{n-j},  m c_n = -sum_{j < n} |n - j| s_j f_{n-j}
void sincos(const Jet2& f, Jet2& s, Jet2& c)
{
    const int L = f.order();
    s = Jet2(L, f.points());
    c = Jet2(L, f.points());
    s(0, 0) = f(0, 0).sin();
    c(0, 0) = f(0, 0).cos();
    for (int m = 1; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            Eigen::ArrayXd as = Eigen::ArrayXd::Zero(f.points());
            Eigen::ArrayXd ac = Eigen::ArrayXd::Zero(f.points());
            for_lower(a, b, true, false, [&](int k, int l) {
                const double w = m - k - l;
                as += w * c(k, l) * f(a - k, b - l);
                ac -= w * s(k, l) * f(a - k, b - l);
            });
            s(a, b) = as / m;
            c(a, b) = ac / m;
        }
}

Jet2 sin(const Jet2& f)
{
    Jet2 s, c;
    sincos(f, s, c);
    return s;
}

Jet2 cos(const Jet2& f)
{
    Jet2 s, c;
    sincos(f, s, c);
    return c;
}

} // namespace phamp
