#pragma once

#include "phamp/types.hpp"

#include <vector>

namespace phamp {

/// Truncated Taylor polynomial in (sigma1, sigma2) whose coefficients are
/// scalar functions sampled on a common theta grid of n points.
///
/// Coefficients are graded by total degree m and, inside a degree, by the
/// sigma1 exponent in descending order:
///   index(a, b) = m (m + 1) / 2 + b,   m = a + b.
class Jet2 {
public:
    Jet2() = default;
    Jet2(int order, int points);

    static Jet2 constant(int order, int points, double value);
    static Jet2 constant(int order, const Eigen::ArrayXd& value);
    /// sigma1 (which = 0) or sigma2 (which = 1) as a jet.
    static Jet2 variable(int order, int points, int which);

    static int count(int order) { return (order + 1) * (order + 2) / 2; }
    static int index(int a, int b)
    {
        const int m = a + b;
        return m * (m + 1) / 2 + b;
    }

    int order() const { return order_; }
    int points() const { return points_; }

    Eigen::ArrayXd& operator()(int a, int b) { return c_[static_cast<size_t>(index(a, b))]; }
    const Eigen::ArrayXd& operator()(int a, int b) const { return c_[static_cast<size_t>(index(a, b))]; }
    Eigen::ArrayXd& at(int idx) { return c_[static_cast<size_t>(idx)]; }
    const Eigen::ArrayXd& at(int idx) const { return c_[static_cast<size_t>(idx)]; }

    /// Pointwise value of the polynomial at (s1, s2), one entry per grid node.
    Eigen::ArrayXd evaluate(double s1, double s2) const;
    /// Keeps orders <= order.
    Jet2 restricted(int order) const;

    Jet2& operator+=(const Jet2& g);
    Jet2& operator-=(const Jet2& g);
    Jet2& operator*=(double s);
    Jet2& operator+=(double s);

private:
    int order_ = 0;
    int points_ = 0;
    std::vector<Eigen::ArrayXd> c_;
};

Jet2 operator+(Jet2 f, const Jet2& g);
Jet2 operator-(Jet2 f, const Jet2& g);
Jet2 operator*(const Jet2& f, const Jet2& g);
Jet2 operator/(const Jet2& f, const Jet2& g);
Jet2 operator-(Jet2 f);

Jet2 operator+(Jet2 f, double s);
Jet2 operator+(double s, Jet2 f);
Jet2 operator-(Jet2 f, double s);
Jet2 operator-(double s, const Jet2& f);
Jet2 operator*(Jet2 f, double s);
Jet2 operator*(double s, Jet2 f);
Jet2 operator/(Jet2 f, double s);
Jet2 operator/(double s, const Jet2& f);

Jet2 exp(const Jet2& f);
Jet2 log(const Jet2& f);
Jet2 pow(const Jet2& f, double p);
Jet2 sqrt(const Jet2& f);
Jet2 sin(const Jet2& f);
Jet2 cos(const Jet2& f);
void sincos(const Jet2& f, Jet2& s, Jet2& c);
Jet2 reciprocal(const Jet2& f);
Jet2 ipow(const Jet2& f, int k);
Jet2 square(const Jet2& f);

} // namespace phamp
