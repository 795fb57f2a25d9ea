#pragma once

#include "phamp/invariance.hpp"

namespace phamp {

struct ResponseEval {
    Vec3 x = Vec3::Zero();
    double theta = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0;
    Vec3 grad_theta = Vec3::Zero();
    Vec3 grad_sigma1 = Vec3::Zero();
    Vec3 grad_sigma2 = Vec3::Zero();
    bool truncated = false; // backward propagation stopped early

    /// Rows grad_theta, grad_sigma1, grad_sigma2.
    Mat3 rows() const;
};

/// Rows of DK(theta, sigma)^{-1}; throws NumericalError if |det DK| < 1e-12.
ResponseEval local_response(const TaylorFourierMap& K, double theta, double s1, double s2);
ResponseEval local_response(const LocalSlice& s, double s1, double s2);

/// sigma-power expansion of DK^{-1} to order L-1. Each coefficient is a
/// 9-column grid holding the 3x3 matrix row-major, rows as in ResponseEval.
class ResponseSeries {
public:
    ResponseSeries() = default;
    explicit ResponseSeries(const TaylorFourierMap& K);

    int order() const { return order_; }
    int size() const { return n_; }
    const PeriodicGrid& coeff(int a, int b) const { return B_[static_cast<size_t>(Jet2::index(a, b))]; }
    Mat3 coeff_at(int a, int b, int i) const { return grid_matrix(coeff(a, b), i); }
    Mat3 evaluate(double theta, double s1, double s2) const;

private:
    int order_ = 0;
    int n_ = 0;
    std::vector<PeriodicGrid> B_;
};

/// Integrates the adjoint equations from `start` for a time -dt (dt > 0 goes
/// backwards), carrying the state along. On integrator failure the last
/// good values are returned with `truncated` set. theta and sigma keep
/// the values of `start`.
ResponseEval propagate_response(const VectorField& X, const ResponseEval& start, double dt, double lambda1,
                                double lambda2, const OdeTolerance& tol = {});

} // namespace phamp
