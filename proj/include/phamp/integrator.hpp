#pragma once

#include "phamp/models.hpp"
#include "phamp/types.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <string>

namespace phamp {

struct OdeTolerance {
    double abs = 1e-14;
    double rel = 1e-14;
    double blowup = 1e6;
    long max_steps = 2000000;
};

template <size_t D>
using OdeState = std::array<double, D>;

/// Adaptive Runge-Kutta-Fehlberg 7(8) from t0 to t1 (either direction),
/// landing exactly on t1. Throws NumericalError on step failure, a
/// non-finite state or |x|_inf > tol.blowup.
template <size_t D, class Sys>
void integrate(Sys&& sys, OdeState<D>& x, double t0, double t1, const OdeTolerance& tol = {})
{
    namespace ode = boost::numeric::odeint;
    using Stepper = ode::runge_kutta_fehlberg78<OdeState<D>>;
    auto stepper = ode::make_controlled<Stepper>(tol.abs, tol.rel);
    if (t1 == t0)
        return;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double dt = dir * std::min(0.01, std::abs(t1 - t0));
    long steps = 0;
    int fails = 0;
    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + dt - t1) > 0.0)
            dt = t1 - t;
        const double before = t;
        const auto res = stepper.try_step(sys, x, t, dt);
        if (res == ode::fail) {
            if (++fails > 500 || std::abs(dt) < 1e-15 * std::max(1.0, std::abs(t)))
                throw NumericalError("integrator: step size underflow at t = " + std::to_string(t));
            continue;
        }
        fails = 0;
        if (dir * (t1 - t) < 1e-14 * std::max(1.0, std::abs(t1)) || t == before)
            t = t1;
        double worst = 0.0;
        for (double v : x) {
            if (!std::isfinite(v))
                throw NumericalError("integrator: non-finite state at t = " + std::to_string(t));
            worst = std::max(worst, std::abs(v));
        }
        if (worst > tol.blowup)
            throw NumericalError("integrator: state blowup at t = " + std::to_string(t));
        if (++steps > tol.max_steps)
            throw NumericalError("integrator: step limit exceeded");
    }
}

/// Flow of X alone.
Vec3 flow(const VectorField& X, const Vec3& x, double t, const OdeTolerance& tol = {});

/// Flow together with the fundamental matrix: Phi' = DX Phi, Phi(0) = Phi0.
void flow_variational(const VectorField& X, Vec3& x, Mat3& Phi, double t, const OdeTolerance& tol = {});

/// Co-integrates x' = X(x), p' = -DX^T p, q_i' = (lambda_i - DX^T) q_i for
/// time t (negative t runs backwards).
void flow_adjoint(const VectorField& X, Vec3& x, Vec3& p, Vec3& q1, Vec3& q2, double lambda1, double lambda2, double t,
                  const OdeTolerance& tol = {});

} // namespace phamp
