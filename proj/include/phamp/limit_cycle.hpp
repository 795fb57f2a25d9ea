#pragma once

#include "phamp/integrator.hpp"
#include "phamp/models.hpp"
#include "phamp/periodic_grid.hpp"

namespace phamp {

struct Orbit {
    Vec3 x0 = Vec3::Zero();
    double T = 0.0;
    int iterations = 0;
    double residual = 0.0; // |phi_T(x0) - x0|
};

struct LimitCycleOptions {
    int voltage_index = 0;
    double transient = 200.0;
    int max_iterations = 40;
    double tolerance = 1e-12;
    OdeTolerance ode;
};

/// Newton on the periodicity condition with a voltage section constraint,
/// then shifts the phase origin to the voltage maximum.
Orbit find_limit_cycle(const VectorField& X, const Vec3& guess, const LimitCycleOptions& opt = {});

struct FloquetData {
    double T = 0.0;
    Vec3 x0 = Vec3::Zero();
    PeriodicGrid gamma; // N x 3
    PeriodicGrid Phi;   // N x 9, row-major Phi(theta T)
    PeriodicGrid Q;     // N x 9, row-major Q(theta)
    Mat3 M, R, C, J;
    double mu1 = 0.0, mu2 = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;
    Vec3 v1 = Vec3::Zero(), v2 = Vec3::Zero();
    double trivial_residual = 0.0; // |M X(x0) - X(x0)| / |X(x0)|
    double closure = 0.0;          // |x(T) - x0| after sampling

    int size() const { return gamma.size(); }
    Mat3 Phi_at(int i) const;
    Mat3 Q_at(int i) const;
};

Mat3 grid_matrix(const PeriodicGrid& g, int i);
Eigen::Matrix<double, 1, 9> matrix_row(const Mat3& m);

/// Samples gamma and Phi at N phases and builds the Floquet normal form.
FloquetData monodromy_and_exponents(const VectorField& X, const Orbit& orbit, int n, const OdeTolerance& ode = {});

/// Builds C, R, J and Q from sampled Phi, the monodromy and the flow
/// direction at theta = 0. Throws UnsupportedCaseError for complex or
/// repeated multipliers and NumericalError for an ill-conditioned C.
void floquet_normal_form(FloquetData& fd, const Vec3& flow_direction);

struct ResonanceReport {
    double min_modulus = std::numeric_limits<double>::infinity();
    int alpha = -1;
    int beta = -1;
    int j = -1; // 1..3, matching lambda_{j-1} with lambda_0 = 0
    bool pass = true;
};

/// Scans |alpha lambda1 + beta lambda2 - lambda_{j-1}| over 2 <= alpha + beta <= L.
ResonanceReport check_nonresonance(double lambda1, double lambda2, int L, double threshold = 1e-6);

} // namespace phamp
