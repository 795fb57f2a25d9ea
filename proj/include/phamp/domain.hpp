#pragma once

#include "phamp/invariance.hpp"

namespace phamp {

struct DomainOptions {
    double e_tol = 1e-8;
    int n_angles = 64;
    int stride = 1;     // theta rows every `stride` grid nodes
    double r_max = 100.0;
    double r0 = 1e-3;
    double rel_tol = 1e-3;
};

/// Radial extent R_theta(phi) of the region where |E(theta, r cos phi, r sin phi)| < e_tol,
/// sampled on theta_i = i stride / N and phi_j = 2 pi j / n_angles.
class AccuracyDomain {
public:
    double e_tol = 0.0;
    int n_grid = 0;
    int stride = 1;
    int n_angles = 0;
    double r_max = 0.0;
    Eigen::MatrixXd R;        // rows theta, cols phi
    Eigen::MatrixXd boundary; // |E| at the returned radius
    Eigen::MatrixXi capped;   // 1 where no crossing was found below r_max

    int rows() const { return static_cast<int>(R.rows()); }
    double theta(int i) const { return static_cast<double>(i) * stride / n_grid; }
    double phi(int j) const;

    /// Conservative radius: minimum over the samples bracketing (theta, phi).
    double radius(double theta, double phi) const;
    bool contains(double theta, double s1, double s2) const;
    /// Largest |s| such that sigma_axis = sign(dir) s, with the other
    /// amplitude held at `fixed`, stays inside (axis is 1 or 2).
    double line_extent(double theta, double fixed, double dir, int axis = 1) const;
};

/// |E(theta, r cos phi, r sin phi)| with non-finite values mapped to +inf.
double residual_norm(const VectorField& X, const LocalSlice& s, double r, double phi);

/// Largest r with |E| < e_tol along one ray, by geometric bracketing then
/// bisection to relative opt.rel_tol; the lower bracket is returned.
/// Assumes |E| is monotone in r along the ray.
double ray_radius(const VectorField& X, const LocalSlice& s, double phi, const DomainOptions& opt, bool* capped = nullptr,
                  double* e_at_radius = nullptr);

AccuracyDomain compute_accuracy_domain(const VectorField& X, const TaylorFourierMap& K, const DomainOptions& opt = {});

} // namespace phamp
