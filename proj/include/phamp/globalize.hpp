#pragma once

#include "phamp/domain.hpp"
#include "phamp/response.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace phamp {

struct Coordinates {
    double theta = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0;
    int periods = 0; // whole periods flowed forward before inversion
};

/// Global phase-amplitude coordinates built on a local parameterization:
/// forward flow into the accuracy domain, then inversion of K.
class PhaseAmplitude {
public:
    PhaseAmplitude(const VectorField& X, const TaylorFourierMap& K, const AccuracyDomain& D, OdeTolerance ode = {},
                   int max_periods = 400);

    const VectorField& field() const { return X_; }
    const TaylorFourierMap& map() const { return K_; }
    const AccuracyDomain& domain() const { return D_; }
    const OdeTolerance& ode() const { return ode_; }
    double T() const { return K_.T(); }
    double lambda(int i) const { return i == 1 ? K_.lambda1() : K_.lambda2(); }

    /// Newton inversion of K near x. Succeeds only if the solution lies in
    /// the accuracy domain.
    bool invert_local(const Vec3& x, double& theta, double& s1, double& s2) const;

    /// (Theta, Sigma1, Sigma2) of x.
    Coordinates coordinates_of(const Vec3& x) const;

    /// K(theta, sigma) anywhere: the smallest pull-back time t >= 0 (whole
    /// periods if `whole_periods`) bringing (theta + t/T, sigma e^{lambda t})
    /// into the domain, then backward flow for t. Responses are carried
    /// along when `with_response`. `t_back` receives t.
    ResponseEval evaluate(double theta, double s1, double s2, bool with_response = true, bool whole_periods = true,
                          double* t_back = nullptr) const;

private:
    bool newton_local(double& th, double& a, double& b, const Vec3& x, double reach, double scale) const;

    const VectorField& X_;
    const TaylorFourierMap& K_;
    const AccuracyDomain& D_;
    OdeTolerance ode_;
    int max_periods_;
};

struct GlobalizationConfig {
    double delta_max = 0.0; // <= 0 selects 1% of the cycle's bounding-box diagonal
    Box omega_c;
    int max_periods = 60;
    int max_points = 200000;
    int max_sweep_points = 2000; // per one-sided sweep
    int anchor_stride = 1; // isochrons: sweep every k-th slow-leaf point
    bool with_response = true;
    // Sweeps stop where |grad Theta| |x| ode.rel exceeds this (needs responses).
    double phase_resolution = 1e-6;
    OdeTolerance ode;
};

double default_delta_max(const TaylorFourierMap& K);

struct AtlasPoint {
    Vec3 x = Vec3::Zero();
    double theta = 0.0, sigma1 = 0.0, sigma2 = 0.0;
    double periods = 0.0;             // backward integration time / T
    double seed1 = 0.0, seed2 = 0.0;  // local amplitudes the point was flowed back from
    Vec3 grad_theta = Vec3::Zero(), grad_sigma1 = Vec3::Zero(), grad_sigma2 = Vec3::Zero();
    bool truncated = false;
};

struct ManifoldObject {
    std::string kind; // slow-leaf, fast-leaf, isochron, isostable
    double theta = 0.0;
    int family = 0;     // isostable index i
    double level = 0.0; // isostable value c
    std::vector<AtlasPoint> points;
    std::vector<std::string> notes;
};

/// Leaf {sigma_other = 0} of phase theta grown along sigma_axis; axis 2 gives
/// the slow-manifold leaf S^theta, axis 1 the fast leaf. Both signs; points
/// are ordered along the curve.
ManifoldObject grow_leaf(const PhaseAmplitude& pa, double theta, int axis, const GlobalizationConfig& cfg);
inline ManifoldObject grow_slow_leaf(const PhaseAmplitude& pa, double theta, const GlobalizationConfig& cfg)
{
    return grow_leaf(pa, theta, 2, cfg);
}

/// Isochron of phase theta swept in sigma1 from the points of its slow leaf.
ManifoldObject grow_isochron(const PhaseAmplitude& pa, double theta, const ManifoldObject& slow_leaf,
                             const GlobalizationConfig& cfg);

/// Isostable {Sigma_i = c} over the given phases, flowed back from the local
/// isostable {sigma_i = c_star}. c_star = 0 picks a level inside the domain;
/// c = 0 grows the corresponding leaves instead.
std::vector<ManifoldObject> grow_isostable(const PhaseAmplitude& pa, int i, double c, const std::vector<double>& thetas,
                                           const GlobalizationConfig& cfg, double c_star = 0.0);

void write_object(std::ostream& os, const ManifoldObject& obj, const std::string& model);
ManifoldObject read_object(std::istream& is);

} // namespace phamp
