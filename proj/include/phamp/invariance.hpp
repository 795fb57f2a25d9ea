#pragma once

#include "phamp/jet.hpp"
#include "phamp/limit_cycle.hpp"
#include "phamp/periodic_grid.hpp"

#include <memory>
#include <vector>

namespace phamp {

struct SolverOptions {
    int L = 10;
    int N = 2048;
    double b1 = 1.0;
    double b2 = 1.0;
    double e_tail = 1e-10;
    bool auto_double = true;
    int n_max = 1 << 16;
    double resonance_threshold = 1e-6;
    OdeTolerance ode;
};

/// K and its theta-derivative at one phase, with the sigma-polynomial
/// evaluated exactly.
struct LocalSlice {
    double theta = 0.0;
    int L = 0;
    double T = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;
    std::vector<Vec3> k;  // K_{a,b}(theta), graded index
    std::vector<Vec3> dk; // d/dtheta K_{a,b}(theta)

    Vec3 value(double s1, double s2) const;
    /// Columns dK/dtheta, dK/dsigma1, dK/dsigma2.
    Mat3 jacobian(double s1, double s2) const;
    /// (1/T) dK/dtheta + sum lambda_i sigma_i dK/dsigma_i - X(K).
    Vec3 residual(const VectorField& X, double s1, double s2) const;
};

class TaylorFourierMap {
public:
    TaylorFourierMap() = default;
    TaylorFourierMap(std::shared_ptr<const FloquetData> fd, int L, double b1, double b2);

    int order() const { return L_; }
    int size() const { return fd_->size(); }
    double b1() const { return b1_; }
    double b2() const { return b2_; }
    double T() const { return fd_->T; }
    double lambda1() const { return fd_->lambda1; }
    double lambda2() const { return fd_->lambda2; }
    const FloquetData& floquet() const { return *fd_; }
    std::shared_ptr<const FloquetData> floquet_ptr() const { return fd_; }

    const PeriodicGrid& coeff(int a, int b) const { return K_[static_cast<size_t>(Jet2::index(a, b))]; }
    const PeriodicGrid& dcoeff(int a, int b) const { return dK_[static_cast<size_t>(Jet2::index(a, b))]; }
    void set_coeff(int a, int b, PeriodicGrid g);

    /// Columns of Q(theta_i) C at a grid node and its inverse.
    Mat3 frame(int i) const { return grid_matrix(P_, i); }
    Mat3 frame_inverse(int i) const { return grid_matrix(Pinv_, i); }

    LocalSlice node(int i) const;
    LocalSlice slice(double theta) const;
    Vec3 evaluate(double theta, double s1, double s2) const { return slice(theta).value(s1, s2); }

    /// All coefficients of order < m as component jets of order m.
    std::array<Jet2, 3> jets(int m) const;

private:
    std::shared_ptr<const FloquetData> fd_;
    int L_ = 0;
    double b1_ = 1.0, b2_ = 1.0;
    std::vector<PeriodicGrid> K_, dK_;
    PeriodicGrid P_, Pinv_;
};

struct SolveReport {
    int N = 0;
    int doublings = 0;
    ResonanceReport resonance;
    std::vector<double> residual_l1; // per monomial, graded index
    std::vector<double> tail;        // per monomial, graded index
    double max_residual = 0.0;
    double max_tail = 0.0;
    double seconds = 0.0;
};

/// K_00 = gamma, K_10 = b1 Phi v1 e^{-lambda1 t}, K_01 likewise.
TaylorFourierMap solve_order_0_1(std::shared_ptr<const FloquetData> fd, int L, double b1, double b2);

/// Fills all coefficients of order m from the lower orders.
void solve_homological(const VectorField& X, TaylorFourierMap& K, int m);

/// Per-monomial l1 residual (1/N) sum_i |E_{a,b}(theta_i)|_2 of the
/// invariance equation truncated at order L.
std::vector<double> monomial_residuals(const VectorField& X, const TaylorFourierMap& K);

/// Full solve at fixed N.
TaylorFourierMap solve_invariance(const VectorField& X, std::shared_ptr<const FloquetData> fd, const SolverOptions& opt,
                                  SolveReport* report = nullptr);

/// Samples the cycle and solves, doubling N until every tail norm is below
/// e_tail (or N reaches n_max).
TaylorFourierMap solve_invariance(const VectorField& X, const Orbit& orbit, const SolverOptions& opt,
                                  SolveReport* report = nullptr);

} // namespace phamp
