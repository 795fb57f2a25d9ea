#include "phamp/limit_cycle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace phamp {

namespace {

// Advances x until x_v crosses c in the direction `dir` (+1 up, -1 down),
// then refines the crossing time by Newton. Returns the elapsed time.
double next_crossing(const VectorField& X, Vec3& x, int v, double c, double dir, double chunk, double max_time,
                     const OdeTolerance& ode)
{
    double t = 0.0;
    double g = x(v) - c;
    while (t < max_time) {
        Vec3 y = flow(X, x, chunk, ode);
        const double gy = y(v) - c;
        if (dir * g < 0.0 && dir * gy >= 0.0) {
            double s = 0.0;
            Vec3 z = x;
            for (int it = 0; it < 50; ++it) {
                const double res = z(v) - c;
                const double rate = X.value(z)(v);
                if (rate == 0.0)
                    break;
                const double ds = -res / rate;
                z = flow(X, z, ds, ode);
                s += ds;
                if (std::abs(ds) < 1e-15 * std::max(1.0, t))
                    break;
            }
            x = z;
            return t + s;
        }
        x = y;
        g = gy;
        t += chunk;
    }
    throw ConvergenceError("limit cycle: no section crossing within t = " + std::to_string(max_time));
}

} // namespace

Orbit find_limit_cycle(const VectorField& X, const Vec3& guess, const LimitCycleOptions& opt)
{
    const int v = opt.voltage_index;
    const OdeTolerance& ode = opt.ode;
    OdeTolerance loose = ode;
    loose.abs = loose.rel = 1e-10;

    Vec3 x = flow(X, guess, opt.transient, loose);
    // Section through the current point, crossed in the current direction.
    double rate = X.value(x)(v);
    double chunk = 0.01;
    for (int k = 0; k < 1000 && std::abs(rate) < 1e-6; ++k) {
        x = flow(X, x, chunk, loose);
        rate = X.value(x)(v);
    }
    const double dir = rate > 0.0 ? 1.0 : -1.0;
    const double section = x(v);
    Vec3 y = flow(X, x, chunk, loose);
    double T = chunk + next_crossing(X, y, v, section, dir, chunk, 1e4, loose);

    Orbit o;
    o.x0 = x;
    o.T = T;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iterations; ++it) {
        Vec3 z = o.x0;
        Mat3 Phi = Mat3::Identity();
        flow_variational(X, z, Phi, o.T, ode);
        const Vec3 r = z - o.x0;
        const double res = r.norm() + std::abs(o.x0(v) - section);
        o.iterations = it;
        o.residual = r.norm();
        if (res < opt.tolerance || (it > 3 && res >= 0.5 * prev && res < 1e-9 * std::max(1.0, o.x0.norm())))
            break;
        prev = res;
        Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
        A.topLeftCorner<3, 3>() = Phi - Mat3::Identity();
        A.topRightCorner<3, 1>() = X.value(z);
        A(3, v) = 1.0;
        Eigen::Vector4d b;
        b.head<3>() = -r;
        b(3) = section - o.x0(v);
        const Eigen::Vector4d d = A.fullPivLu().solve(b);
        o.x0 += d.head<3>();
        o.T += d(3);
        if (!o.x0.allFinite() || !(o.T > 0.0))
            throw ConvergenceError("limit cycle: Newton diverged");
        if (it + 1 == opt.max_iterations)
            throw ConvergenceError("limit cycle: Newton did not converge, residual " + std::to_string(res));
    }

    // Phase origin at the voltage maximum.
    const int samples = 512;
    Vec3 z = o.x0;
    double best = z(v);
    Vec3 best_x = z;
    for (int i = 1; i < samples; ++i) {
        z = flow(X, z, o.T / samples, ode);
        if (z(v) > best) {
            best = z(v);
            best_x = z;
        }
    }
    z = best_x;
    for (int it = 0; it < 50; ++it) {
        const Vec3 f = X.value(z);
        const double g = f(v);
        const double dg = (X.jacobian(z) * f)(v);
        if (dg == 0.0)
            break;
        const double dt = -g / dg;
        z = flow(X, z, dt, ode);
        if (std::abs(dt) < 1e-15 * o.T)
            break;
    }
    o.x0 = z;
    return o;
}

Mat3 grid_matrix(const PeriodicGrid& g, int i)
{
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            m(r, c) = g.samples()(i, 3 * r + c);
    return m;
}

Eigen::Matrix<double, 1, 9> matrix_row(const Mat3& m)
{
    Eigen::Matrix<double, 1, 9> r;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            r(3 * a + b) = m(a, b);
    return r;
}

Mat3 FloquetData::Phi_at(int i) const { return grid_matrix(Phi, i); }
Mat3 FloquetData::Q_at(int i) const { return grid_matrix(Q, i); }

FloquetData monodromy_and_exponents(const VectorField& X, const Orbit& orbit, int n, const OdeTolerance& ode)
{
    require_fft_size(n);
    FloquetData fd;
    fd.T = orbit.T;
    fd.x0 = orbit.x0;
    Eigen::MatrixXd g(n, 3), P(n, 9);
    Vec3 x = orbit.x0;
    Mat3 Phi = Mat3::Identity();
    const double h = orbit.T / n;
    for (int i = 0; i < n; ++i) {
        g.row(i) = x.transpose();
        P.row(i) = matrix_row(Phi);
        flow_variational(X, x, Phi, h, ode);
    }
    fd.gamma = PeriodicGrid(std::move(g));
    fd.Phi = PeriodicGrid(std::move(P));
    fd.M = Phi;
    fd.closure = (x - orbit.x0).norm();
    floquet_normal_form(fd, X.value(orbit.x0));
    return fd;
}

void floquet_normal_form(FloquetData& fd, const Vec3& flow_direction)
{
    const double T = fd.T;
    Eigen::EigenSolver<Mat3> es(fd.M);
    const Eigen::Vector3cd mu = es.eigenvalues();
    const Eigen::Matrix3cd V = es.eigenvectors();
    int trivial = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(mu(i) - 1.0) < std::abs(mu(trivial) - 1.0))
            trivial = i;
    int others[2], k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != trivial)
            others[k++] = i;
    for (int i : others) {
        if (std::abs(mu(i).imag()) > 1e-12 * std::max(1.0, std::abs(mu(i))))
            throw UnsupportedCaseError("Floquet multipliers are complex");
        if (mu(i).real() <= 0.0)
            throw UnsupportedCaseError("Floquet multiplier is not positive");
    }
    if (std::abs(mu(others[0]).real() - mu(others[1]).real()) < 1e-12)
        throw UnsupportedCaseError("repeated nontrivial Floquet multipliers");
    if (std::log(mu(others[0]).real()) > std::log(mu(others[1]).real()))
        std::swap(others[0], others[1]);

    auto unit = [&](int i) {
        Vec3 v = V.col(i).real();
        v.normalize();
        for (int c = 0; c < 3; ++c)
            if (std::abs(v(c)) > 1e-12) {
                if (v(c) < 0.0)
                    v = -v;
                break;
            }
        return v;
    };
    fd.mu1 = mu(others[0]).real();
    fd.mu2 = mu(others[1]).real();
    fd.lambda1 = std::log(fd.mu1) / T;
    fd.lambda2 = std::log(fd.mu2) / T;
    fd.v1 = unit(others[0]);
    fd.v2 = unit(others[1]);

    const double fn = flow_direction.norm();
    fd.trivial_residual = (fd.M * flow_direction - flow_direction).norm() / fn;
    fd.C.col(0) = flow_direction / fn;
    fd.C.col(1) = fd.v1;
    fd.C.col(2) = fd.v2;
    Eigen::JacobiSVD<Mat3> svd(fd.C);
    const double cond = svd.singularValues()(0) / svd.singularValues()(2);
    if (!(cond < 1e12))
        throw NumericalError("Floquet normal form: eigenvector matrix is ill-conditioned (cond " +
                             std::to_string(cond) + ")");
    const Mat3 Ci = fd.C.inverse();
    const Vec3 ex(0.0, fd.lambda1, fd.lambda2);
    fd.R = fd.C * ex.asDiagonal() * Ci;
    fd.J = Ci * fd.R * fd.C;

    const int n = fd.Phi.size();
    Eigen::MatrixXd Q(n, 9);
    for (int i = 0; i < n; ++i) {
        const double t = T * i / n;
        const Vec3 d(1.0, std::exp(-fd.lambda1 * t), std::exp(-fd.lambda2 * t));
        Q.row(i) = matrix_row(fd.Phi_at(i) * fd.C * d.asDiagonal() * Ci);
    }
    fd.Q = PeriodicGrid(std::move(Q));
}

ResonanceReport check_nonresonance(double lambda1, double lambda2, int L, double threshold)
{
    ResonanceReport rep;
    const double lam[3] = {0.0, lambda1, lambda2};
    for (int m = 2; m <= L; ++m)
        for (int a = m; a >= 0; --a)
            for (int j = 1; j <= 3; ++j) {
                const double d = std::abs(a * lambda1 + (m - a) * lambda2 - lam[j - 1]);
                if (d < rep.min_modulus) {
                    rep.min_modulus = d;
                    rep.alpha = a;
                    rep.beta = m - a;
                    rep.j = j;
                }
            }
    rep.pass = rep.min_modulus > threshold;
    return rep;
}

} // namespace phamp
