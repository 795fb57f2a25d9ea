#include "phamp/integrator.hpp"

namespace phamp {

Vec3 flow(const VectorField& X, const Vec3& x, double t, const OdeTolerance& tol)
{
    OdeState<3> s{x(0), x(1), x(2)};
    auto rhs = [&X](const OdeState<3>& y, OdeState<3>& dy, double) {
        const Vec3 f = X.value(Vec3(y[0], y[1], y[2]));
        dy = {f(0), f(1), f(2)};
    };
    integrate<3>(rhs, s, 0.0, t, tol);
    return {s[0], s[1], s[2]};
}

void flow_variational(const VectorField& X, Vec3& x, Mat3& Phi, double t, const OdeTolerance& tol)
{
    OdeState<12> s;
    for (int i = 0; i < 3; ++i)
        s[i] = x(i);
    Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(s.data() + 3) = Phi;
    auto rhs = [&X](const OdeState<12>& y, OdeState<12>& dy, double) {
        const Vec3 p(y[0], y[1], y[2]);
        const Vec3 f = X.value(p);
        const Mat3 J = X.jacobian(p);
        const Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>> F(y.data() + 3);
        for (int i = 0; i < 3; ++i)
            dy[i] = f(i);
        Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(dy.data() + 3) = J * F;
    };
    integrate<12>(rhs, s, 0.0, t, tol);
    x = Vec3(s[0], s[1], s[2]);
    Phi = Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(s.data() + 3);
}

void flow_adjoint(const VectorField& X, Vec3& x, Vec3& p, Vec3& q1, Vec3& q2, double lambda1, double lambda2, double t,
                  const OdeTolerance& tol)
{
    OdeState<12> s;
    for (int i = 0; i < 3; ++i) {
        s[i] = x(i);
        s[3 + i] = p(i);
        s[6 + i] = q1(i);
        s[9 + i] = q2(i);
    }
    auto rhs = [&](const OdeState<12>& y, OdeState<12>& dy, double) {
        const Vec3 z(y[0], y[1], y[2]);
        const Vec3 f = X.value(z);
        const Mat3 Jt = X.jacobian(z).transpose();
        const Vec3 a = -Jt * Vec3(y[3], y[4], y[5]);
        const Vec3 b1 = lambda1 * Vec3(y[6], y[7], y[8]) - Jt * Vec3(y[6], y[7], y[8]);
        const Vec3 b2 = lambda2 * Vec3(y[9], y[10], y[11]) - Jt * Vec3(y[9], y[10], y[11]);
        for (int i = 0; i < 3; ++i) {
            dy[i] = f(i);
            dy[3 + i] = a(i);
            dy[6 + i] = b1(i);
            dy[9 + i] = b2(i);
        }
    };
    // Gradients grow along backward flow; the blowup guard only watches x.
    OdeTolerance t2 = tol;
    t2.blowup = std::numeric_limits<double>::infinity();
    integrate<12>(rhs, s, 0.0, t, t2);
    x = Vec3(s[0], s[1], s[2]);
    p = Vec3(s[3], s[4], s[5]);
    q1 = Vec3(s[6], s[7], s[8]);
    q2 = Vec3(s[9], s[10], s[11]);
    if (x.cwiseAbs().maxCoeff() > tol.blowup)
        throw NumericalError("adjoint flow: state blowup");
}

} // namespace phamp
