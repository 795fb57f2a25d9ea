#include "phamp/response.hpp"

namespace phamp {

Mat3 ResponseEval::rows() const
{
    Mat3 m;
    m.row(0) = grad_theta.transpose();
    m.row(1) = grad_sigma1.transpose();
    m.row(2) = grad_sigma2.transpose();
    return m;
}

ResponseEval local_response(const LocalSlice& s, double s1, double s2)
{
    const Mat3 DK = s.jacobian(s1, s2);
    const double det = DK.determinant();
    if (!(std::abs(det) >= 1e-12))
        throw NumericalError("response: DK is singular at theta = " + std::to_string(s.theta) +
                             " (det = " + std::to_string(det) + ")");
    const Mat3 inv = DK.inverse();
    ResponseEval r;
    r.x = s.value(s1, s2);
    r.theta = s.theta;
    r.sigma1 = s1;
    r.sigma2 = s2;
    r.grad_theta = inv.row(0).transpose();
    r.grad_sigma1 = inv.row(1).transpose();
    r.grad_sigma2 = inv.row(2).transpose();
    return r;
}

ResponseEval local_response(const TaylorFourierMap& K, double theta, double s1, double s2)
{
    return local_response(K.slice(theta), s1, s2);
}

ResponseSeries::ResponseSeries(const TaylorFourierMap& K) : order_(K.order() - 1), n_(K.size())
{
    const int L = order_;
    const int nc = Jet2::count(L);
    std::vector<Eigen::MatrixXd> out(static_cast<size_t>(nc), Eigen::MatrixXd(n_, 9));
    std::vector<Mat3> A(static_cast<size_t>(nc)), B(static_cast<size_t>(nc));
    auto kv = [&](int a, int b, int i) -> Vec3 { return K.coeff(a, b).samples().row(i).transpose(); };
    for (int i = 0; i < n_; ++i) {
        for (int m = 0; m <= L; ++m)
            for (int a = m; a >= 0; --a) {
                const int b = m - a;
                Mat3& Ai = A[Jet2::index(a, b)];
                Ai.col(0) = K.dcoeff(a, b).samples().row(i).transpose();
                Ai.col(1) = (a + 1) * kv(a + 1, b, i);
                Ai.col(2) = (b + 1) * kv(a, b + 1, i);
            }
        const Vec3 k0 = A[0].col(0), k10 = A[0].col(1), k01 = A[0].col(2);
        const double det = k0.dot(k10.cross(k01));
        if (!(std::abs(det) >= 1e-12))
            throw NumericalError("response series: degenerate frame at grid index " + std::to_string(i));
        Mat3& B0 = B[0];
        B0.row(0) = k10.cross(k01).transpose() / det;
        B0.row(1) = k01.cross(k0).transpose() / det;
        B0.row(2) = k0.cross(k10).transpose() / det;
        for (int m = 1; m <= L; ++m)
            for (int a = m; a >= 0; --a) {
                const int b = m - a;
                Mat3 acc = Mat3::Zero();
                for (int d = 0; d < m; ++d)
                    for (int c = d; c >= 0; --c) {
                        const int e = d - c;
                        if (c > a || e > b)
                            continue;
                        acc += A[Jet2::index(a - c, b - e)] * B[Jet2::index(c, e)];
                    }
                B[Jet2::index(a, b)] = -B0 * acc;
            }
        for (int j = 0; j < nc; ++j)
            out[j].row(i) = matrix_row(B[j]);
    }
    B_.reserve(out.size());
    for (auto& g : out)
        B_.emplace_back(std::move(g));
}

Mat3 ResponseSeries::evaluate(double theta, double s1, double s2) const
{
    FourierBasis basis(n_, wrap_phase(theta));
    Mat3 r = Mat3::Zero();
    double p1 = 1.0;
    for (int a = 0; a <= order_; ++a, p1 *= s1) {
        double p2 = 1.0;
        for (int b = 0; a + b <= order_; ++b, p2 *= s2) {
            const Spectrum& sp = coeff(a, b).spectrum();
            for (int k = 0; k < 9; ++k)
                r(k / 3, k % 3) += basis.value(sp.coeffs.col(k)) * p1 * p2;
        }
    }
    return r;
}

ResponseEval propagate_response(const VectorField& X, const ResponseEval& start, double dt, double lambda1,
                                double lambda2, const OdeTolerance& tol)
{
    ResponseEval r = start;
    const double chunk = 1.0;
    double done = 0.0;
    const double total = std::abs(dt);
    const double sign = dt >= 0.0 ? -1.0 : 1.0;
    while (done < total) {
        const double h = std::min(chunk, total - done);
        Vec3 x = r.x, p = r.grad_theta, q1 = r.grad_sigma1, q2 = r.grad_sigma2;
        try {
            flow_adjoint(X, x, p, q1, q2, lambda1, lambda2, sign * h, tol);
        } catch (const NumericalError&) {
            r.truncated = true;
            return r;
        }
        r.x = x;
        r.grad_theta = p;
        r.grad_sigma1 = q1;
        r.grad_sigma2 = q2;
        done += h;
    }
    return r;
}

} // namespace phamp
