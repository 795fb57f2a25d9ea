#include "phamp/invariance.hpp"

#include <chrono>
#include <numbers>

namespace phamp {

namespace {

void powers(int L, double s1, double s2, std::vector<double>& p1, std::vector<double>& p2)
{
    p1.assign(static_cast<size_t>(L + 1), 1.0);
    p2.assign(static_cast<size_t>(L + 1), 1.0);
    for (int i = 1; i <= L; ++i) {
        p1[i] = p1[i - 1] * s1;
        p2[i] = p2[i - 1] * s2;
    }
}

} // namespace

Vec3 LocalSlice::value(double s1, double s2) const
{
    std::vector<double> p1, p2;
    powers(L, s1, s2, p1, p2);
    Vec3 v = Vec3::Zero();
    for (int m = 0; m <= L; ++m)
        for (int a = m; a >= 0; --a)
            v += k[Jet2::index(a, m - a)] * (p1[a] * p2[m - a]);
    return v;
}

Mat3 LocalSlice::jacobian(double s1, double s2) const
{
    std::vector<double> p1, p2;
    powers(L, s1, s2, p1, p2);
    Mat3 D = Mat3::Zero();
    for (int m = 0; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            const int idx = Jet2::index(a, b);
            D.col(0) += dk[idx] * (p1[a] * p2[b]);
            if (a > 0)
                D.col(1) += k[idx] * (a * p1[a - 1] * p2[b]);
            if (b > 0)
                D.col(2) += k[idx] * (b * p1[a] * p2[b - 1]);
        }
    return D;
}

Vec3 LocalSlice::residual(const VectorField& X, double s1, double s2) const
{
    std::vector<double> p1, p2;
    powers(L, s1, s2, p1, p2);
    Vec3 v = Vec3::Zero();
    Vec3 lhs = Vec3::Zero();
    for (int m = 0; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            const int idx = Jet2::index(a, b);
            const double w = p1[a] * p2[b];
            v += k[idx] * w;
            lhs += (dk[idx] / T + (a * lambda1 + b * lambda2) * k[idx]) * w;
        }
    return lhs - X.value(v);
}

TaylorFourierMap::TaylorFourierMap(std::shared_ptr<const FloquetData> fd, int L, double b1, double b2)
    : fd_(std::move(fd)), L_(L), b1_(b1), b2_(b2)
{
    if (L < 1)
        throw UsageError("Taylor order L must be >= 1");
    const int n = fd_->size();
    K_.assign(static_cast<size_t>(Jet2::count(L)), PeriodicGrid(n, 3));
    dK_ = K_;
    Eigen::MatrixXd P(n, 9), Pi(n, 9);
    for (int i = 0; i < n; ++i) {
        const Mat3 F = fd_->Q_at(i) * fd_->C;
        Eigen::FullPivLU<Mat3> lu(F);
        if (!lu.isInvertible())
            throw NumericalError("singular Floquet frame at grid index " + std::to_string(i));
        P.row(i) = matrix_row(F);
        Pi.row(i) = matrix_row(lu.inverse());
    }
    P_ = PeriodicGrid(std::move(P));
    Pinv_ = PeriodicGrid(std::move(Pi));
}

void TaylorFourierMap::set_coeff(int a, int b, PeriodicGrid g)
{
    const auto idx = static_cast<size_t>(Jet2::index(a, b));
    dK_[idx] = g.derivative();
    K_[idx] = std::move(g);
}

LocalSlice TaylorFourierMap::node(int i) const
{
    LocalSlice s;
    s.theta = static_cast<double>(i) / size();
    s.L = L_;
    s.T = T();
    s.lambda1 = lambda1();
    s.lambda2 = lambda2();
    s.k.resize(K_.size());
    s.dk.resize(K_.size());
    for (size_t j = 0; j < K_.size(); ++j) {
        s.k[j] = K_[j].samples().row(i).transpose();
        s.dk[j] = dK_[j].samples().row(i).transpose();
    }
    return s;
}

LocalSlice TaylorFourierMap::slice(double theta) const
{
    const double t = wrap_phase(theta);
    const double pos = t * size();
    const int i = static_cast<int>(std::lround(pos));
    if (std::abs(pos - i) < 1e-12) {
        LocalSlice s = node(i % size());
        s.theta = t;
        return s;
    }
    FourierBasis basis(size(), t);
    LocalSlice s;
    s.theta = t;
    s.L = L_;
    s.T = T();
    s.lambda1 = lambda1();
    s.lambda2 = lambda2();
    s.k.resize(K_.size());
    s.dk.resize(K_.size());
    for (size_t j = 0; j < K_.size(); ++j) {
        const Spectrum& sp = K_[j].spectrum();
        for (int c = 0; c < 3; ++c) {
            s.k[j](c) = basis.value(sp.coeffs.col(c));
            s.dk[j](c) = basis.derivative(sp.coeffs.col(c));
        }
    }
    return s;
}

std::array<Jet2, 3> TaylorFourierMap::jets(int m) const
{
    std::array<Jet2, 3> j{Jet2(m, size()), Jet2(m, size()), Jet2(m, size())};
    for (int d = 0; d < std::min(m, L_ + 1); ++d)
        for (int a = d; a >= 0; --a)
            for (int c = 0; c < 3; ++c)
                j[c](a, d - a) = coeff(a, d - a).col(c).array();
    return j;
}

TaylorFourierMap solve_order_0_1(std::shared_ptr<const FloquetData> fd, int L, double b1, double b2)
{
    TaylorFourierMap K(fd, L, b1, b2);
    const int n = fd->size();
    Eigen::MatrixXd k10(n, 3), k01(n, 3);
    for (int i = 0; i < n; ++i) {
        const Mat3 F = K.frame(i);
        k10.row(i) = b1 * F.col(1).transpose();
        k01.row(i) = b2 * F.col(2).transpose();
    }
    K.set_coeff(0, 0, fd->gamma);
    K.set_coeff(1, 0, PeriodicGrid(std::move(k10)));
    K.set_coeff(0, 1, PeriodicGrid(std::move(k01)));
    return K;
}

void solve_homological(const VectorField& X, TaylorFourierMap& K, int m)
{
    const int n = K.size();
    const double T = K.T();
    const double lam[3] = {0.0, K.lambda1(), K.lambda2()};
    const std::array<Jet2, 3> B = X.compose(K.jets(m));
    for (int a = m; a >= 0; --a) {
        const int b = m - a;
        Eigen::MatrixXd A(n, 3);
        for (int i = 0; i < n; ++i) {
            const Vec3 Bi(B[0](a, b)(i), B[1](a, b)(i), B[2](a, b)(i));
            A.row(i) = (K.frame_inverse(i) * Bi).transpose();
        }
        Spectrum s = forward_fft(A);
        const double shift = a * K.lambda1() + b * K.lambda2();
        for (int j = 0; j < 3; ++j) {
            const double re = shift - lam[j];
            for (int k = 0; k < n / 2; ++k)
                s.coeffs(k, j) /= std::complex<double>(re, 2.0 * std::numbers::pi * k / T);
            s.coeffs(n / 2, j) = 0.0;
        }
        const Eigen::MatrixXd u = inverse_fft(s);
        Eigen::MatrixXd out(n, 3);
        for (int i = 0; i < n; ++i)
            out.row(i) = (K.frame(i) * u.row(i).transpose()).transpose();
        K.set_coeff(a, b, PeriodicGrid(std::move(out)));
    }
}

std::vector<double> monomial_residuals(const VectorField& X, const TaylorFourierMap& K)
{
    const int L = K.order();
    const int n = K.size();
    std::array<Jet2, 3> full = K.jets(L);
    for (int a = L; a >= 0; --a)
        for (int c = 0; c < 3; ++c)
            full[c](a, L - a) = K.coeff(a, L - a).col(c).array();
    const std::array<Jet2, 3> XK = X.compose(full);
    std::vector<double> out(static_cast<size_t>(Jet2::count(L)));
    for (int m = 0; m <= L; ++m)
        for (int a = m; a >= 0; --a) {
            const int b = m - a;
            const double shift = a * K.lambda1() + b * K.lambda2();
            const auto& k = K.coeff(a, b).samples();
            const auto& dk = K.dcoeff(a, b).samples();
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                Vec3 e;
                for (int c = 0; c < 3; ++c)
                    e(c) = dk(i, c) / K.T() + shift * k(i, c) - XK[c](a, b)(i);
                sum += e.norm();
            }
            out[Jet2::index(a, b)] = sum / n;
        }
    return out;
}

TaylorFourierMap solve_invariance(const VectorField& X, std::shared_ptr<const FloquetData> fd, const SolverOptions& opt,
                                  SolveReport* report)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ResonanceReport rr = check_nonresonance(fd->lambda1, fd->lambda2, opt.L, opt.resonance_threshold);
    if (!rr.pass)
        throw ResonanceError("near-resonant exponents: |" + std::to_string(rr.alpha) + " lambda1 + " +
                             std::to_string(rr.beta) + " lambda2 - lambda_" + std::to_string(rr.j - 1) +
                             "| = " + std::to_string(rr.min_modulus));
    TaylorFourierMap K = solve_order_0_1(fd, opt.L, opt.b1, opt.b2);
    for (int m = 2; m <= opt.L; ++m)
        solve_homological(X, K, m);
    if (report) {
        report->N = K.size();
        report->resonance = rr;
        report->residual_l1 = monomial_residuals(X, K);
        report->tail.clear();
        for (int m = 0; m <= opt.L; ++m)
            for (int a = m; a >= 0; --a)
                report->tail.push_back(K.coeff(a, m - a).tail_norm());
        report->max_residual = *std::max_element(report->residual_l1.begin(), report->residual_l1.end());
        report->max_tail = *std::max_element(report->tail.begin(), report->tail.end());
        report->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return K;
}

TaylorFourierMap solve_invariance(const VectorField& X, const Orbit& orbit, const SolverOptions& opt,
                                  SolveReport* report)
{
    const auto t0 = std::chrono::steady_clock::now();
    int n = opt.N;
    int doublings = 0;
    TaylorFourierMap best;
    SolveReport best_rep;
    for (;;) {
        auto fd = std::make_shared<const FloquetData>(monodromy_and_exponents(X, orbit, n, opt.ode));
        SolveReport rep;
        TaylorFourierMap K = solve_invariance(X, fd, opt, &rep);
        rep.doublings = doublings;
        // Once the tail stops shrinking it is roundoff, not resolution.
        const bool stalled = doublings > 0 && rep.max_tail > 0.5 * best_rep.max_tail;
        if (!stalled) {
            best = std::move(K);
            best_rep = rep;
        }
        if (stalled || best_rep.max_tail < opt.e_tail || !opt.auto_double || n >= opt.n_max)
            break;
        n *= 2;
        ++doublings;
    }
    best_rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report)
        *report = best_rep;
    return best;
}

} // namespace phamp
