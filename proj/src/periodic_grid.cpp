#include "phamp/periodic_grid.hpp"

#include <fftw3.h>

#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace phamp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

// Per-thread plan and aligned buffers for one transform size. FFTW planning
// is not thread-safe, execution with a thread-private plan is.
struct RealFft {
    int n;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit RealFft(int size) : n(size)
    {
        std::lock_guard lock(planner_mutex());
        real = fftw_alloc_real(static_cast<size_t>(n));
        cplx = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
        fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
    }
};

RealFft& fft_for(int n)
{
    thread_local std::unordered_map<int, std::unique_ptr<RealFft>> plans;
    auto it = plans.find(n);
    if (it == plans.end())
        it = plans.emplace(n, std::make_unique<RealFft>(n)).first;
    return *it->second;
}

} // namespace

bool is_power_of_two(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

void require_fft_size(int n)
{
    if (!is_power_of_two(n) || n < 4)
        throw UsageError("grid size N=" + std::to_string(n) + " is not a power of two >= 4");
}

Spectrum forward_fft(const Eigen::MatrixXd& samples)
{
    const int n = static_cast<int>(samples.rows());
    require_fft_size(n);
    RealFft& fft = fft_for(n);
    Spectrum spec;
    spec.n = n;
    spec.coeffs.resize(n / 2 + 1, samples.cols());
    const double scale = 1.0 / n;
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
        for (int i = 0; i < n; ++i)
            fft.real[i] = samples(i, c);
        fftw_execute(fft.fwd);
        for (int k = 0; k <= n / 2; ++k)
            spec.coeffs(k, c) = {fft.cplx[k][0] * scale, fft.cplx[k][1] * scale};
        // Real input: c_0 and c_{N/2} are real.
        spec.coeffs(0, c).imag(0.0);
        spec.coeffs(n / 2, c).imag(0.0);
    }
    return spec;
}

Eigen::MatrixXd inverse_fft(const Spectrum& spec)
{
    const int n = spec.n;
    require_fft_size(n);
    RealFft& fft = fft_for(n);
    Eigen::MatrixXd out(n, spec.coeffs.cols());
    for (Eigen::Index c = 0; c < spec.coeffs.cols(); ++c) {
        for (int k = 0; k <= n / 2; ++k) {
            fft.cplx[k][0] = spec.coeffs(k, c).real();
            fft.cplx[k][1] = spec.coeffs(k, c).imag();
        }
        fft.cplx[0][1] = 0.0;
        fft.cplx[n / 2][1] = 0.0;
        fftw_execute(fft.bwd);
        for (int i = 0; i < n; ++i)
            out(i, c) = fft.real[i];
    }
    return out;
}

PeriodicGrid::PeriodicGrid(int n, int dim) : samples_(Eigen::MatrixXd::Zero(n, dim))
{
    require_fft_size(n);
}

PeriodicGrid::PeriodicGrid(Eigen::MatrixXd samples) : samples_(std::move(samples))
{
    require_fft_size(static_cast<int>(samples_.rows()));
}

PeriodicGrid PeriodicGrid::sample(int n, int dim, const std::function<Eigen::VectorXd(double)>& f)
{
    PeriodicGrid g(n, dim);
    for (int i = 0; i < n; ++i)
        g.samples_.row(i) = f(static_cast<double>(i) / n).transpose();
    return g;
}

PeriodicGrid PeriodicGrid::from_spectrum(const Spectrum& spec)
{
    PeriodicGrid g(inverse_fft(spec));
    std::call_once(g.cache_->once, [&] { g.cache_->spec = spec; });
    return g;
}

void PeriodicGrid::assign(Eigen::MatrixXd samples)
{
    require_fft_size(static_cast<int>(samples.rows()));
    samples_ = std::move(samples);
    cache_ = std::make_shared<Cache>();
}

void PeriodicGrid::set_row(int i, const Eigen::VectorXd& v)
{
    samples_.row(i) = v.transpose();
    if (cache_.use_count() > 1 || true)
        cache_ = std::make_shared<Cache>();
}

const Spectrum& PeriodicGrid::spectrum() const
{
    std::call_once(cache_->once, [this] { cache_->spec = forward_fft(samples_); });
    return cache_->spec;
}

PeriodicGrid PeriodicGrid::derivative() const
{
    Spectrum s = spectrum();
    const int n = s.n;
    for (int k = 0; k < n / 2; ++k)
        s.coeffs.row(k) *= std::complex<double>(0.0, kTwoPi * k);
    s.coeffs.row(n / 2).setZero();
    return from_spectrum(s);
}

double PeriodicGrid::tail_norm() const
{
    const Spectrum& s = spectrum();
    const int n = s.n;
    const int first = static_cast<int>(std::floor(0.9 * n / 2.0));
    double worst = 0.0;
    for (Eigen::Index c = 0; c < s.coeffs.cols(); ++c) {
        double sum = 0.0;
        for (int k = first; k <= n / 2; ++k)
            sum += std::abs(s.coeffs(k, c));
        worst = std::max(worst, 2.0 * sum);
    }
    return worst;
}

Eigen::VectorXd PeriodicGrid::evaluate(double theta) const
{
    FourierBasis basis(size(), theta);
    const Spectrum& s = spectrum();
    Eigen::VectorXd v(dim());
    for (int c = 0; c < dim(); ++c)
        v(c) = basis.value(s.coeffs.col(c));
    return v;
}

double PeriodicGrid::l1_norm() const
{
    return samples_.rowwise().norm().sum() / size();
}

void PeriodicGrid::write(std::ostream& os) const
{
    os << "# N=" << size() << " dim=" << dim() << "\n";
    char buf[32];
    for (int i = 0; i < size(); ++i) {
        for (int c = 0; c < dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", samples_(i, c));
            os << (c ? " " : "") << buf;
        }
        os << "\n";
    }
}

PeriodicGrid PeriodicGrid::read(std::istream& is)
{
    std::string header;
    if (!std::getline(is, header))
        throw UsageError("grid file: missing header");
    int n = 0;
    int dim = 0;
    if (std::sscanf(header.c_str(), "# N=%d dim=%d", &n, &dim) != 2 || n <= 0 || dim <= 0)
        throw UsageError("grid file: malformed header '" + header + "'");
    Eigen::MatrixXd m(n, dim);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < dim; ++c)
            if (!(is >> m(i, c)))
                throw UsageError("grid file: truncated at row " + std::to_string(i));
    return PeriodicGrid(std::move(m));
}

void PeriodicGrid::write_spectrum(std::ostream& os) const
{
    const Spectrum& s = spectrum();
    os << "# N=" << s.n << " dim=" << dim() << " spectrum k=0.." << s.n / 2 << "\n";
    char buf[64];
    for (int k = 0; k <= s.n / 2; ++k) {
        os << k;
        for (int c = 0; c < dim(); ++c) {
            std::snprintf(buf, sizeof buf, " %.17g %.17g", s.coeffs(k, c).real(), s.coeffs(k, c).imag());
            os << buf;
        }
        os << "\n";
    }
}

FourierBasis::FourierBasis(int n, double theta) : n_(n), theta_(theta), phase_(n / 2 + 1)
{
    const double t = wrap_phase(theta);
    for (int k = 0; k <= n / 2; ++k) {
        // Reduce k*theta mod 1 before scaling by 2 pi to keep the argument small.
        const double arg = std::fmod(static_cast<double>(k) * t, 1.0);
        phase_(k) = std::polar(1.0, kTwoPi * arg);
    }
}

double FourierBasis::value(const Eigen::Ref<const Eigen::VectorXcd>& c) const
{
    const int half = n_ / 2;
    double v = c(0).real();
    double acc = 0.0;
    for (int k = 1; k < half; ++k)
        acc += c(k).real() * phase_(k).real() - c(k).imag() * phase_(k).imag();
    v += 2.0 * acc;
    v += c(half).real() * phase_(half).real();
    return v;
}

double FourierBasis::derivative(const Eigen::Ref<const Eigen::VectorXcd>& c) const
{
    const int half = n_ / 2;
    double acc = 0.0;
    for (int k = 1; k < half; ++k) {
        // Re(2 pi i k c_k e^{i phi}) = -2 pi k Im(c_k e^{i phi})
        const double im = c(k).real() * phase_(k).imag() + c(k).imag() * phase_(k).real();
        acc -= kTwoPi * k * im;
    }
    return 2.0 * acc;
}

} // namespace phamp
