#pragma once

#include "phamp/types.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>

namespace phamp {

/// One-sided spectrum of a real periodic grid: row k holds c_k for
/// k = 0..N/2, one column per component, normalized so that
/// f(theta_j) = sum_k c_k exp(2 pi i k j / N) over the full two-sided range.
struct Spectrum {
    int n = 0;
    Eigen::MatrixXcd coeffs;
};

/// A real vector-valued 1-periodic function sampled at theta_i = i/N.
///
/// N must be a power of two (>= 4). The spectrum is computed lazily and
/// cached; the cache is written at most once and shared between copies.
class PeriodicGrid {
public:
    PeriodicGrid() = default;
    PeriodicGrid(int n, int dim);
    explicit PeriodicGrid(Eigen::MatrixXd samples);

    static PeriodicGrid sample(int n, int dim, const std::function<Eigen::VectorXd(double)>& f);
    static PeriodicGrid from_spectrum(const Spectrum& spec);

    int size() const { return static_cast<int>(samples_.rows()); }
    int dim() const { return static_cast<int>(samples_.cols()); }
    double theta(int i) const { return static_cast<double>(i) / size(); }

    const Eigen::MatrixXd& samples() const { return samples_; }
    Eigen::VectorXd row(int i) const { return samples_.row(i).transpose(); }
    auto col(int c) const { return samples_.col(c); }

    /// Replaces the samples and drops the cached spectrum.
    void assign(Eigen::MatrixXd samples);
    void set_row(int i, const Eigen::VectorXd& v);

    const Spectrum& spectrum() const;

    /// Multiplies c_k by 2 pi i k; the Nyquist mode is dropped.
    PeriodicGrid derivative() const;

    /// 2 * sum_{k=floor(0.9N/2)}^{N/2} |c_k| per component, maximum over
    /// components. The Nyquist coefficient is the raw one-sided DFT value
    /// and enters the sum once, multiplied by the same factor 2.
    double tail_norm() const;

    /// Trigonometric interpolation at an arbitrary phase.
    Eigen::VectorXd evaluate(double theta) const;

    /// (1/N) sum_i ||row_i||_2.
    double l1_norm() const;
    double max_abs() const { return samples_.cwiseAbs().maxCoeff(); }

    void write(std::ostream& os) const;
    static PeriodicGrid read(std::istream& is);
    void write_spectrum(std::ostream& os) const;

private:
    Eigen::MatrixXd samples_;
    struct Cache {
        std::once_flag once;
        Spectrum spec;
    };
    mutable std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

bool is_power_of_two(int n);
void require_fft_size(int n);

/// Forward/backward real FFT helpers (column-wise), exposed for the solver.
Spectrum forward_fft(const Eigen::MatrixXd& samples);
Eigen::MatrixXd inverse_fft(const Spectrum& spec);

/// Precomputed Fourier basis exp(2 pi i k theta), k = 0..N/2, at one phase.
/// Evaluating many grids of the same size at the same theta reuses it.
class FourierBasis {
public:
    FourierBasis(int n, double theta);
    double value(const Eigen::Ref<const Eigen::VectorXcd>& c) const;
    double derivative(const Eigen::Ref<const Eigen::VectorXcd>& c) const;
    int size() const { return n_; }

private:
    int n_;
    double theta_;
    Eigen::VectorXcd phase_;
};

} // namespace phamp
