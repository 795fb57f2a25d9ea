#pragma once

#include "phamp/dual.hpp"
#include "phamp/jet.hpp"
#include "phamp/types.hpp"

#include <array>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phamp {

class VectorField {
public:
    virtual ~VectorField() = default;

    /// X(x); throws DomainError on a non-finite component.
    Vec3 value(const Vec3& x) const;
    /// DX(x), exact.
    Mat3 jacobian(const Vec3& x) const;
    /// X composed with a jet of (sigma1, sigma2) polynomials.
    virtual std::array<Jet2, 3> compose(const std::array<Jet2, 3>& k) const = 0;

protected:
    virtual Vec3 eval(const Vec3& x) const = 0;
    virtual Mat3 eval_jacobian(const Vec3& x) const = 0;
};

/// Adapts a functor with a templated
///   std::array<S, 3> operator()(const std::array<S, 3>&) const
/// to VectorField for S = double, Dual and Jet2.
template <class F>
class TemplatedField final : public VectorField {
public:
    explicit TemplatedField(F f) : f_(std::move(f)) {}

    std::array<Jet2, 3> compose(const std::array<Jet2, 3>& k) const override { return f_(k); }
    const F& functor() const { return f_; }

protected:
    Vec3 eval(const Vec3& x) const override
    {
        const auto r = f_(std::array<double, 3>{x(0), x(1), x(2)});
        return {r[0], r[1], r[2]};
    }
    Mat3 eval_jacobian(const Vec3& x) const override
    {
        std::array<Dual, 3> in;
        for (int i = 0; i < 3; ++i)
            in[i] = Dual(x(i), Vec3::Unit(i));
        const auto r = f_(in);
        Mat3 J;
        for (int i = 0; i < 3; ++i)
            J.row(i) = r[i].d.transpose();
        return J;
    }

private:
    F f_;
};

template <class F>
std::shared_ptr<const VectorField> make_field(F f)
{
    return std::make_shared<TemplatedField<F>>(std::move(f));
}

/// Axis-aligned box; infinite bounds allowed.
struct Box {
    Vec3 lo = Vec3::Constant(-std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(std::numeric_limits<double>::infinity());
    bool contains(const Vec3& x) const { return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all(); }
};

using ParamSet = std::map<std::string, double>;

struct ModelSpec {
    std::string name;
    std::string description;
    ParamSet defaults;
    std::array<std::string, 3> labels;
    int voltage_index = 0;
    Box omega_c;
    double b1 = 1.0;
    double b2 = 1.0;
    double e_tol = 1e-8;
    Vec3 guess = Vec3::Zero();
    std::optional<Vec3> equilibrium_guess;
    double transient = 200.0;
    bool oscillator = true;
    std::function<std::shared_ptr<const VectorField>(const ParamSet&)> build;

    /// Defaults merged with overrides; unknown names are a UsageError.
    ParamSet resolve(const ParamSet& overrides) const;
    std::shared_ptr<const VectorField> field(const ParamSet& overrides = {}) const;
};

/// Newton on X(x) = 0 with the exact Jacobian.
Vec3 find_equilibrium(const VectorField& X, Vec3 guess, double tol = 1e-12, int max_iterations = 50);

void register_model(ModelSpec spec);
const ModelSpec& find_model(const std::string& name);
std::vector<std::string> model_names();

} // namespace phamp
