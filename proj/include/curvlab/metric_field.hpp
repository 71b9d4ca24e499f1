#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "curvlab/geom.hpp"

namespace curvlab {

// metric evaluated at a chart point that is not positive definite there
struct DegenerateMetric : std::domain_error {
    using std::domain_error::domain_error;
};

enum class Regularity { smooth, c1, sampled };

std::string to_string(Regularity r);

// A Riemannian metric on a closed chart rectangle. Evaluation beyond the
// domain (up to a small slop for rounding) is an error, not an extrapolation.
class MetricField {
  public:
    using Value = std::function<Sym2(const Vec2&)>;
    // chart derivatives [d g / dx, d g / dy]
    using Derivative = std::function<std::array<Sym2, 2>(const Vec2&)>;
    using Scalar = std::function<double(const Vec2&)>;

    MetricField(std::string name, Rect domain, Regularity reg, Value value)
        : name_(std::move(name)), domain_(domain), regularity_(reg), value_(std::move(value)) {}

    const std::string& name() const { return name_; }
    const Rect& domain() const { return domain_; }
    Regularity regularity() const { return regularity_; }

    Sym2 at(const Vec2& p) const;

    bool has_derivative() const { return bool(derivative_); }
    std::array<Sym2, 2> derivative_at(const Vec2& p) const;

    bool has_analytic_sectional() const { return bool(analytic_sectional_); }
    double analytic_sectional_at(const Vec2& p) const;

    MetricField& with_derivative(Derivative d) { derivative_ = std::move(d); return *this; }
    MetricField& with_analytic_sectional(Scalar s) { analytic_sectional_ = std::move(s); return *this; }

    // copy with the analytic hooks dropped, for exercising pure stencil paths
    MetricField without_analytic_hooks() const {
        return MetricField(name_, domain_, regularity_, value_);
    }

  private:
    std::string name_;
    Rect domain_;
    Regularity regularity_;
    Value value_;
    Derivative derivative_;
    Scalar analytic_sectional_;
};

// |v wedge w|^2 under g, i.e. g(v,v) g(w,w) - g(v,w)^2
double wedge_norm(const Sym2& g, const Vec2& v, const Vec2& w);

// Euclidean metric; analytic hooks are exact zeros
MetricField make_flat(Rect domain = Rect{});

// g = (1 + |x|^lambda) Id on [-1,1]^2, lambda in (1,2): curvature -> -inf at x = 0
MetricField make_hw1(double lambda);

// g = diag(1, 1 - |x|^lambda) on [-0.9,0.9] x [-1,1]: curvature -> +inf at x = 0
MetricField make_hw2(double lambda);

// stereographic constant-curvature metric g = 4 / (1 + k (x^2+y^2))^2 Id;
// for k < 0 the domain is the square inscribed in the disk of radius 0.9/sqrt(-k)
MetricField make_constant_curvature(double k);

struct NondegeneracyReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    Vec2 argmin{};
    Vec2 argmax{};
};

// min/max metric eigenvalue over a resolution^2 grid including the boundary;
// throws DegenerateMetric (naming the node) if the minimum is not positive
NondegeneracyReport nondegeneracy_scan(const MetricField& field, int resolution);

// textual catalog entries: "flat", "hw1(<lambda>)", "hw2(<lambda>)", "constk(<k>)"
MetricField parse_metric_spec(const std::string& spec);

// Same metric values viewed on a sub rectangle of the domain; derivative and
// curvature hooks are carried over.
MetricField restrict_field(const MetricField& field, const Rect& sub);

} // namespace curvlab
