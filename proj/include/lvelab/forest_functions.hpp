#pragma once

// Closed-form smooth functions of the line variables with exact mixed
// partial derivatives, used to exercise the forest formula.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lvelab/forest.hpp"

namespace lvelab::forest::closed_form {

/// Sum of monomials prod_l x_l^{e_l}; degree is unrestricted.
class Polynomial final : public SmoothFunctionOracle {
public:
    using Exponents = std::vector<int>;  // one entry per line

    Polynomial(int n, std::map<Exponents, double> terms, std::string label = "polynomial");

    int vertex_count() const override { return n_; }
    double mixed_partial(std::span<const int> lines, std::span<const double> x) const override;
    std::string describe() const override { return label_; }

    /// (c . x + c0)^power expanded into monomials.
    static Polynomial power_of_linear(int n, const std::vector<double>& c, double c0, int power);

private:
    int n_;
    int lines_;
    std::uint64_t id_;  // keys the per-thread derivative cache
    int max_exponent_ = 0;
    std::vector<int> exponents_;  // terms x lines, row-major
    std::vector<double> coefficients_;
    std::string label_;

    struct Derivative {
        std::vector<int> lines;
        std::vector<int> exponents;  // surviving terms x lines
        std::vector<double> coefficients;
    };
    const Derivative& derivative(std::span<const int> lines) const;
};

/// exp(b . x + x^T Q x / 2) with Q symmetric. Mixed partials of distinct
/// lines sum over the ways to split the set into singletons (weight g_l,
/// g = Q x + b) and pairs (weight Q_lm).
class ExpQuadratic final : public SmoothFunctionOracle {
public:
    ExpQuadratic(int n, std::vector<double> linear, std::vector<double> quadratic, std::string label);

    static ExpQuadratic linear(int n, std::vector<double> b, std::string label = "exp-linear");

    int vertex_count() const override { return n_; }
    double mixed_partial(std::span<const int> lines, std::span<const double> x) const override;
    std::string describe() const override { return label_; }

private:
    int n_;
    int lines_;
    std::vector<double> b_;
    std::vector<double> q_;  // lines_ x lines_, row-major
    bool has_quadratic_ = false;
    std::string label_;
};

/// The battery of ten test functions over n vertices used by the identity
/// checks: four polynomials of degree <= 3, three exponentials of linear
/// forms and three exponentials of positive semidefinite quadratic forms.
std::vector<std::unique_ptr<SmoothFunctionOracle>> standard_battery(int n);

}  // namespace lvelab::forest::closed_form
