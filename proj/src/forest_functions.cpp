#include "lvelab/forest_functions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "lvelab/errors.hpp"

namespace lvelab::forest::closed_form {

namespace {

std::atomic<std::uint64_t> next_polynomial_id{1};

}  // namespace

Polynomial::Polynomial(int n, std::map<Exponents, double> terms, std::string label)
    : n_(n), lines_(line_count(n)), id_(next_polynomial_id++), label_(std::move(label)) {
    for (const auto& [e, c] : terms) {
        if (e.size() != static_cast<std::size_t>(lines_))
            throw ContractViolation("monomial exponent vector has the wrong length");
        if (c == 0.0) continue;
        for (int k : e) {
            if (k < 0) throw ContractViolation("monomial exponents must be non-negative");
            max_exponent_ = std::max(max_exponent_, k);
        }
        exponents_.insert(exponents_.end(), e.begin(), e.end());
        coefficients_.push_back(c);
    }
}

const Polynomial::Derivative& Polynomial::derivative(std::span<const int> lines) const {
    // Forest sums request the same derivative set for every quadrature node.
    thread_local std::uint64_t owner = 0;
    thread_local Derivative cached;
    if (owner == id_ && std::equal(lines.begin(), lines.end(), cached.lines.begin(), cached.lines.end()))
        return cached;
    owner = id_;
    cached = Derivative{{lines.begin(), lines.end()}, {}, {}};
    std::vector<int> e(lines_);
    for (std::size_t t = 0; t < coefficients_.size(); ++t) {
        std::copy_n(exponents_.begin() + static_cast<std::ptrdiff_t>(t * lines_), lines_, e.begin());
        double c = coefficients_[t];
        for (int l : lines) {
            if (e[l] == 0) {
                c = 0.0;
                break;
            }
            c *= e[l]--;
        }
        if (c == 0.0) continue;
        cached.exponents.insert(cached.exponents.end(), e.begin(), e.end());
        cached.coefficients.push_back(c);
    }
    return cached;
}

double Polynomial::mixed_partial(std::span<const int> lines, std::span<const double> x) const {
    const Derivative& d = derivative(lines);
    if (d.coefficients.empty()) return 0.0;
    thread_local std::vector<double> powers;
    const int stride = max_exponent_ + 1;
    powers.resize(static_cast<std::size_t>(lines_) * stride);
    for (int l = 0; l < lines_; ++l) {
        double p = 1.0;
        for (int k = 0; k < stride; ++k, p *= x[l]) powers[l * stride + k] = p;
    }
    double total = 0.0;
    for (std::size_t t = 0; t < d.coefficients.size(); ++t) {
        const int* e = d.exponents.data() + t * lines_;
        double term = d.coefficients[t];
        for (int l = 0; l < lines_; ++l) term *= powers[l * stride + e[l]];
        total += term;
    }
    return total;
}

Polynomial Polynomial::power_of_linear(int n, const std::vector<double>& c, double c0, int power) {
    const int lines = line_count(n);
    // Multiply out (c0 + sum c_l x_l)^power term by term.
    std::map<Exponents, double> current{{Exponents(lines, 0), 1.0}};
    for (int p = 0; p < power; ++p) {
        std::map<Exponents, double> next;
        for (const auto& [e, coef] : current) {
            if (c0 != 0.0) next[e] += coef * c0;
            for (int l = 0; l < lines; ++l) {
                if (c[l] == 0.0) continue;
                Exponents f = e;
                ++f[l];
                next[f] += coef * c[l];
            }
        }
        current = std::move(next);
    }
    return Polynomial(n, std::move(current), "(c.x + c0)^" + std::to_string(power));
}

ExpQuadratic::ExpQuadratic(int n, std::vector<double> linear, std::vector<double> quadratic, std::string label)
    : n_(n), lines_(line_count(n)), b_(std::move(linear)), q_(std::move(quadratic)), label_(std::move(label)) {
    if (b_.size() != static_cast<std::size_t>(lines_) || q_.size() != static_cast<std::size_t>(lines_ * lines_))
        throw ContractViolation("exp-quadratic coefficients have the wrong shape");
    for (int a = 0; a < lines_; ++a)
        for (int c = 0; c < lines_; ++c)
            if (q_[a * lines_ + c] != q_[c * lines_ + a]) throw ContractViolation("quadratic form must be symmetric");
    has_quadratic_ = std::any_of(q_.begin(), q_.end(), [](double v) { return v != 0.0; });
}

ExpQuadratic ExpQuadratic::linear(int n, std::vector<double> b, std::string label) {
    const int lines = line_count(n);
    return ExpQuadratic(n, std::move(b), std::vector<double>(lines * lines, 0.0), std::move(label));
}

namespace {

// Sum over partitions of set[0, size) into singletons and pairs.
double matchings(int* set, int size, const double* g, const double* q, int lines) {
    if (size == 0) return 1.0;
    const int first = set[size - 1];
    double total = g[first] * matchings(set, size - 1, g, q, lines);
    for (int k = 0; k < size - 1; ++k) {
        const double qlm = q[first * lines + set[k]];
        if (qlm == 0.0) continue;
        std::swap(set[k], set[size - 2]);
        total += qlm * matchings(set, size - 2, g, q, lines);
        std::swap(set[k], set[size - 2]);
    }
    return total;
}

}  // namespace

double ExpQuadratic::mixed_partial(std::span<const int> lines, std::span<const double> x) const {
    thread_local std::vector<double> g;
    thread_local std::vector<int> set;
    g.assign(b_.begin(), b_.end());
    double exponent = 0.0;
    for (int a = 0; a < lines_; ++a) {
        double qx = 0.0;
        const double* row = q_.data() + a * lines_;
        if (has_quadratic_)
            for (int c = 0; c < lines_; ++c) qx += row[c] * x[c];
        g[a] += qx;
        exponent += x[a] * (b_[a] + 0.5 * qx);
    }
    set.assign(lines.begin(), lines.end());
    return std::exp(exponent) * matchings(set.data(), static_cast<int>(set.size()), g.data(), q_.data(), lines_);
}

std::vector<std::unique_ptr<SmoothFunctionOracle>> standard_battery(int n) {
    const int lines = line_count(n);
    std::vector<std::unique_ptr<SmoothFunctionOracle>> out;
    auto ramp = [&](double scale, double offset) {
        std::vector<double> v(lines);
        for (int l = 0; l < lines; ++l) v[l] = scale * (offset + std::sin(1.0 + 0.7 * l));
        return v;
    };

    // Polynomials of degree <= 3.
    out.push_back(std::make_unique<Polynomial>(Polynomial::power_of_linear(n, ramp(1.0, 0.2), 0.5, 1)));
    out.push_back(std::make_unique<Polynomial>(Polynomial::power_of_linear(n, ramp(0.6, 0.1), -0.3, 2)));
    out.push_back(std::make_unique<Polynomial>(Polynomial::power_of_linear(n, ramp(0.4, 0.0), 1.0, 3)));
    {
        // Mixed cubic: product of the first three lines plus squares.
        std::map<Polynomial::Exponents, double> terms;
        Polynomial::Exponents e(lines, 0);
        for (int l = 0; l < std::min(3, lines); ++l) e[l] = 1;
        terms[e] = 2.0;
        for (int l = 0; l < lines; ++l) {
            Polynomial::Exponents sq(lines, 0);
            sq[l] = 2;
            terms[sq] += 0.25 * (l + 1);
        }
        terms[Polynomial::Exponents(lines, 0)] = -1.0;
        out.push_back(std::make_unique<Polynomial>(n, std::move(terms), "mixed cubic"));
    }

    // Exponentials of linear forms.
    out.push_back(std::make_unique<ExpQuadratic>(ExpQuadratic::linear(n, std::vector<double>(lines, 1.0), "exp(sum x)")));
    out.push_back(std::make_unique<ExpQuadratic>(ExpQuadratic::linear(n, ramp(1.2, 0.0), "exp(b.x), mixed signs")));
    out.push_back(std::make_unique<ExpQuadratic>(ExpQuadratic::linear(n, ramp(-0.5, 1.5), "exp(-b.x)")));

    // Exponentials of PSD quadratic forms: Q = A A^T scaled.
    auto gram = [&](double scale, int seed) {
        std::vector<double> a(lines * lines), q(lines * lines, 0.0);
        for (int r = 0; r < lines; ++r)
            for (int c = 0; c < lines; ++c) a[r * lines + c] = std::cos(0.9 * r + 1.3 * c + seed);
        for (int r = 0; r < lines; ++r)
            for (int c = 0; c < lines; ++c) {
                double s = 0.0;
                for (int k = 0; k < lines; ++k) s += a[r * lines + k] * a[c * lines + k];
                q[r * lines + c] = scale * s / lines;
            }
        // Exact symmetry.
        for (int r = 0; r < lines; ++r)
            for (int c = 0; c < r; ++c) q[r * lines + c] = q[c * lines + r];
        return q;
    };
    out.push_back(std::make_unique<ExpQuadratic>(n, std::vector<double>(lines, 0.0), gram(0.5, 0), "exp(x.Qx/2)"));
    out.push_back(std::make_unique<ExpQuadratic>(n, ramp(0.3, 0.0), gram(0.3, 1), "exp(b.x + x.Qx/2)"));
    {
        std::vector<double> identity(lines * lines, 0.0);
        for (int l = 0; l < lines; ++l) identity[l * lines + l] = 0.4;
        out.push_back(std::make_unique<ExpQuadratic>(n, ramp(-0.2, 0.5), identity, "exp(b.x + 0.2|x|^2)"));
    }
    return out;
}

}  // namespace lvelab::forest::closed_form
