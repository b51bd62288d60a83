#include "mgspec/edge_basis.hpp"

#include <cmath>

namespace mgspec {

namespace {

constexpr double kScaleOnset = 30.0;
constexpr double kSeriesCut = 1e-4;  // |lambda| x^2 below this -> power series

double log_scale_for(double lambda, double length) {
    if (lambda >= 0.0) return 0.0;
    const double kappa_l = std::sqrt(-lambda) * length;
    return kappa_l > kScaleOnset ? kappa_l - kScaleOnset : 0.0;
}

/// C and S at x, times exp(-s).
void eval_cs(double lambda, double x, double s, double& c, double& sv) {
    const double u = lambda * x * x;
    if (std::abs(u) < kSeriesCut) {
        // cos-type and sinc-type power series in u = lambda x^2; three terms
        // leave a relative error below 1e-26 at the cut.
        const double cser = 1.0 - u / 2.0 * (1.0 - u / 12.0 * (1.0 - u / 30.0));
        const double sser = 1.0 - u / 6.0 * (1.0 - u / 20.0 * (1.0 - u / 42.0));
        const double f = std::exp(-s);
        c = cser * f;
        sv = x * sser * f;
        return;
    }
    if (lambda > 0.0) {
        const double k = std::sqrt(lambda);
        const double f = std::exp(-s);  // s == 0 here, kept for uniformity
        c = std::cos(k * x) * f;
        sv = std::sin(k * x) / k * f;
        return;
    }
    const double kappa = std::sqrt(-lambda);
    const double ep = std::exp(kappa * x - s);   // bounded by exp(30) by construction
    const double em = std::exp(-kappa * x - s);  // may underflow to 0 harmlessly
    c = 0.5 * (ep + em);
    sv = 0.5 * (ep - em) / kappa;
}

}  // namespace

double EdgeBasisEval::wronskian_defect() const {
    const double w = (cL * s_prime_L - c_prime_L * sL) * std::exp(2.0 * log_scale);
    return std::abs(w - 1.0);
}

EdgeBasisEval edge_basis(double lambda, double length) {
    EdgeBasisEval ev;
    ev.lambda = lambda;
    ev.length = length;
    ev.log_scale = log_scale_for(lambda, length);

    const double f = std::exp(-ev.log_scale);
    ev.c0 = f;
    ev.s0 = 0.0;
    ev.c_prime_0 = 0.0;
    ev.s_prime_0 = f;

    eval_cs(lambda, length, ev.log_scale, ev.cL, ev.sL);
    ev.c_prime_L = -lambda * ev.sL;  // C' = -lambda S
    ev.s_prime_L = ev.cL;            // S' = C
    return ev;
}

std::pair<double, double> edge_basis_values_at(double lambda, double length, double x) {
    double c, s;
    eval_cs(lambda, x, log_scale_for(lambda, length), c, s);
    return {c, s};
}

std::pair<double, double> edge_basis_values_unscaled(double lambda, double x) {
    double c, s;
    eval_cs(lambda, x, 0.0, c, s);
    return {c, s};
}

}  // namespace mgspec
