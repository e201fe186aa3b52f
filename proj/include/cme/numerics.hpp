#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace cme {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double logsumexp(const std::vector<double>& xs) {
    double m = kNegInf;
    for (double x : xs)
        if (x > m) m = x;
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// Ordinary least squares for a small fixed number of regressors.
// Returns coefficients and their standard errors.
struct OlsFit {
    std::vector<double> coef;
    std::vector<double> stderr_;
    double residual_rms = 0.0;
};

OlsFit ols(const std::vector<std::vector<double>>& X, const std::vector<double>& y);

}  // namespace cme
