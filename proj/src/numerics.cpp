#include "cme/numerics.hpp"

#include <stdexcept>

namespace cme {

OlsFit ols(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    const size_t n = X.size();
    if (n == 0 || n != y.size()) throw std::invalid_argument("ols: bad shapes");
    const size_t k = X[0].size();
    if (n < k) throw std::invalid_argument("ols: underdetermined");
    // Normal equations with Gaussian elimination; k is tiny (<= 3).
    std::vector<std::vector<double>> A(k, std::vector<double>(k, 0.0));
    std::vector<double> b(k, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t p = 0; p < k; ++p) {
            b[p] += X[i][p] * y[i];
            for (size_t q = 0; q < k; ++q) A[p][q] += X[i][p] * X[i][q];
        }
    }
    // Invert A (small, SPD) by Gauss-Jordan, keeping the inverse for stderrs.
    std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) inv[i][i] = 1.0;
    auto M = A;
    for (size_t col = 0; col < k; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < k; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-300) throw std::runtime_error("ols: singular design");
        std::swap(M[piv], M[col]);
        std::swap(inv[piv], inv[col]);
        double d = M[col][col];
        for (size_t c = 0; c < k; ++c) {
            M[col][c] /= d;
            inv[col][c] /= d;
        }
        for (size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = M[r][col];
            for (size_t c = 0; c < k; ++c) {
                M[r][c] -= f * M[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    OlsFit fit;
    fit.coef.assign(k, 0.0);
    for (size_t p = 0; p < k; ++p)
        for (size_t q = 0; q < k; ++q) fit.coef[p] += inv[p][q] * b[q];
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double pred = 0.0;
        for (size_t p = 0; p < k; ++p) pred += X[i][p] * fit.coef[p];
        ss += (y[i] - pred) * (y[i] - pred);
    }
    double dof = n > k ? static_cast<double>(n - k) : 1.0;
    double sigma2 = ss / dof;
    fit.residual_rms = std::sqrt(ss / n);
    fit.stderr_.assign(k, 0.0);
    for (size_t p = 0; p < k; ++p) fit.stderr_[p] = std::sqrt(std::max(0.0, sigma2 * inv[p][p]));
    return fit;
}

}  // namespace cme
