#pragma once

// Closed-form density overlaps of 1D Hermite functions, independent of the
// library's quadrature: expand H_nu^2 H_mu^2 as a polynomial and integrate
// term by term against exp(-2x^2).

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline std::vector<double> hermite(int n) {
    std::vector<double> h0{1.0};
    if (n == 0) return h0;
    std::vector<double> h1{0.0, 2.0};
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
        for (std::size_t i = 0; i < h1.size(); ++i) next[i + 1] += 2.0 * h1[i];
        for (std::size_t i = 0; i < h0.size(); ++i) next[i] -= 2.0 * k * h0[i];
        h0 = h1;
        h1 = next;
    }
    return h1;
}

inline std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

/// Integral of x^(2k) exp(-2x^2) over the real line.
inline double gaussian_moment(int k) {
    double odd = 1.0;
    for (int j = 1; j <= k; ++j) odd *= 2.0 * j - 1.0;
    return std::sqrt(std::numbers::pi / 2.0) * odd / std::pow(4.0, k);
}

inline double overlap(int nu, int mu) {
    const auto hn = hermite(nu);
    const auto hm = hermite(mu);
    const auto poly = multiply(multiply(hn, hn), multiply(hm, hm));
    double integral = 0.0;
    for (std::size_t p = 0; p < poly.size(); p += 2) integral += poly[p] * gaussian_moment(static_cast<int>(p / 2));
    auto norm2 = [](int n) { return 1.0 / (std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::numbers::pi)); };
    return norm2(nu) * norm2(mu) * integral;
}

inline double relative_interaction(int nu, int mu) {
    return (nu == mu ? 1.0 : 2.0) * overlap(nu, mu) / overlap(0, 0);
}

}  // namespace oracle
