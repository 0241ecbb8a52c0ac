#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Direct O(n^2) DFT in long double with exact angle reduction (j k mod n).
inline std::vector<long double> dft_pp(const std::vector<double>& z, std::vector<long double>* phases = nullptr) {
    const std::size_t n = z.size();
    std::vector<long double> cos_t(n), sin_t(n);
    for (std::size_t j = 0; j < n; ++j) {
        const long double th = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(j) / n;
        cos_t[j] = std::cos(th);
        sin_t[j] = std::sin(th);
    }
    std::vector<long double> pp(n / 2 + 1, 0.0L);
    if (phases) phases->assign(n / 2 + 1, 0.0L);
    for (std::size_t k = 1; k <= n / 2; ++k) {
        long double re = 0.0L, im = 0.0L;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < n; ++j) {
            re += z[j] * cos_t[idx];
            im -= z[j] * sin_t[idx];
            idx = (idx + k) % n;
        }
        pp[k] = 4.0L / n * std::sqrt(re * re + im * im);
        if (phases) (*phases)[k] = std::atan2(im, re);
    }
    return pp;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<long double> solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0L) throw std::runtime_error("singular system");
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<long double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

/// R² of a least-squares fit on the given design columns via the normal equations.
inline long double r2_normal_equations(const std::vector<std::vector<long double>>& cols, const std::vector<double>& y) {
    const std::size_t p = cols.size();
    const std::size_t n = y.size();
    std::vector<std::vector<long double>> ata(p, std::vector<long double>(p, 0.0L));
    std::vector<long double> aty(p, 0.0L);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t r = 0; r < n; ++r) ata[i][j] += cols[i][r] * cols[j][r];
        }
        for (std::size_t r = 0; r < n; ++r) aty[i] += cols[i][r] * y[r];
    }
    const auto coef = solve(ata, aty);
    long double mean = 0.0L;
    for (double v : y) mean += v;
    mean /= n;
    long double ss_res = 0.0L, ss_tot = 0.0L;
    for (std::size_t r = 0; r < n; ++r) {
        long double fit = 0.0L;
        for (std::size_t i = 0; i < p; ++i) fit += coef[i] * cols[i][r];
        ss_res += (y[r] - fit) * (y[r] - fit);
        ss_tot += (y[r] - mean) * (y[r] - mean);
    }
    return 1.0L - ss_res / ss_tot;
}

/// Legendre columns P_0..P_degree evaluated on n points evenly spread over [-1, 1].
inline std::vector<std::vector<long double>> legendre_columns(std::size_t n, int degree) {
    std::vector<std::vector<long double>> cols(static_cast<std::size_t>(degree) + 1, std::vector<long double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const long double x = 2.0L * r / (n - 1) - 1.0L;
        cols[0][r] = 1.0L;
        if (degree >= 1) cols[1][r] = x;
        for (int k = 2; k <= degree; ++k) {
            cols[k][r] = ((2.0L * k - 1.0L) * x * cols[k - 1][r] - (k - 1.0L) * cols[k - 2][r]) / k;
        }
    }
    return cols;
}

/// Slope and intercept of z = a + b t from the 2x2 normal equations with raw sums.
struct Line {
    long double intercept;
    long double slope;
};

inline Line ols_line(const std::vector<double>& z, double rate) {
    long double s1 = 0, st = 0, stt = 0, sz = 0, stz = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const long double t = static_cast<long double>(i) / rate;
        s1 += 1;
        st += t;
        stt += t * t;
        sz += z[i];
        stz += t * z[i];
    }
    const auto x = solve({{s1, st}, {st, stt}}, {sz, stz});
    return {x[0], x[1]};
}

inline std::vector<double> gaussian(std::size_t n, unsigned seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, sigma);
    std::vector<double> out(n);
    for (auto& v : out) v = d(rng);
    return out;
}

}  // namespace oracle
