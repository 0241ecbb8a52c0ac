#include "stillness/signal_stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace stillness {

namespace {

void require_nonempty(std::span<const double> z, const char* what) {
    if (z.empty()) throw Error(std::string(what) + ": empty series");
}

double adjusted(double r2, std::size_t n, std::size_t params) {
    const double nn = static_cast<double>(n);
    return 1.0 - (1.0 - r2) * (nn - 1.0) / (nn - static_cast<double>(params));
}

double mean_of(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v;
    return s / static_cast<double>(z.size());
}

bool is_constant(std::span<const double> z) {
    return std::all_of(z.begin(), z.end(), [first = z.front()](double v) { return v == first; });
}

}  // namespace

double travel_amplitude(std::span<const double> z) {
    require_nonempty(z, "travel amplitude");
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    return *hi - *lo;
}

double avg_abs_travel(std::span<const double> z, double rate_Hz) {
    if (z.size() < 2) throw Error("average travel needs at least 2 samples");
    double sum = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) sum += std::abs(z[i] - z[i - 1]);
    return sum * rate_Hz / static_cast<double>(z.size() - 1);
}

double jarque_bera_p(double statistic) {
    return std::exp(-0.5 * statistic);
}

JarqueBeraResult jarque_bera(std::span<const double> z) {
    if (z.size() < 4) throw Error("Jarque-Bera test needs at least 4 samples");
    const double n = static_cast<double>(z.size());
    const double mu = mean_of(z);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : z) {
        const double d = v - mu;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (is_constant(z) || !(m2 > 0.0)) throw Error("degenerate sample");

    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    JarqueBeraResult r;
    r.statistic = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    r.p_value = jarque_bera_p(r.statistic);
    return r;
}

LinearFitResult linear_fit(std::span<const double> z, double rate_Hz) {
    if (z.size() < 3) throw Error("linear fit needs at least 3 samples");
    const std::size_t n = z.size();
    const double nn = static_cast<double>(n);
    const double t_mean = (nn - 1.0) / 2.0 / rate_Hz;
    const double z_mean = mean_of(z);

    double stt = 0.0, stz = 0.0, szz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = static_cast<double>(i) / rate_Hz - t_mean;
        const double dz = z[i] - z_mean;
        stt += dt * dt;
        stz += dt * dz;
        szz += dz * dz;
    }
    LinearFitResult r;
    if (is_constant(z)) {
        r.intercept_mm = z.front();
        return r;
    }
    r.slope_mm_s = stz / stt;
    r.intercept_mm = z_mean - r.slope_mm_s * t_mean;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = z[i] - (r.intercept_mm + r.slope_mm_s * static_cast<double>(i) / rate_Hz);
        ss_res += e * e;
    }
    r.r2 = 1.0 - ss_res / szz;
    r.adj_r2 = adjusted(r.r2, n, 2);
    return r;
}

PolyFitResult poly_fit(std::span<const double> z, int degree) {
    if (degree < 0) throw Error("polynomial degree must be non-negative");
    const auto params = static_cast<std::size_t>(degree) + 1;
    if (z.size() <= params) {
        throw Error("degree-" + std::to_string(degree) + " fit needs more than " + std::to_string(params) +
                    " samples");
    }
    const auto n = static_cast<Eigen::Index>(z.size());
    const auto p = static_cast<Eigen::Index>(params);

    Eigen::MatrixXd basis(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0;
        basis(i, 0) = 1.0;
        if (p > 1) basis(i, 1) = x;
        for (Eigen::Index k = 2; k < p; ++k) basis(i, k) = 2.0 * x * basis(i, k - 1) - basis(i, k - 2);
    }
    const Eigen::Map<const Eigen::VectorXd> y(z.data(), n);
    const double y_mean = y.mean();
    const double ss_tot = (y.array() - y_mean).square().sum();

    PolyFitResult r;
    if (is_constant(z) || !(ss_tot > 0.0)) return r;

    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(y);
    const double ss_res = (y - basis * coef).squaredNorm();
    r.r2 = 1.0 - ss_res / ss_tot;
    r.adj_r2 = adjusted(r.r2, z.size(), params);
    return r;
}

double poly40_adj_r2(std::span<const double> z) {
    return poly_fit(z, kPolyDegree).adj_r2;
}

Histogram amplitude_histogram(std::span<const double> z, double bin_mm) {
    if (!(bin_mm > 0.0)) throw Error("histogram bin width must be positive");
    require_nonempty(z, "histogram");
    Histogram h;
    h.bin_mm = bin_mm;
    const auto index = [bin_mm](double v) { return static_cast<std::int64_t>(std::floor(v / bin_mm)); };
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    h.first_bin = index(*lo);
    h.counts.assign(static_cast<std::size_t>(index(*hi) - h.first_bin + 1), 0);
    for (double v : z) ++h.counts[static_cast<std::size_t>(index(v) - h.first_bin)];
    return h;
}

PerRunStats per_run_stats(const RunRecord& run, const SamplingSpec& sampling) {
    const auto& z = run.z_mm();
    const double rate = sampling.position_rate_Hz;

    PerRunStats s;
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    s.z_min_mm = *lo;
    s.z_max_mm = *hi;
    s.z_travel_amplitude_mm = travel_amplitude(z);
    s.avg_abs_z_travel_mm_s = avg_abs_travel(z, rate);
    try {
        const auto jb = jarque_bera(z);
        s.jb_stat = jb.statistic;
        s.jb_p = jb.p_value;
    } catch (const Error&) {
        // constant series: no moments to test
    }
    const auto lin = linear_fit(z, rate);
    s.lin_slope_mm_s = lin.slope_mm_s;
    s.lin_adj_r2_pct = 100.0 * lin.adj_r2;
    s.poly40_adj_r2_pct = 100.0 * poly40_adj_r2(z);
    s.histogram = amplitude_histogram(z);
    s.spectrum = dft_pp(z, rate);
    s.threshold_maxfreq_Hz = threshold_maxfreq(s.spectrum, s.dft_ampl_thresh_mm);
    return s;
}

}  // namespace stillness
