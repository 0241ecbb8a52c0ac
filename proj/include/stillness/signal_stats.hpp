#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stillness/core_types.hpp"
#include "stillness/spectral.hpp"

namespace stillness {

struct JarqueBeraResult {
    double statistic = 0.0;
    double p_value = 1.0;  ///< chi-square(2) survival, exp(-JB/2)
};

struct LinearFitResult {
    double slope_mm_s = 0.0;
    double intercept_mm = 0.0;
    double r2 = 0.0;      ///< fraction
    double adj_r2 = 0.0;  ///< fraction
};

struct PolyFitResult {
    double r2 = 0.0;
    double adj_r2 = 0.0;
};

/// Counts over [k*bin, (k+1)*bin) for k = first_bin, first_bin + 1, ...
struct Histogram {
    double bin_mm = 0.0;
    std::int64_t first_bin = 0;
    std::vector<std::size_t> counts;

    [[nodiscard]] double lower_edge(std::size_t i) const noexcept {
        return static_cast<double>(first_bin + static_cast<std::int64_t>(i)) * bin_mm;
    }
};

inline constexpr double kDefaultHistogramBin_mm = 0.25;
inline constexpr int kPolyDegree = 40;

/// The per-run statistics block. R² values are in percent.
struct PerRunStats {
    double z_min_mm = 0.0;
    double z_max_mm = 0.0;
    double z_travel_amplitude_mm = 0.0;
    double avg_abs_z_travel_mm_s = 0.0;
    // Empty when the series has zero variance.
    std::optional<double> jb_stat;
    std::optional<double> jb_p;
    double lin_slope_mm_s = 0.0;
    double lin_adj_r2_pct = 0.0;
    double poly40_adj_r2_pct = 0.0;
    double dft_ampl_thresh_mm = kDftAmplitudeThreshold_mm;
    double threshold_maxfreq_Hz = 0.0;
    Histogram histogram;
    Spectrum spectrum;
};

double travel_amplitude(std::span<const double> z);

/// Mean of |z[i+1] - z[i]| * rate.
double avg_abs_travel(std::span<const double> z, double rate_Hz);

/// Population moments; throws "degenerate sample" on zero variance.
JarqueBeraResult jarque_bera(std::span<const double> z);

/// chi-square with 2 degrees of freedom, upper tail.
double jarque_bera_p(double statistic);

/// OLS z = a + b t with t = i / rate seconds. R² is 0 when z is constant.
LinearFitResult linear_fit(std::span<const double> z, double rate_Hz);

/**
 * Least-squares polynomial fit of the given degree over sample time mapped to
 * [-1, 1], solved by QR in a Chebyshev basis. Requires more samples than
 * coefficients.
 */
PolyFitResult poly_fit(std::span<const double> z, int degree);

/// Adjusted R² (fraction) of the degree-40 fit.
double poly40_adj_r2(std::span<const double> z);

Histogram amplitude_histogram(std::span<const double> z, double bin_mm = kDefaultHistogramBin_mm);

PerRunStats per_run_stats(const RunRecord& run, const SamplingSpec& sampling = {});

}  // namespace stillness
