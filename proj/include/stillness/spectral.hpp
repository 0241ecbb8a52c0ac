#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stillness {

/**
 * @brief Linear-axis amplitude spectrum of one series.
 *
 * pp_mm[k] is the peak-to-peak amplitude in mm at frequency k * df_Hz for
 * 1 <= k <= n/2. pp_mm[0] is unused and kept at zero; the 0 Hz value is the
 * series mean, stored in mean_mm.
 */
struct Spectrum {
    double df_Hz = 0.0;
    double mean_mm = 0.0;
    std::vector<double> pp_mm;

    [[nodiscard]] std::size_t bins() const noexcept { return pp_mm.size(); }
    [[nodiscard]] double freq_Hz(std::size_t k) const noexcept { return static_cast<double>(k) * df_Hz; }
};

/// pp(f) = c / f, fitted or synthesized over [band_lo_Hz, band_hi_Hz].
struct OneOverFModel {
    double c_mm_Hz = 3.0 / 17.0;
    double band_lo_Hz = 0.25;
    double band_hi_Hz = 30.0;
    double hf_floor_mm = 0.01;

    void validate() const;
};

inline constexpr double kDftAmplitudeThreshold_mm = 0.010;

/**
 * Rectangular-window DFT scaled to peak-to-peak millimetres:
 * pp[k] = (4/n) |sum_j z[j] exp(-2 pi i j k / n)|. A cosine of peak amplitude A
 * at a bin frequency reads 2A. Requires an even, non-empty series.
 */
Spectrum dft_pp(std::span<const double> z, double rate_Hz);

/// Highest k*df whose amplitude reaches thresh_mm; 0 if no bin does.
double threshold_maxfreq(const Spectrum& s, double thresh_mm = kDftAmplitudeThreshold_mm);

/// Per-bin arithmetic mean. All inputs must share df and length.
Spectrum average_spectra(std::span<const Spectrum> spectra);

/// c / f. Throws for f <= 0 (0 Hz is the series mean, not modelled).
double eval_model(const OneOverFModel& model, double f_Hz);

/// Least-squares c minimising sum (pp[k] - c/f_k)^2 over bins in [lo, hi].
double fit_one_over_f(const Spectrum& s, double band_lo_Hz, double band_hi_Hz);

}  // namespace stillness
