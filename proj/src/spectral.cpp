#include "stillness/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>

#include "stillness/core_types.hpp"

namespace stillness {

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan p) const noexcept {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

}  // namespace

void OneOverFModel::validate() const {
    if (!(c_mm_Hz >= 0.0)) throw Error("1/f coefficient must be non-negative");
    if (!(band_lo_Hz > 0.0) || !(band_lo_Hz < band_hi_Hz)) throw Error("1/f band must satisfy 0 < lo < hi");
}

Spectrum dft_pp(std::span<const double> z, double rate_Hz) {
    const std::size_t n = z.size();
    if (n < 2 || n % 2 != 0) throw Error("DFT requires a non-empty series of even length");
    if (!(rate_Hz > 0.0)) throw Error("sample rate must be positive");

    const std::size_t half = n / 2;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (half + 1))));
    if (!in || !out) throw Error("FFT buffer allocation failed");

    PlanHandle plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    }
    if (!plan) throw Error("FFT planning failed");

    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        in.get()[j] = z[j];
        sum += z[j];
    }
    fftw_execute(plan.get());

    Spectrum s;
    s.df_Hz = rate_Hz / static_cast<double>(n);
    s.mean_mm = sum / static_cast<double>(n);
    s.pp_mm.assign(half + 1, 0.0);
    const double scale = 4.0 / static_cast<double>(n);
    for (std::size_t k = 1; k <= half; ++k) {
        const auto& c = out.get()[k];
        s.pp_mm[k] = scale * std::hypot(c[0], c[1]);
    }
    return s;
}

double threshold_maxfreq(const Spectrum& s, double thresh_mm) {
    for (std::size_t k = s.pp_mm.size(); k-- > 1;) {
        if (s.pp_mm[k] >= thresh_mm) return s.freq_Hz(k);
    }
    return 0.0;
}

Spectrum average_spectra(std::span<const Spectrum> spectra) {
    if (spectra.empty()) throw Error("cannot average an empty list of spectra");
    Spectrum avg;
    avg.df_Hz = spectra.front().df_Hz;
    avg.pp_mm.assign(spectra.front().pp_mm.size(), 0.0);
    for (const auto& s : spectra) {
        if (s.df_Hz != avg.df_Hz || s.pp_mm.size() != avg.pp_mm.size()) {
            throw Error("cannot average spectra of mixed resolution");
        }
        avg.mean_mm += s.mean_mm;
        for (std::size_t k = 0; k < s.pp_mm.size(); ++k) avg.pp_mm[k] += s.pp_mm[k];
    }
    const double count = static_cast<double>(spectra.size());
    avg.mean_mm /= count;
    for (auto& v : avg.pp_mm) v /= count;
    return avg;
}

double eval_model(const OneOverFModel& model, double f_Hz) {
    if (!(f_Hz > 0.0)) throw Error("1/f model is undefined at f <= 0");
    return model.c_mm_Hz / f_Hz;
}

double fit_one_over_f(const Spectrum& s, double band_lo_Hz, double band_hi_Hz) {
    // Inclusive band edges, tolerant of rounding in k * df.
    const double eps = 1e-9 * s.df_Hz;
    double num = 0.0;
    double den = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 1; k < s.pp_mm.size(); ++k) {
        const double f = s.freq_Hz(k);
        if (f < band_lo_Hz - eps || f > band_hi_Hz + eps) continue;
        num += s.pp_mm[k] / f;
        den += 1.0 / (f * f);
        ++used;
    }
    if (used < 3) {
        throw Error("1/f fit band [" + std::to_string(band_lo_Hz) + ", " + std::to_string(band_hi_Hz) +
                    "] Hz contains fewer than 3 bins");
    }
    return num / den;
}

}  // namespace stillness
