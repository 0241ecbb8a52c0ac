#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "stillness/core_types.hpp"
#include "stillness/spectral.hpp"

namespace stillness {

/// One forced cell of the positional-marker pattern.
struct MarkerCell {
    int index = 0;
    double z_lo_mm = 0.0;
    double z_hi_mm = 0.0;  ///< exclusive
    double force_N = 0.0;
};

/// The marker cell containing z, or nothing if z lies in a gap or outside the stimulus.
std::optional<MarkerCell> marker_cell(double z_mm, const HapticParams& p = {});

/// To-fingerpad force of haptic law n at position z and speed v.
double condition_force(int n, double z_mm, double v_mm_s, const HapticParams& p = {});

/// Force step at a marker boundary: twice the bipolar amplitude.
double marker_step_amplitude(const HapticParams& p = {});

/// 440 Hz + 4 semitones per mm, capped at 8 kHz.
double pitch_of_z(double z_mm, const HapticParams& p = {});

/**
 * @brief Slow bounded random walk added to the tremor.
 *
 * The walk reflects softly off asymmetric bounds: a restoring rate pulls it
 * back once it leaves [lower, upper]. The orientation of the bounds is drawn
 * per seed, so the skew of the resulting position distribution varies in sign.
 */
struct DriftParams {
    double sigma_mm_per_sqrt_s = 0.35;
    double lower_mm = -0.15;
    double upper_mm = 0.45;
    double restore_per_s = 25.0;
    /// Increments are low-passed here, keeping the walk out of the tremor band.
    double corner_Hz = 0.5;
};

/**
 * Tremor displacement in mm: cosines at every k / duration Hz inside the model
 * band with peak-to-peak amplitude c / f and independent uniform phases, plus
 * an optional drift walk. The result has zero mean.
 */
std::vector<double> generate_tremor(const OneOverFModel& model, std::uint64_t seed, double duration_s, double rate_Hz,
                                    bool drift_enabled, const DriftParams& drift = {});

struct SimConfig {
    ConditionId condition;
    std::uint64_t seed = 1;
    double target_z_mm = 5.0;
    /// PD stand-in for the subject's stabilisation.
    double controller_kp_N_per_mm = 0.3;
    double controller_kd_N_per_mm_per_s = 0.002;
    /// Scales the tremor reference fed through the controller as a force kp * scale * r(t).
    double noise_scale = 1.0;
    bool drift_enabled = true;
    OneOverFModel model;
    DriftParams drift;
    bool emulate_latency = false;
    bool emulate_force_quantization = false;
    bool emulate_sensor_noise = false;
    /// Settling time simulated before the recorded window.
    double warmup_s = 0.5;
    /// Start position; the target when unset.
    std::optional<double> initial_z_mm;
    double initial_v_mm_s = 0.0;
    HapticParams haptics;
    SamplingSpec sampling;

    void validate() const;
};

struct SimDiagnostics {
    std::size_t steps = 0;
    std::size_t clamped_steps = 0;  ///< steps where the position was clamped to the stimulus range
};

/**
 * Integrates m z'' = F_condition + F_controller + F_noise at the position rate.
 * Force commands are refreshed at the force rate and held in between; the
 * recorded f_target is the commanded force. Throws "unstable simulation" when
 * the unclamped position leaves the range on more than half of the steps.
 */
RunRecord simulate_run(const SimConfig& cfg, SimDiagnostics* diagnostics = nullptr);

}  // namespace stillness
