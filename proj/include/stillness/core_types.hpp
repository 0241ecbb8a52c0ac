#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stillness {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Index of one haptic x musical-control condition.
 *
 * n selects the haptic force law (0..5), m the musical-control mode (0..1).
 * Construction validates the range, so any ConditionId in circulation is one
 * of the twelve experimental conditions.
 */
class ConditionId {
public:
    static constexpr int kHapticCount = 6;
    static constexpr int kMusicalCount = 2;

    constexpr ConditionId() = default;
    ConditionId(int n, int m);

    [[nodiscard]] constexpr int haptic() const noexcept { return n_; }
    [[nodiscard]] constexpr int musical() const noexcept { return m_; }

    /// "n,m", as in the run headers ("0,0").
    [[nodiscard]] std::string to_string() const;
    /// "condition" + n + m, as in the travel-amplitude table ("condition10").
    [[nodiscard]] std::string table_name() const;

    /// Parses "n,m" (whitespace around the comma is allowed).
    static ConditionId parse(std::string_view text);
    /// Parses a table column name such as "condition51".
    static ConditionId parse_table_name(std::string_view text);

    /// All twelve conditions, m-major then n (00,10,...,50,01,...,51).
    static std::vector<ConditionId> all();

    friend constexpr bool operator==(ConditionId, ConditionId) = default;

private:
    int n_ = 0;
    int m_ = 0;
};

/// Short names of the haptic and musical components.
std::pair<std::string_view, std::string_view> condition_label(ConditionId c);

/// Force-law and sound-mapping constants of the experimental conditions.
struct HapticParams {
    double pos_force_N = 0.25;
    double neg_force_N = -0.25;
    double viscosity_N_per_mm_per_s = -0.30 * 0.010;
    double anti_viscosity_N_per_mm_per_s = 0.08 * 0.010;
    double marker_ampl_N = 0.022;
    double marker_interval_mm = 0.2;
    double marker_gap_mm = 0.001;
    double stim_base_mm = 0.0;
    double stim_height_mm = 10.0;
    double tone_base_Hz = 440.0;
    double tone_cap_Hz = 8000.0;
    double semitones_per_mm = 4.0;
    // Carried for completeness; the noise output is not rendered.
    double noise_center_Hz = 220.0;
    double noise_width_Hz = 1000.0;

    [[nodiscard]] double stim_top_mm() const noexcept { return stim_base_mm + stim_height_mm; }
    /// Throws Error if the marker gap does not fit inside one interval.
    void validate() const;
};

/// Device sampling rates and measured non-idealities.
struct SamplingSpec {
    int position_rate_Hz = 4000;
    int force_rate_Hz = 1000;
    double run_duration_s = 4.0;
    double transducer_mass_kg = 0.010;
    double latency_s = 0.004;
    double force_resolution_N = 0.003;
    double sensor_noise_pp_mm = 0.2;

    [[nodiscard]] std::size_t samples_per_run() const;
    /// Position samples per force command (4 for the defaults).
    [[nodiscard]] int steps_per_command() const;
    [[nodiscard]] double dt() const noexcept { return 1.0 / position_rate_Hz; }
    void validate() const;
};

/**
 * @brief One stillness-movement episode.
 *
 * The force command is stored at the position rate by zero-order hold, so
 * every fourth sample (for the default rates) is a distinct 1000 Hz command.
 * The constructor rejects mismatched lengths, empty series and positions
 * outside [0, 10] mm.
 */
class RunRecord {
public:
    RunRecord(ConditionId condition, std::vector<double> z_mm, std::vector<double> v_mm_s,
              std::vector<double> f_target_N);

    [[nodiscard]] ConditionId condition() const noexcept { return condition_; }
    [[nodiscard]] const std::vector<double>& z_mm() const noexcept { return z_mm_; }
    [[nodiscard]] const std::vector<double>& v_mm_s() const noexcept { return v_mm_s_; }
    [[nodiscard]] const std::vector<double>& f_target_N() const noexcept { return f_target_N_; }
    [[nodiscard]] std::size_t size() const noexcept { return z_mm_.size(); }

    std::optional<int> subject;
    std::optional<int> run_index;
    std::optional<std::uint64_t> seed;

private:
    ConditionId condition_;
    std::vector<double> z_mm_;
    std::vector<double> v_mm_s_;
    std::vector<double> f_target_N_;
};

}  // namespace stillness
