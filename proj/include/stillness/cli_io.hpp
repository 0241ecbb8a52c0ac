#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stillness/core_types.hpp"
#include "stillness/normality_anova.hpp"
#include "stillness/signal_stats.hpp"
#include "stillness/spectral.hpp"

namespace stillness {

/// Parse failure with the 1-based line and column (0 when not applicable).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t col)
        : Error(what), row_(row), col_(col) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

// Run files: "# key=value" metadata lines, then "time_s,z_mm,v_mm_s,f_target_n".
inline constexpr const char* kRunCsvHeader = "time_s,z_mm,v_mm_s,f_target_n";

void write_run_csv(std::ostream& os, const RunRecord& run, const SamplingSpec& sampling = {});
/// Checks the header, row count and the 1/rate time grid.
RunRecord read_run_csv(std::istream& is, const SamplingSpec& sampling = {});

void write_run_csv_file(const std::string& path, const RunRecord& run, const SamplingSpec& sampling = {});
RunRecord read_run_csv_file(const std::string& path, const SamplingSpec& sampling = {});

/// Twelve "conditionNM" columns, 24 numeric rows; comma, tab or space separated.
AmplitudeTable parse_amplitude_table(std::istream& is);
AmplitudeTable parse_amplitude_table_file(const std::string& path);

/// "freq_hz,pp_mm" with row 0 holding the mean; rows up to max_freq_Hz (all bins if unset).
void write_spectrum_csv(std::ostream& os, const Spectrum& s, std::optional<double> max_freq_Hz = std::nullopt);

struct ReportMeta {
    std::optional<int> subject;
    std::optional<int> run_index;
    std::optional<ConditionId> condition;
    std::optional<std::string> source;
};

ReportMeta meta_of(const RunRecord& run);

/// The per-run statistics block, one "label : value unit" line per field.
std::string render_report(const PerRunStats& stats, const ReportMeta& meta = {});

/// Fixed-point with round-half-to-even on the binary value.
std::string format_fixed(double value, int decimals);
/// Scientific notation with two decimals ("4.43e-09").
std::string format_sci(double value);

}  // namespace stillness
