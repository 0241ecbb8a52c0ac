#include "stillness/core_types.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace stillness {

namespace {

constexpr std::array<std::string_view, ConditionId::kHapticCount> kHapticNames = {
    "zero force", "positive force", "negative force", "viscosity", "anti-viscosity", "positional markers"};
constexpr std::array<std::string_view, ConditionId::kMusicalCount> kMusicalNames = {
    "no musical control", "musical control"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int parse_index(std::string_view s, std::string_view whole) {
    s = trim(s);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error("invalid condition \"" + std::string(whole) + "\"");
    }
    return value;
}

}  // namespace

ConditionId::ConditionId(int n, int m) : n_(n), m_(m) {
    if (n < 0 || n >= kHapticCount || m < 0 || m >= kMusicalCount) {
        throw Error("condition index out of range: " + std::to_string(n) + "," + std::to_string(m));
    }
}

std::string ConditionId::to_string() const {
    return std::to_string(n_) + "," + std::to_string(m_);
}

std::string ConditionId::table_name() const {
    return "condition" + std::to_string(n_) + std::to_string(m_);
}

ConditionId ConditionId::parse(std::string_view text) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
        throw Error("invalid condition \"" + std::string(text) + "\" (expected n,m)");
    }
    return {parse_index(text.substr(0, comma), text), parse_index(text.substr(comma + 1), text)};
}

ConditionId ConditionId::parse_table_name(std::string_view text) {
    constexpr std::string_view prefix = "condition";
    const auto t = trim(text);
    if (t.size() != prefix.size() + 2 || t.substr(0, prefix.size()) != prefix) {
        throw Error("invalid condition column name \"" + std::string(text) + "\"");
    }
    const char n = t[prefix.size()];
    const char m = t[prefix.size() + 1];
    if (n < '0' || n > '9' || m < '0' || m > '9') {
        throw Error("invalid condition column name \"" + std::string(text) + "\"");
    }
    return {n - '0', m - '0'};
}

std::vector<ConditionId> ConditionId::all() {
    std::vector<ConditionId> out;
    out.reserve(kHapticCount * kMusicalCount);
    for (int m = 0; m < kMusicalCount; ++m) {
        for (int n = 0; n < kHapticCount; ++n) out.emplace_back(n, m);
    }
    return out;
}

std::pair<std::string_view, std::string_view> condition_label(ConditionId c) {
    return {kHapticNames[static_cast<std::size_t>(c.haptic())],
            kMusicalNames[static_cast<std::size_t>(c.musical())]};
}

void HapticParams::validate() const {
    if (!(marker_interval_mm > 0.0) || !(marker_gap_mm >= 0.0) || !(marker_gap_mm < marker_interval_mm)) {
        throw Error("marker gap must be smaller than the marker interval");
    }
    if (!(stim_height_mm > 0.0)) throw Error("stimulus height must be positive");
}

std::size_t SamplingSpec::samples_per_run() const {
    return static_cast<std::size_t>(std::llround(position_rate_Hz * run_duration_s));
}

int SamplingSpec::steps_per_command() const {
    return position_rate_Hz / force_rate_Hz;
}

void SamplingSpec::validate() const {
    if (position_rate_Hz <= 0 || force_rate_Hz <= 0 || position_rate_Hz % force_rate_Hz != 0) {
        throw Error("position rate must be a positive integer multiple of the force rate");
    }
    if (!(run_duration_s > 0.0)) throw Error("run duration must be positive");
    if (!(transducer_mass_kg > 0.0)) throw Error("transducer mass must be positive");
    if (latency_s < 0.0 || force_resolution_N < 0.0 || sensor_noise_pp_mm < 0.0) {
        throw Error("device non-idealities must be non-negative");
    }
}

RunRecord::RunRecord(ConditionId condition, std::vector<double> z_mm, std::vector<double> v_mm_s,
                     std::vector<double> f_target_N)
    : condition_(condition), z_mm_(std::move(z_mm)), v_mm_s_(std::move(v_mm_s)),
      f_target_N_(std::move(f_target_N)) {
    if (z_mm_.empty()) throw Error("run record is empty");
    if (z_mm_.size() != v_mm_s_.size() || z_mm_.size() != f_target_N_.size()) {
        throw Error("run record series lengths differ");
    }
    const HapticParams range;
    for (std::size_t i = 0; i < z_mm_.size(); ++i) {
        const double z = z_mm_[i];
        if (!(z >= range.stim_base_mm && z <= range.stim_top_mm())) {
            throw Error("z sample " + std::to_string(i) + " outside [0, 10] mm");
        }
    }
}

}  // namespace stillness
