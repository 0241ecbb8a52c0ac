#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stillness/core_types.hpp"

namespace stillness {

struct NamedGroup {
    std::string name;
    std::vector<double> values;
};

/**
 * @brief The 12 x 24 table of travel amplitudes (mm), one group per condition.
 *
 * Groups are keyed by their table names ("condition00" ... "condition51") and
 * kept in input column order. Every group holds exactly 24 positive values.
 */
class AmplitudeTable {
public:
    static constexpr std::size_t kRunsPerCondition = 24;  // 8 subjects x 3 repeats

    explicit AmplitudeTable(std::vector<NamedGroup> groups);

    [[nodiscard]] const std::vector<NamedGroup>& groups() const noexcept { return groups_; }
    [[nodiscard]] const NamedGroup& group(ConditionId c) const;
    /// The six groups with musical index m, in n order.
    [[nodiscard]] std::vector<NamedGroup> musical_subset(int m) const;

private:
    std::vector<NamedGroup> groups_;
};

struct SwResult {
    double w = 0.0;
    double p = 0.0;
};

struct GroupSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation (n - 1)
};

struct AnovaResult {
    double f_stat = 0.0;
    double p = 0.0;
    int df_between = 0;
    int df_within = 0;
};

struct AnovaRefusal {
    struct Offender {
        std::string name;
        double p = 0.0;
    };
    std::vector<Offender> failing_groups;
};

using AnovaOutcome = std::variant<AnovaResult, AnovaRefusal>;

inline constexpr double kDefaultAlpha = 0.05;

/// Shapiro-Wilk W test, Royston's AS R94 approximation. Valid for 3 <= n <= 5000.
SwResult shapiro_wilk(std::span<const double> x);

GroupSummary group_summary(std::span<const double> x);

/// One-way ANOVA F test. Throws when both sums of squares vanish.
AnovaResult one_way_anova(std::span<const NamedGroup> groups);

/// Shapiro-Wilk on every group first; refuses if any group has p < alpha.
AnovaOutcome anova_gate(std::span<const NamedGroup> groups, double alpha = kDefaultAlpha);

}  // namespace stillness
