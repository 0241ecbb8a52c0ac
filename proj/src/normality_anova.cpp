#include "stillness/normality_anova.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace stillness {

namespace {

// Evaluates c[0] + c[1] x + ... + c[N-1] x^(N-1).
template <std::size_t N>
double poly(const double (&c)[N], double x) {
    double r = 0.0;
    for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
    return r;
}

double normal_upper_tail(double x, double mean, double sd) {
    return 0.5 * std::erfc((x - mean) / (sd * std::numbers::sqrt2));
}

/// Antisymmetric weights a[0..n-1] for the ordered sample, with sum a^2 = 1.
std::vector<double> sw_coefficients(std::size_t n) {
    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};

    const std::size_t half = n / 2;
    std::vector<double> upper(half);  // weights for the largest order statistics
    if (n == 3) {
        upper[0] = std::sqrt(0.5);
    } else {
        const boost::math::normal standard;
        const double an25 = static_cast<double>(n) + 0.25;
        std::vector<double> m(half);
        double summ2 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            m[i] = boost::math::quantile(standard, (static_cast<double>(i + 1) - 0.375) / an25);
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
        const double a1 = poly(c1, rsn) - m[0] / ssumm2;

        std::size_t first_scaled = 1;
        double fac = 0.0;
        if (n > 5) {
            first_scaled = 2;
            const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            upper[1] = a2;
        } else {
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        }
        upper[0] = a1;
        for (std::size_t i = first_scaled; i < half; ++i) upper[i] = -m[i] / fac;
    }

    std::vector<double> a(n, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        a[n - 1 - i] = upper[i];
        a[i] = -upper[i];
    }
    return a;
}

double sw_p_value(double w, std::size_t n) {
    static constexpr double g[] = {-2.273, 0.4511};
    static constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};

    const double an = static_cast<double>(n);
    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        return std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    }
    double y = std::log1p(-w);
    double mean = 0.0;
    double sd = 1.0;
    if (n <= 11) {
        const double gamma = poly(g, an);
        if (y >= gamma) return 1e-99;
        y = -std::log(gamma - y);
        mean = poly(c3, an);
        sd = std::exp(poly(c4, an));
    } else {
        const double xx = std::log(an);
        mean = poly(c5, xx);
        sd = std::exp(poly(c6, xx));
    }
    return normal_upper_tail(y, mean, sd);
}

}  // namespace

AmplitudeTable::AmplitudeTable(std::vector<NamedGroup> groups) : groups_(std::move(groups)) {
    std::set<std::string> seen;
    for (const auto& g : groups_) {
        ConditionId::parse_table_name(g.name);
        if (!seen.insert(g.name).second) throw Error("duplicate group \"" + g.name + "\"");
        if (g.values.size() != kRunsPerCondition) {
            throw Error("group " + g.name + ": expected " + std::to_string(kRunsPerCondition) + " values, got " +
                        std::to_string(g.values.size()));
        }
        for (double v : g.values) {
            if (!(v > 0.0)) throw Error("group " + g.name + ": travel amplitudes must be positive");
        }
    }
    if (groups_.size() != ConditionId::all().size()) {
        throw Error("expected 12 condition groups, got " + std::to_string(groups_.size()));
    }
}

const NamedGroup& AmplitudeTable::group(ConditionId c) const {
    const auto name = c.table_name();
    const auto it = std::find_if(groups_.begin(), groups_.end(), [&](const NamedGroup& g) { return g.name == name; });
    if (it == groups_.end()) throw Error("no group " + name);
    return *it;
}

std::vector<NamedGroup> AmplitudeTable::musical_subset(int m) const {
    std::vector<NamedGroup> out;
    for (int n = 0; n < ConditionId::kHapticCount; ++n) out.push_back(group(ConditionId(n, m)));
    return out;
}

SwResult shapiro_wilk(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) throw Error("Shapiro-Wilk test needs at least 3 values");
    if (n > 5000) throw Error("Shapiro-Wilk test supports at most 5000 values");

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double range = sorted.back() - sorted.front();
    if (!(range > 1e-19 * std::max(1.0, std::abs(sorted.back())))) {
        throw Error("Shapiro-Wilk test: all values are identical");
    }

    const auto a = sw_coefficients(n);
    // W is the squared correlation between the weights and the ordered sample.
    double a_mean = 0.0, x_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sorted[i] /= range;
        a_mean += a[i];
        x_mean += sorted[i];
    }
    a_mean /= static_cast<double>(n);
    x_mean /= static_cast<double>(n);
    double saa = 0.0, sxx = 0.0, sax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - a_mean;
        const double dx = sorted[i] - x_mean;
        saa += da * da;
        sxx += dx * dx;
        sax += da * dx;
    }
    const double root = std::sqrt(saa * sxx);
    const double w1 = (root - sax) * (root + sax) / (saa * sxx);

    SwResult r;
    r.w = 1.0 - w1;
    r.p = std::clamp(sw_p_value(r.w, n), 0.0, 1.0);
    return r;
}

GroupSummary group_summary(std::span<const double> x) {
    if (x.size() < 2) throw Error("group summary needs at least 2 values");
    GroupSummary s;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    s.min = *lo;
    s.max = *hi;
    double sum = 0.0;
    for (double v : x) sum += v;
    s.mean = sum / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(x.size() - 1));
    return s;
}

AnovaResult one_way_anova(std::span<const NamedGroup> groups) {
    if (groups.size() < 2) throw Error("ANOVA needs at least 2 groups");
    std::size_t total = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.values.size() < 2) throw Error("ANOVA group " + g.name + " needs at least 2 values");
    }
    // work relative to one observation so constant data gives exact zeros
    const double ref = groups.front().values.front();
    for (const auto& g : groups) {
        total += g.values.size();
        for (double v : g.values) grand_sum += v - ref;
    }
    const double grand_mean = grand_sum / static_cast<double>(total);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        double sum = 0.0;
        for (double v : g.values) sum += v - ref;
        const double mean = sum / static_cast<double>(g.values.size());
        ss_between += static_cast<double>(g.values.size()) * (mean - grand_mean) * (mean - grand_mean);
        for (double v : g.values) ss_within += (v - ref - mean) * (v - ref - mean);
    }

    AnovaResult r;
    r.df_between = static_cast<int>(groups.size()) - 1;
    r.df_within = static_cast<int>(total - groups.size());
    if (!(ss_within > 0.0)) {
        if (!(ss_between > 0.0)) throw Error("ANOVA undefined: no variance within or between groups");
        r.f_stat = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.f_stat = (ss_between / r.df_between) / (ss_within / r.df_within);
    const boost::math::fisher_f dist(r.df_between, r.df_within);
    r.p = boost::math::cdf(boost::math::complement(dist, r.f_stat));
    return r;
}

AnovaOutcome anova_gate(std::span<const NamedGroup> groups, double alpha) {
    if (groups.size() < 2) throw Error("ANOVA gate needs at least 2 groups");
    AnovaRefusal refusal;
    for (const auto& g : groups) {
        if (g.values.size() < 3) throw Error("ANOVA gate group " + g.name + " needs at least 3 values");
        const auto sw = shapiro_wilk(g.values);
        if (sw.p < alpha) refusal.failing_groups.push_back({g.name, sw.p});
    }
    if (!refusal.failing_groups.empty()) return refusal;
    return one_way_anova(groups);
}

}  // namespace stillness
