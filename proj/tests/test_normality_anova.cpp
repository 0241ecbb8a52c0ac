#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stillness/cli_io.hpp"
#include "stillness/normality_anova.hpp"

using namespace stillness;

namespace {

const AmplitudeTable& reference_table() {
    static const AmplitudeTable t = parse_amplitude_table_file(STILLNESS_TEST_DATA "/travel_amplitudes.csv");
    return t;
}

struct Expected {
    const char* name;
    double w;
    double p;
};

// Three-decimal W and p as printed under the amplitude table.
constexpr Expected kExpected[] = {
    {"condition00", 0.954, 0.333}, {"condition10", 0.879, 0.008}, {"condition20", 0.949, 0.255},
    {"condition30", 0.821, 0.001}, {"condition40", 0.895, 0.017}, {"condition50", 0.903, 0.025},
    {"condition01", 0.874, 0.006}, {"condition11", 0.916, 0.049}, {"condition21", 0.926, 0.080},
    {"condition31", 0.913, 0.041}, {"condition41", 0.971, 0.703}, {"condition51", 0.796, 0.000},
};

const NamedGroup& named(const std::string& name) {
    for (const auto& g : reference_table().groups()) {
        if (g.name == name) return g;
    }
    throw std::runtime_error("no group " + name);
}

std::set<std::string> refused(const AnovaOutcome& o) {
    std::set<std::string> out;
    if (const auto* r = std::get_if<AnovaRefusal>(&o)) {
        for (const auto& f : r->failing_groups) out.insert(f.name);
    }
    return out;
}

}  // namespace

TEST_CASE("Shapiro-Wilk reproduces the reference values") {
    for (const auto& row : kExpected) {
        CAPTURE(row.name);
        const auto r = shapiro_wilk(named(row.name).values);
        CHECK(std::abs(r.w - row.w) <= 0.002);
        if (row.p == 0.0) {
            CHECK(r.p < 0.0005);
        } else {
            CHECK(std::abs(r.p - row.p) <= 0.01);
        }
        CHECK(r.w > 0.0);
        CHECK(r.w <= 1.0);
    }
}

TEST_CASE("Shapiro-Wilk is affine invariant") {
    const auto& x = named("condition20").values;
    const double w0 = shapiro_wilk(x).w;
    for (const auto [a, b] : {std::pair{2.0, 0.0}, std::pair{0.01, 3.0}, std::pair{17.5, -40.0}}) {
        std::vector<double> y(x.size());
        std::transform(x.begin(), x.end(), y.begin(), [a, b](double v) { return a * v + b; });
        CHECK(std::abs(shapiro_wilk(y).w - w0) < 1e-10);
    }
}

TEST_CASE("Shapiro-Wilk on Gaussian and skewed samples") {
    int rejected_normal = 0;
    int rejected_exp = 0;
    for (unsigned seed = 0; seed < 200; ++seed) {
        const auto g = oracle::gaussian(50, seed);
        if (shapiro_wilk(g).p < 0.05) ++rejected_normal;
        std::mt19937_64 rng(seed);
        std::exponential_distribution<double> e(1.0);
        std::vector<double> x(50);
        for (auto& v : x) v = e(rng);
        if (shapiro_wilk(x).p < 0.05) ++rejected_exp;
    }
    CHECK(rejected_normal < 20);  // nominal 10 of 200
    CHECK(rejected_exp > 180);
}

TEST_CASE("Shapiro-Wilk small samples and errors") {
    const std::vector<double> three{1.0, 2.0, 4.0};
    const auto r = shapiro_wilk(three);
    CHECK(r.w == doctest::Approx(0.9642857).epsilon(1e-6));
    CHECK(r.p == doctest::Approx(0.6368).epsilon(1e-3));

    const std::vector<double> even{1.0, 2.0, 3.0};
    CHECK(shapiro_wilk(even).w == doctest::Approx(1.0));

    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>{1.0, 2.0}), Error);
    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(10, 0.5)), Error);
    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(5001, 0.5)), Error);
}

TEST_CASE("group summaries") {
    const auto ones = group_summary(std::vector<double>{1.0, 1.0, 1.0});
    CHECK(ones.min == 1.0);
    CHECK(ones.max == 1.0);
    CHECK(ones.mean == 1.0);
    CHECK(ones.std == 0.0);

    const auto pair = group_summary(std::vector<double>{0.0, 2.0});
    CHECK(pair.mean == 1.0);
    CHECK(pair.std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // direct formulas over the 24 table values, computed before the build
    const auto c00 = group_summary(named("condition00").values);
    CHECK(c00.min == 0.27);
    CHECK(c00.max == 2.89);
    CHECK(c00.mean == doctest::Approx(1.3683333333).epsilon(1e-9));
    CHECK(c00.std == doctest::Approx(0.7477831973).epsilon(1e-9));

    CHECK_THROWS_AS(group_summary(std::vector<double>{1.0}), Error);
}

TEST_CASE("reference means keep their ordering") {
    const auto mean = [](const char* name) { return group_summary(named(name).values).mean; };
    CHECK(mean("condition10") == doctest::Approx(1.0045833333).epsilon(1e-9));
    CHECK(mean("condition30") == doctest::Approx(1.0304166667).epsilon(1e-9));
    CHECK(mean("condition01") == doctest::Approx(1.22875).epsilon(1e-9));
    CHECK(mean("condition11") == doctest::Approx(0.9225).epsilon(1e-9));
    CHECK(mean("condition31") == doctest::Approx(0.8229166667).epsilon(1e-9));
    CHECK(mean("condition10") < mean("condition00"));
    CHECK(mean("condition30") < mean("condition00"));
    CHECK(mean("condition11") < mean("condition01"));
    CHECK(mean("condition31") < mean("condition01"));
}

TEST_CASE("ANOVA gate refuses the reference groups") {
    CHECK(refused(anova_gate(reference_table().musical_subset(0))) ==
          std::set<std::string>{"condition10", "condition30", "condition40", "condition50"});
    CHECK(refused(anova_gate(reference_table().musical_subset(1))) ==
          std::set<std::string>{"condition01", "condition11", "condition31", "condition51"});
}

TEST_CASE("refusal set is exactly the groups below alpha and grows with alpha") {
    const auto groups = reference_table().groups();
    std::set<std::string> prev;
    for (double alpha : {0.0001, 0.001, 0.01, 0.03, 0.05, 0.1, 0.3, 0.5, 0.8}) {
        CAPTURE(alpha);
        std::set<std::string> expected;
        for (const auto& g : groups) {
            if (shapiro_wilk(g.values).p < alpha) expected.insert(g.name);
        }
        const auto got = refused(anova_gate(groups, alpha));
        CHECK(got == expected);
        CHECK(std::includes(got.begin(), got.end(), prev.begin(), prev.end()));
        prev = got;
    }
}

TEST_CASE("Gaussian groups pass the gate") {
    int passed = 0;
    for (unsigned seed = 0; seed < 20; ++seed) {
        std::vector<NamedGroup> groups;
        for (unsigned g = 0; g < 6; ++g) {
            auto v = oracle::gaussian(24, 100 * seed + g, 0.3);
            for (auto& x : v) x += 1.2;
            groups.push_back({"g" + std::to_string(g), v});
        }
        const auto out = anova_gate(groups, 0.001);
        if (const auto* r = std::get_if<AnovaResult>(&out)) {
            ++passed;
            CHECK(r->df_between == 5);
            CHECK(r->df_within == 138);
        }
    }
    CHECK(passed >= 19);
}

TEST_CASE("one-way ANOVA against the textbook decomposition") {
    const std::vector<NamedGroup> groups{
        {"a", {2.0, 3.0, 1.5, 4.0}}, {"b", {5.0, 6.5, 4.0, 5.5}}, {"c", {3.0, 2.0, 3.5, 2.5}}};
    long double grand = 0.0L;
    for (const auto& g : groups) {
        for (double v : g.values) grand += v;
    }
    grand /= 12.0L;
    long double ssb = 0.0L, ssw = 0.0L;
    for (const auto& g : groups) {
        long double m = 0.0L;
        for (double v : g.values) m += v;
        m /= 4.0L;
        ssb += 4.0L * (m - grand) * (m - grand);
        for (double v : g.values) ssw += (v - m) * (v - m);
    }
    const double f = static_cast<double>((ssb / 2.0L) / (ssw / 9.0L));

    const auto r = one_way_anova(groups);
    CHECK(r.df_between == 2);
    CHECK(r.df_within == 9);
    CHECK(std::abs(r.f_stat - f) < 1e-12 * f);
    // F(2, 9) survival has the closed form (1 + 2F/9)^(-9/2)
    CHECK(r.p == doctest::Approx(std::pow(1.0 + 2.0 * f / 9.0, -4.5)).epsilon(1e-10));

    std::vector<NamedGroup> shifted = groups;
    for (auto& g : shifted) {
        for (auto& v : g.values) v += 100.0;
    }
    CHECK(one_way_anova(shifted).f_stat == doctest::Approx(r.f_stat).epsilon(1e-9));
}

TEST_CASE("ANOVA limit cases") {
    const double c = 1.7;
    std::vector<NamedGroup> same{{"a", {c, c, c}}, {"b", {c, c, c}}, {"c", {c, c, c}}};
    CHECK_THROWS_AS(one_way_anova(same), Error);

    // the same tiny perturbation in every group: within variance but no between
    for (auto& g : same) g.values[2] = c + 1e-12;
    const auto flat = one_way_anova(same);
    CHECK(flat.f_stat < 1e-6);
    CHECK(flat.p > 0.999);

    double last = 0.0;
    for (double eps : {1e-1, 1e-3, 1e-5, 1e-7}) {
        const std::vector<NamedGroup> two{{"a", {0.0, 0.0, eps}}, {"b", {1.0, 1.0, 1.0 + eps}}};
        const auto r = one_way_anova(two);
        CHECK(r.f_stat > last);
        last = r.f_stat;
    }
    CHECK(last > 1e12);

    const std::vector<NamedGroup> split{{"a", {0.0, 0.0, 0.0}}, {"b", {1.0, 1.0, 1.0}}};
    const auto inf = one_way_anova(split);
    CHECK(inf.f_stat == std::numeric_limits<double>::infinity());
    CHECK(inf.p == 0.0);

    CHECK_THROWS_AS(one_way_anova(std::vector<NamedGroup>{{"a", {1.0, 2.0, 3.0}}}), Error);
}

TEST_CASE("amplitude table shape checks") {
    CHECK(reference_table().groups().size() == 12);
    CHECK(reference_table().group(ConditionId(0, 0)).values.front() == 1.33);
    const auto m1 = reference_table().musical_subset(1);
    REQUIRE(m1.size() == 6);
    CHECK(m1.front().name == "condition01");
    CHECK(m1.back().name == "condition51");

    auto groups = reference_table().groups();
    groups[3].values[5] = 0.0;
    CHECK_THROWS_AS(AmplitudeTable{groups}, Error);
    groups = reference_table().groups();
    groups[3].values.pop_back();
    CHECK_THROWS_AS(AmplitudeTable{groups}, Error);
    groups = reference_table().groups();
    groups[3].name = groups[2].name;
    CHECK_THROWS_AS(AmplitudeTable{groups}, Error);
}
