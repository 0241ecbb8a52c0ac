#include "stillness/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stillness/cli_io.hpp"
#include "stillness/haptic_sim.hpp"
#include "stillness/normality_anova.hpp"
#include "stillness/signal_stats.hpp"
#include "stillness/spectral.hpp"

namespace stillness {

namespace {

struct SimulateOptions {
    std::string condition;
    std::uint64_t seed = 1;
    int runs = 1;
    std::string out_dir;
    double noise_scale = 1.0;
    bool no_drift = false;
    bool latency = false;
    bool quantize = false;
    bool sensor_noise = false;
};

struct AnalyzeOptions {
    std::vector<std::string> files;
    bool report = false;
    bool spectrum_csv = false;
    double max_freq_Hz = 50.0;
};

struct CompareOptions {
    std::string table;
    std::optional<int> musical;
    double alpha = kDefaultAlpha;
};

struct FitOptions {
    std::vector<std::string> files;
    std::string band = "0.25:30";
    std::string spectrum_out;
};

struct HistOptions {
    std::string table;
    std::string conditions = "00,01";
    double bin_mm = kDefaultHistogramBin_mm;
};

void cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    if (o.runs < 1) throw Error("--runs must be at least 1");
    SimConfig cfg;
    cfg.condition = ConditionId::parse(o.condition);
    cfg.noise_scale = o.noise_scale;
    cfg.drift_enabled = !o.no_drift;
    cfg.emulate_latency = o.latency;
    cfg.emulate_force_quantization = o.quantize;
    cfg.emulate_sensor_noise = o.sensor_noise;

    std::filesystem::create_directories(o.out_dir);
    for (int k = 0; k < o.runs; ++k) {
        cfg.seed = o.seed + static_cast<std::uint64_t>(k);
        auto run = simulate_run(cfg);
        run.run_index = k + 1;
        const auto name = "sim_c" + std::to_string(cfg.condition.haptic()) + std::to_string(cfg.condition.musical()) +
                          "_seed" + std::to_string(cfg.seed) + ".csv";
        const auto path = (std::filesystem::path(o.out_dir) / name).string();
        write_run_csv_file(path, run, cfg.sampling);
        out << path << '\n';
    }
}

void cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
    const bool report = o.report || !o.spectrum_csv;
    // Parse and analyze everything before printing so a bad file yields no partial output.
    std::vector<std::string> blocks;
    for (const auto& file : o.files) {
        const auto run = read_run_csv_file(file);
        const auto stats = per_run_stats(run);
        std::ostringstream block;
        if (report) {
            auto meta = meta_of(run);
            meta.source = std::filesystem::path(file).filename().string();
            block << render_report(stats, meta);
        }
        if (o.spectrum_csv) write_spectrum_csv(block, stats.spectrum, o.max_freq_Hz);
        blocks.push_back(block.str());
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) out << '\n';
        out << blocks[i];
    }
}

void print_gate(const AnovaOutcome& outcome, double alpha, std::ostream& out) {
    if (const auto* refusal = std::get_if<AnovaRefusal>(&outcome)) {
        out << "ANOVA refused: Shapiro-Wilk p < " << format_fixed(alpha, 3) << " in "
            << refusal->failing_groups.size() << " group(s):";
        for (const auto& g : refusal->failing_groups) out << ' ' << g.name << " (p=" << format_fixed(g.p, 3) << ')';
        out << '\n';
        return;
    }
    const auto& r = std::get<AnovaResult>(outcome);
    out << "ANOVA F(" << r.df_between << ", " << r.df_within << ") = " << format_fixed(r.f_stat, 3)
        << ", p = " << format_fixed(r.p, 3) << '\n';
}

void cmd_compare(const CompareOptions& o, std::ostream& out) {
    const auto table = parse_amplitude_table_file(o.table);
    std::vector<int> modes;
    if (o.musical) {
        modes.push_back(*o.musical);
    } else {
        modes = {0, 1};
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const int m = modes[i];
        if (i > 0) out << '\n';
        out << "musical " << m << " (" << condition_label(ConditionId(0, m)).second << ")\n";
        out << "condition    min   max   mean  std\n";
        const auto groups = table.musical_subset(m);
        for (const auto& g : groups) {
            const auto s = group_summary(g.values);
            out << g.name << "  " << format_fixed(s.min, 2) << "  " << format_fixed(s.max, 2) << "  "
                << format_fixed(s.mean, 2) << "  " << format_fixed(s.std, 2) << '\n';
        }
        print_gate(anova_gate(groups, o.alpha), o.alpha, out);
    }
}

void cmd_swtest(const std::string& path, std::ostream& out) {
    const auto table = parse_amplitude_table_file(path);
    for (const auto& g : table.groups()) {
        const auto r = shapiro_wilk(g.values);
        out << g.name << ' ' << format_fixed(r.w, 3) << ' ' << format_fixed(r.p, 3) << '\n';
    }
}

std::pair<double, double> parse_band(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error("--band must be LO:HI");
    try {
        std::size_t used = 0;
        const double lo = std::stod(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("lo");
        const auto hi_text = text.substr(colon + 1);
        const double hi = std::stod(hi_text, &used);
        if (used != hi_text.size()) throw std::invalid_argument("hi");
        if (!(lo > 0.0) || !(lo < hi)) throw Error("--band must satisfy 0 < LO < HI");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw Error("--band must be LO:HI with numeric bounds");
    }
}

void cmd_fit(const FitOptions& o, std::ostream& out) {
    const auto [lo, hi] = parse_band(o.band);
    std::vector<Spectrum> spectra;
    for (const auto& file : o.files) {
        const auto run = read_run_csv_file(file);
        spectra.push_back(dft_pp(run.z_mm(), SamplingSpec{}.position_rate_Hz));
    }
    const auto avg = average_spectra(spectra);
    const double c = fit_one_over_f(avg, lo, hi);
    double above = 0.0;
    for (std::size_t k = 1; k < avg.pp_mm.size(); ++k) {
        if (avg.freq_Hz(k) > hi + 1e-9 * avg.df_Hz) above = std::max(above, avg.pp_mm[k]);
    }
    if (!o.spectrum_out.empty()) {
        std::ofstream os(o.spectrum_out);
        if (!os) throw Error("cannot open " + o.spectrum_out + " for writing");
        write_spectrum_csv(os, avg, 50.0);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5f", c);
    out << "runs: " << spectra.size() << '\n';
    out << "band: " << format_fixed(lo, 2) << ':' << format_fixed(hi, 2) << " Hz\n";
    out << "c: " << buf << " mm*Hz\n";
    out << "max pp above band: " << format_fixed(above, 4) << " mm\n";
}

void cmd_hist(const HistOptions& o, std::ostream& out) {
    const auto table = parse_amplitude_table_file(o.table);
    std::vector<double> values;
    std::stringstream list(o.conditions);
    std::string item;
    while (std::getline(list, item, ',')) {
        if (item.empty()) continue;
        const auto c = ConditionId::parse_table_name("condition" + item);
        const auto& g = table.group(c);
        values.insert(values.end(), g.values.begin(), g.values.end());
    }
    if (values.empty()) throw Error("--conditions selected no groups");
    const auto h = amplitude_histogram(values, o.bin_mm);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out << "values: " << values.size() << '\n';
    out << "range: " << format_fixed(*lo, 2) << " - " << format_fixed(*hi, 2) << " mm\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out << '[' << format_fixed(h.lower_edge(i), 2) << ", " << format_fixed(h.lower_edge(i + 1), 2)
            << "): " << h.counts[i] << '\n';
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fingertip stillness-movement simulation and analysis"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate runs and write run CSV files");
    simulate->add_option("--condition", sim.condition, "Condition n,m")->required();
    simulate->add_option("--seed", sim.seed, "Seed of the first run")->required();
    simulate->add_option("--runs", sim.runs, "Number of runs (seeds seed, seed+1, ...)");
    simulate->add_option("--out", sim.out_dir, "Output directory")->required();
    simulate->add_option("--noise-scale", sim.noise_scale, "Tremor reference scale");
    simulate->add_flag("--no-drift", sim.no_drift, "Disable the drift component");
    simulate->add_flag("--latency", sim.latency, "Emulate the 4 ms force latency");
    simulate->add_flag("--quantize", sim.quantize, "Emulate the 0.003 N force resolution");
    simulate->add_flag("--sensor-noise", sim.sensor_noise, "Emulate position sensor noise");

    AnalyzeOptions ana;
    auto* analyze = app.add_subcommand("analyze", "Print the statistics block of each run file");
    analyze->add_option("files", ana.files, "Run CSV files")->required();
    analyze->add_flag("--report", ana.report, "Print the statistics block (default)");
    analyze->add_flag("--spectrum-csv", ana.spectrum_csv, "Print the DFT as CSV");
    analyze->add_option("--max-freq", ana.max_freq_Hz, "Highest frequency in spectrum CSV output (Hz)");

    CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "Group summaries and the ANOVA normality gate");
    compare->add_option("table", cmp.table, "Travel-amplitude table CSV")->required();
    compare->add_option("--musical", cmp.musical, "Musical index 0 or 1 (both if omitted)")->check(CLI::Range(0, 1));
    compare->add_option("--alpha", cmp.alpha, "Shapiro-Wilk significance level");

    std::string sw_table;
    auto* swtest = app.add_subcommand("swtest", "Shapiro-Wilk W and p for every condition");
    swtest->add_option("table", sw_table, "Travel-amplitude table CSV")->required();

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit-spectrum", "Average run spectra and fit c/f");
    fit_cmd->add_option("files", fit.files, "Run CSV files")->required();
    fit_cmd->add_option("--band", fit.band, "Fit band LO:HI in Hz");
    fit_cmd->add_option("--spectrum-out", fit.spectrum_out, "Write the averaged spectrum CSV here");

    HistOptions hist;
    auto* hist_cmd = app.add_subcommand("hist", "Histogram of travel amplitudes");
    hist_cmd->add_option("table", hist.table, "Travel-amplitude table CSV")->required();
    hist_cmd->add_option("--conditions", hist.conditions, "Comma-separated nm codes, e.g. 00,01");
    hist_cmd->add_option("--bin", hist.bin_mm, "Bin width in mm");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed()) cmd_simulate(sim, out);
        else if (analyze->parsed()) cmd_analyze(ana, out);
        else if (compare->parsed()) cmd_compare(cmp, out);
        else if (swtest->parsed()) cmd_swtest(sw_table, out);
        else if (fit_cmd->parsed()) cmd_fit(fit, out);
        else if (hist_cmd->parsed()) cmd_hist(hist, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace stillness
