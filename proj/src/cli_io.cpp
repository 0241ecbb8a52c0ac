#include "stillness/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace stillness {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
    s = trim(s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Comma-separated when the line has a comma, otherwise whitespace-separated.
std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    if (line.find(',') != std::string_view::npos) {
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(trim(line.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        // a trailing separator does not open a new cell
        if (!cells.empty() && cells.back().empty()) cells.pop_back();
        return cells;
    }
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        if (pos > start) cells.push_back(line.substr(start, pos - start));
    }
    return cells;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string format_sci(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", value);
    return buf;
}

void write_run_csv(std::ostream& os, const RunRecord& run, const SamplingSpec& sampling) {
    os << "# condition=" << run.condition().to_string() << '\n';
    if (run.subject) os << "# subject=" << *run.subject << '\n';
    if (run.run_index) os << "# run=" << *run.run_index << '\n';
    if (run.seed) os << "# seed=" << *run.seed << '\n';
    os << kRunCsvHeader << '\n';
    const double rate = sampling.position_rate_Hz;
    for (std::size_t i = 0; i < run.size(); ++i) {
        os << g17(static_cast<double>(i) / rate) << ',' << g17(run.z_mm()[i]) << ',' << g17(run.v_mm_s()[i]) << ','
           << g17(run.f_target_N()[i]) << '\n';
    }
}

RunRecord read_run_csv(std::istream& is, const SamplingSpec& sampling) {
    std::optional<ConditionId> condition;
    std::optional<int> subject, run_index;
    std::optional<std::uint64_t> seed;
    std::vector<double> z, v, f;
    const std::size_t expected = sampling.samples_per_run();
    const double rate = sampling.position_rate_Hz;
    z.reserve(expected);
    v.reserve(expected);
    f.reserve(expected);

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        const auto t = trim(line);
        if (!header_seen) {
            if (t.empty()) continue;
            if (t.front() == '#') {
                const auto body = trim(t.substr(1));
                const auto eq = body.find('=');
                if (eq == std::string_view::npos) continue;
                const auto key = trim(body.substr(0, eq));
                const auto value = trim(body.substr(eq + 1));
                try {
                    if (key == "condition") {
                        condition = ConditionId::parse(value);
                    } else if (key == "subject") {
                        subject = to_int<int>(value);
                        if (!subject) throw Error("invalid subject");
                    } else if (key == "run") {
                        run_index = to_int<int>(value);
                        if (!run_index) throw Error("invalid run");
                    } else if (key == "seed") {
                        seed = to_int<std::uint64_t>(value);
                        if (!seed) throw Error("invalid seed");
                    }
                } catch (const Error& e) {
                    throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no, 0);
                }
                continue;
            }
            if (t != kRunCsvHeader) {
                throw ParseError("line " + std::to_string(line_no) + ": expected header \"" +
                                     std::string(kRunCsvHeader) + "\"",
                                 line_no, 0);
            }
            header_seen = true;
            continue;
        }
        if (t.empty()) continue;
        const auto cells = split_cells(t);
        if (cells.size() != 4) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 cells, got " +
                                 std::to_string(cells.size()),
                             line_no, 0);
        }
        double row[4];
        for (std::size_t c = 0; c < 4; ++c) {
            const auto val = to_double(cells[c]);
            if (!val) {
                throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                     ": non-numeric cell \"" + std::string(cells[c]) + "\"",
                                 line_no, c + 1);
            }
            row[c] = *val;
        }
        const double t_expected = static_cast<double>(z.size()) / rate;
        if (std::abs(row[0] - t_expected) > 1e-9) {
            throw ParseError("line " + std::to_string(line_no) + ": time " + g17(row[0]) + " s off the 1/" +
                                 std::to_string(sampling.position_rate_Hz) + " s grid",
                             line_no, 1);
        }
        z.push_back(row[1]);
        v.push_back(row[2]);
        f.push_back(row[3]);
    }
    if (!header_seen) throw ParseError("no header", 0, 0);
    if (!condition) throw ParseError("missing \"# condition=n,m\" metadata", 0, 0);
    if (z.size() != expected) {
        throw ParseError("expected " + std::to_string(expected) + " rows, got " + std::to_string(z.size()), 0, 0);
    }
    RunRecord run(*condition, std::move(z), std::move(v), std::move(f));
    run.subject = subject;
    run.run_index = run_index;
    run.seed = seed;
    return run;
}

void write_run_csv_file(const std::string& path, const RunRecord& run, const SamplingSpec& sampling) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_run_csv(os, run, sampling);
    if (!os) throw Error("failed writing " + path);
}

RunRecord read_run_csv_file(const std::string& path, const SamplingSpec& sampling) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    try {
        return read_run_csv(is, sampling);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.row(), e.col());
    }
}

AmplitudeTable parse_amplitude_table(std::istream& is) {
    constexpr std::size_t kColumns = 12;
    std::string line;
    std::size_t line_no = 0;
    std::vector<NamedGroup> groups;
    std::set<std::string> seen;

    while (std::getline(is, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError("no header", 0, 0);

    const auto header = split_cells(trim(line));
    if (header.size() != kColumns) {
        throw ParseError("header: expected 12 columns, got " + std::to_string(header.size()), line_no, 0);
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name(trim(header[c]));
        try {
            ConditionId::parse_table_name(name);
        } catch (const Error& e) {
            throw ParseError(std::string("header, column ") + std::to_string(c + 1) + ": " + e.what(), line_no, c + 1);
        }
        if (!seen.insert(name).second) {
            throw ParseError("header, column " + std::to_string(c + 1) + ": duplicate column " + name, line_no, c + 1);
        }
        groups.push_back({name, {}});
    }

    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        ++rows;
        const auto cells = split_cells(t);
        if (cells.size() != kColumns) {
            throw ParseError("row " + std::to_string(rows) + ": expected 12 cells, got " + std::to_string(cells.size()),
                             line_no, 0);
        }
        for (std::size_t c = 0; c < kColumns; ++c) {
            const auto val = to_double(cells[c]);
            if (!val) {
                throw ParseError("row " + std::to_string(rows) + ", column " + std::to_string(c + 1) +
                                     ": non-numeric cell \"" + std::string(trim(cells[c])) + "\"",
                                 line_no, c + 1);
            }
            groups[c].values.push_back(*val);
        }
    }
    if (rows != AmplitudeTable::kRunsPerCondition) {
        throw ParseError("expected 24 rows, got " + std::to_string(rows), line_no, 0);
    }
    return AmplitudeTable(std::move(groups));
}

AmplitudeTable parse_amplitude_table_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    try {
        return parse_amplitude_table(is);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.row(), e.col());
    }
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s, std::optional<double> max_freq_Hz) {
    os << "freq_hz,pp_mm\n";
    os << "0," << g17(s.mean_mm) << '\n';
    for (std::size_t k = 1; k < s.pp_mm.size(); ++k) {
        const double f = s.freq_Hz(k);
        if (max_freq_Hz && f > *max_freq_Hz + 1e-9 * s.df_Hz) break;
        os << g17(f) << ',' << g17(s.pp_mm[k]) << '\n';
    }
}

ReportMeta meta_of(const RunRecord& run) {
    ReportMeta meta;
    meta.subject = run.subject;
    meta.run_index = run.run_index;
    meta.condition = run.condition();
    return meta;
}

std::string render_report(const PerRunStats& stats, const ReportMeta& meta) {
    std::ostringstream os;
    std::string header;
    const auto append = [&header](const std::string& part) {
        if (!header.empty()) header += " - ";
        header += part;
    };
    if (meta.subject) append("SUBJECT " + std::to_string(*meta.subject));
    if (meta.run_index) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d", *meta.run_index);
        append(std::string("RUN ") + buf);
    }
    if (meta.condition) append("CONDITION " + meta.condition->to_string());
    if (!header.empty()) os << header << '\n';
    if (meta.source) os << *meta.source << '\n';

    os << "z_min : " << format_fixed(stats.z_min_mm, 2) << " mm\n";
    os << "z_max : " << format_fixed(stats.z_max_mm, 2) << " mm\n";
    os << "z_travel_amplitude : " << format_fixed(stats.z_travel_amplitude_mm, 2) << " mm\n";
    os << "avg_abs_z_travel : " << format_fixed(stats.avg_abs_z_travel_mm_s, 2) << " mm/s\n";
    os << "z_jarque-bera_jb : " << (stats.jb_stat ? format_fixed(*stats.jb_stat, 2) : "n/a") << '\n';
    os << "z_jarque-bera_p : " << (stats.jb_p ? format_sci(*stats.jb_p) : "n/a") << '\n';
    os << "z_lin_mod_est_slope: " << format_fixed(stats.lin_slope_mm_s, 2) << " mm/s\n";
    os << "z_lin_mod_adj_R² : " << format_fixed(stats.lin_adj_r2_pct, 0) << " %\n";
    os << "z_poly40_mod_adj_R²: " << format_fixed(stats.poly40_adj_r2_pct, 0) << " %\n";
    os << "z_dft_ampl_thresh : " << format_fixed(stats.dft_ampl_thresh_mm, 3) << " mm\n";
    os << ">=threshold_maxfreq: " << format_fixed(stats.threshold_maxfreq_Hz, 2) << " Hz\n";
    return os.str();
}

}  // namespace stillness
