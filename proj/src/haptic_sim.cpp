#include "stillness/haptic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace stillness {

namespace {

constexpr std::uint64_t kTremorStream = 1;
constexpr std::uint64_t kDriftStream = 2;
constexpr std::uint64_t kSensorStream = 3;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

void check_range(double z_mm, const HapticParams& p) {
    if (!(z_mm >= p.stim_base_mm && z_mm <= p.stim_top_mm())) {
        throw Error("z = " + std::to_string(z_mm) + " mm outside the stimulus range");
    }
}

std::vector<double> drift_walk(std::size_t n, double rate_Hz, const DriftParams& d, std::mt19937_64& rng) {
    double lower = d.lower_mm;
    double upper = d.upper_mm;
    if (std::bernoulli_distribution(0.5)(rng)) {
        lower = -d.upper_mm;
        upper = -d.lower_mm;
    }
    const double dt = 1.0 / rate_Hz;
    const double step = d.sigma_mm_per_sqrt_s * std::sqrt(dt);
    // one-pole low-pass on the increments, unity gain at DC
    const double alpha = -std::expm1(-2.0 * std::numbers::pi * d.corner_Hz * dt);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out(n);
    double x = 0.0;
    double inc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x;
        double excess = 0.0;
        if (x > upper) excess = x - upper;
        if (x < lower) excess = x - lower;
        inc += alpha * (step * gauss(rng) - inc);
        x += inc - d.restore_per_s * excess * dt;
    }
    return out;
}

// Exact propagation over dt of v' = a0 + beta v, z' = v, with a0 and beta constant.
struct StepWeights {
    double decay;   // exp(beta dt)
    double phi1;    // (exp(beta dt) - 1) / beta
    double phi2;    // (exp(beta dt) - 1 - beta dt) / beta^2
};

StepWeights step_weights(double beta, double dt) {
    const double x = beta * dt;
    StepWeights w;
    w.decay = std::exp(x);
    if (std::abs(x) < 1e-3) {
        w.phi1 = dt * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0);
        w.phi2 = dt * dt * (0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0);
    } else {
        w.phi1 = std::expm1(x) / beta;
        w.phi2 = (std::expm1(x) - x) / (beta * beta);
    }
    return w;
}

}  // namespace

std::optional<MarkerCell> marker_cell(double z_mm, const HapticParams& p) {
    const double rel = z_mm - p.stim_base_mm;
    if (rel < 0.0 || z_mm >= p.stim_top_mm()) return std::nullopt;
    const int cells = static_cast<int>(std::llround(p.stim_height_mm / p.marker_interval_mm));
    int i = static_cast<int>(std::floor(rel / p.marker_interval_mm));
    // floor can land one cell off when rel sits on a boundary
    if (i > 0 && p.stim_base_mm + i * p.marker_interval_mm > z_mm) --i;
    if (i + 1 < cells && p.stim_base_mm + (i + 1) * p.marker_interval_mm <= z_mm) ++i;
    if (i < 0 || i >= cells) return std::nullopt;

    MarkerCell cell;
    cell.index = i;
    cell.z_lo_mm = p.stim_base_mm + i * p.marker_interval_mm;
    cell.z_hi_mm = cell.z_lo_mm + (p.marker_interval_mm - p.marker_gap_mm);
    if (z_mm >= cell.z_hi_mm) return std::nullopt;
    cell.force_N = (i % 2 == 1) ? p.marker_ampl_N : -p.marker_ampl_N;
    return cell;
}

double condition_force(int n, double z_mm, double v_mm_s, const HapticParams& p) {
    check_range(z_mm, p);
    switch (n) {
        case 0: return 0.0;
        case 1: return p.pos_force_N;
        case 2: return p.neg_force_N;
        case 3: return p.viscosity_N_per_mm_per_s * v_mm_s;
        case 4: return p.anti_viscosity_N_per_mm_per_s * v_mm_s;
        case 5: {
            const auto cell = marker_cell(z_mm, p);
            return cell ? cell->force_N : 0.0;
        }
        default: throw Error("haptic index out of range: " + std::to_string(n));
    }
}

double marker_step_amplitude(const HapticParams& p) {
    return 2.0 * p.marker_ampl_N;
}

double pitch_of_z(double z_mm, const HapticParams& p) {
    if (z_mm < 0.0) throw Error("pitch mapping needs z >= 0");
    const double f = p.tone_base_Hz * std::exp2(p.semitones_per_mm * z_mm / 12.0);
    return std::min(f, p.tone_cap_Hz);
}

std::vector<double> generate_tremor(const OneOverFModel& model, std::uint64_t seed, double duration_s, double rate_Hz,
                                    bool drift_enabled, const DriftParams& drift) {
    if (!(duration_s > 0.0) || !(rate_Hz > 0.0)) throw Error("tremor duration and rate must be positive");
    model.validate();
    const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_Hz));
    if (n == 0) throw Error("tremor series would be empty");
    const double df = rate_Hz / static_cast<double>(n);

    std::vector<double> out(n, 0.0);
    auto rng = make_rng(seed, kTremorStream);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);

    const auto k_lo = static_cast<std::size_t>(std::max(1.0, std::ceil(model.band_lo_Hz / df - 1e-9)));
    const auto k_hi = static_cast<std::size_t>(std::floor(std::min(model.band_hi_Hz, rate_Hz / 2.0) / df + 1e-9));
    if (k_hi >= k_lo && model.c_mm_Hz > 0.0) {
        // Angles 2 pi k j / n come from one table indexed by (k j) mod n.
        std::vector<double> cos_t(n), sin_t(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
            cos_t[j] = std::cos(theta);
            sin_t[j] = std::sin(theta);
        }
        for (std::size_t k = k_lo; k <= k_hi; ++k) {
            const double amplitude = 0.5 * model.c_mm_Hz / (static_cast<double>(k) * df);
            const double phi = phase_dist(rng);
            const double ca = amplitude * std::cos(phi);
            const double sa = amplitude * std::sin(phi);
            std::size_t idx = 0;
            for (std::size_t j = 0; j < n; ++j) {
                out[j] += ca * cos_t[idx] - sa * sin_t[idx];
                idx += k;
                if (idx >= n) idx %= n;
            }
        }
    }

    if (drift_enabled) {
        auto drift_rng = make_rng(seed, kDriftStream);
        const auto walk = drift_walk(n, rate_Hz, drift, drift_rng);
        for (std::size_t j = 0; j < n; ++j) out[j] += walk[j];
    }

    double mean = 0.0;
    for (double v : out) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : out) v -= mean;
    return out;
}

void SimConfig::validate() const {
    haptics.validate();
    sampling.validate();
    model.validate();
    if (!(target_z_mm > haptics.stim_base_mm && target_z_mm < haptics.stim_top_mm())) {
        throw Error("target z must lie strictly inside the stimulus range");
    }
    if (controller_kp_N_per_mm < 0.0 || controller_kd_N_per_mm_per_s < 0.0) {
        throw Error("controller gains must be non-negative");
    }
    if (condition.haptic() == 4 && !(controller_kd_N_per_mm_per_s > haptics.anti_viscosity_N_per_mm_per_s)) {
        throw Error("controller damping must exceed the anti-viscosity coefficient");
    }
    if (warmup_s < 0.0) throw Error("warm-up time must be non-negative");
    if (initial_z_mm && !(*initial_z_mm >= haptics.stim_base_mm && *initial_z_mm <= haptics.stim_top_mm())) {
        throw Error("initial z outside the stimulus range");
    }
}

RunRecord simulate_run(const SimConfig& cfg, SimDiagnostics* diagnostics) {
    cfg.validate();
    const auto& hp = cfg.haptics;
    const auto& sp = cfg.sampling;
    const int n_law = cfg.condition.haptic();

    const double rate = sp.position_rate_Hz;
    const double dt = sp.dt();
    const std::size_t recorded = sp.samples_per_run();
    const auto warmup = static_cast<std::size_t>(std::llround(cfg.warmup_s * rate));
    const std::size_t total = warmup + recorded;
    const int steps_per_cmd = sp.steps_per_command();
    const auto latency_cmds =
        cfg.emulate_latency ? static_cast<std::size_t>(std::llround(sp.latency_s * sp.force_rate_Hz)) : 0;

    std::vector<double> reference(total, 0.0);
    if (cfg.controller_kp_N_per_mm > 0.0 && cfg.noise_scale != 0.0) {
        reference = generate_tremor(cfg.model, cfg.seed, static_cast<double>(total) / rate, rate, cfg.drift_enabled,
                                    cfg.drift);
    }

    // Velocity laws are rendered as a continuous dashpot unless the command path is degraded.
    const bool dashpot = (n_law == 3 || n_law == 4) && !cfg.emulate_latency && !cfg.emulate_force_quantization;
    const double dashpot_b = n_law == 3 ? hp.viscosity_N_per_mm_per_s
                           : n_law == 4 ? hp.anti_viscosity_N_per_mm_per_s
                                        : 0.0;
    const double accel_per_N = 1000.0 / sp.transducer_mass_kg;  // mm/s^2 per N
    const double beta = accel_per_N * ((dashpot ? dashpot_b : 0.0) - cfg.controller_kd_N_per_mm_per_s);
    const auto weights = step_weights(beta, dt);

    std::vector<double> z_out(recorded), v_out(recorded), f_out(recorded);
    std::vector<double> issued;
    issued.reserve(total / static_cast<std::size_t>(steps_per_cmd) + 1);

    double z = cfg.initial_z_mm.value_or(cfg.target_z_mm);
    double v = cfg.initial_v_mm_s;
    double command = 0.0;
    double held = 0.0;
    std::size_t clamped = 0;

    for (std::size_t i = 0; i < total; ++i) {
        if (i % static_cast<std::size_t>(steps_per_cmd) == 0) {
            command = condition_force(n_law, z, v, hp);
            if (cfg.emulate_force_quantization && sp.force_resolution_N > 0.0) {
                command = std::round(command / sp.force_resolution_N) * sp.force_resolution_N;
            }
            issued.push_back(command);
            const std::size_t idx = issued.size() - 1;
            held = issued[idx >= latency_cmds ? idx - latency_cmds : 0];
        }
        if (i >= warmup) {
            const std::size_t r = i - warmup;
            z_out[r] = z;
            v_out[r] = v;
            f_out[r] = command;
        }

        const double applied = dashpot ? 0.0 : held;
        const double f_ctrl = cfg.controller_kp_N_per_mm * (cfg.target_z_mm + cfg.noise_scale * reference[i] - z);
        const double a0 = accel_per_N * (applied + f_ctrl);
        double z_next = z + v * weights.phi1 + a0 * weights.phi2;
        double v_next = v * weights.decay + a0 * weights.phi1;
        if (!std::isfinite(z_next) || !std::isfinite(v_next)) throw Error("unstable simulation");
        if (z_next < hp.stim_base_mm || z_next > hp.stim_top_mm()) {
            ++clamped;
            z_next = std::clamp(z_next, hp.stim_base_mm, hp.stim_top_mm());
            v_next = 0.0;
        }
        z = z_next;
        v = v_next;
    }
    if (2 * clamped > total) throw Error("unstable simulation");

    if (cfg.emulate_sensor_noise && sp.sensor_noise_pp_mm > 0.0) {
        auto rng = make_rng(cfg.seed, kSensorStream);
        std::uniform_real_distribution<double> noise(-0.5 * sp.sensor_noise_pp_mm, 0.5 * sp.sensor_noise_pp_mm);
        for (double& zi : z_out) zi = std::clamp(zi + noise(rng), hp.stim_base_mm, hp.stim_top_mm());
    }

    if (diagnostics) {
        diagnostics->steps = total;
        diagnostics->clamped_steps = clamped;
    }
    RunRecord run(cfg.condition, std::move(z_out), std::move(v_out), std::move(f_out));
    run.seed = cfg.seed;
    return run;
}

}  // namespace stillness
