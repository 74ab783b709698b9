// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include "mmbeam/codebook.hpp"
#include "mmbeam/errors.hpp"
#include "mmbeam/precoding.hpp"

namespace mmbeam {

namespace {

bool is_power_of(std::size_t value, std::size_t base) {
    if (value < 1)
        return false;
    while (value % base == 0)
        value /= base;
    return value == 1;
}

std::size_t int_log(std::size_t value, std::size_t base) {
    std::size_t s = 0;
    while (value > 1) {
        value /= base;
        ++s;
    }
    return s;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// fixed-format double so CSVs are byte-stable across locales and platforms
std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// ordered Kahan reduction: the same result no matter how trials were scheduled
double compensated_sum(const std::vector<double> &values) {
    double sum = 0.0, carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void parallel_for_trials(std::size_t trials, std::size_t threads,
                         const std::function<void(std::size_t)> &body) {
    std::size_t n_workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (n_workers == 0)
        n_workers = 1;
    n_workers = std::min(n_workers, trials == 0 ? std::size_t{1} : trials);
    if (n_workers <= 1) {
        for (std::size_t t = 0; t < trials; ++t)
            body(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t t = next.fetch_add(1);
                if (t >= trials)
                    return;
                try {
                    body(t);
                } catch (...) {
                    failed.store(true);
                }
            }
        });
    }
    for (auto &th : pool)
        th.join();
    if (failed)
        throw NumericalFailure("experiment trial threw; rerun single-threaded to inspect", 0);
}

} // namespace

std::vector<std::string> validate(const SimConfig &cfg) {
    std::vector<std::string> problems;
    if (cfg.m != 2)
        problems.push_back("hierarchical factor m must be 2 (codebook recipe)");
    if (cfg.n_s < 1)
        problems.push_back("n_s must be >= 1");
    if (cfg.n_s > std::min(cfg.n_r, cfg.m_r))
        problems.push_back("n_s (" + std::to_string(cfg.n_s) +
                           ") must not exceed min(n_r, m_r) = " +
                           std::to_string(std::min(cfg.n_r, cfg.m_r)));
    if (cfg.l < cfg.n_s)
        problems.push_back("l (" + std::to_string(cfg.l) + ") must be >= n_s (" +
                           std::to_string(cfg.n_s) + ")");
    if (!is_power_of(cfg.n_a, cfg.m))
        problems.push_back("n_a (" + std::to_string(cfg.n_a) + ") must be a power of m");
    if (!is_power_of(cfg.m_a, cfg.m))
        problems.push_back("m_a (" + std::to_string(cfg.m_a) + ") must be a power of m");
    if (cfg.k < 1)
        problems.push_back("over-sampling factor k must be >= 1");
    if (cfg.trials < 1)
        problems.push_back("trials must be >= 1");
    if (cfg.n_r < 1 || cfg.m_r < 1)
        problems.push_back("RF chain counts must be >= 1");
    const int depth_min =
        static_cast<int>(std::min(int_log(cfg.n_a, cfg.m), int_log(cfg.m_a, cfg.m)));
    if (cfg.i_ly < 1 || cfg.i_ly > depth_min)
        problems.push_back("i_ly (" + std::to_string(cfg.i_ly) + ") must be in [1, " +
                           std::to_string(depth_min) + "]");
    if (cfg.snr_db_grid.empty())
        problems.push_back("snr grid must not be empty");
    return problems;
}

namespace {

// The steering response is 2-periodic in cosine angle, so omega = -1 and
// omega = +1 are the same array response; angle errors are measured on that
// circle or paths right at the edge would count as misses.
double wrapped_angle_error(double a, double b) {
    const double d = std::fmod(std::abs(a - b), 2.0);
    return std::min(d, 2.0 - d);
}

} // namespace

bool success_decision(const BeamSearchResult &result, const ChannelRealization &truth,
                      std::size_t k_oversample, std::size_t n_s) {
    if (result.pairs.size() != n_s)
        return false;
    const double aod_tol = 1.0 / static_cast<double>(truth.n_bs_antennas);
    const double aoa_tol = 1.0 / static_cast<double>(truth.n_ms_antennas);
    std::vector<char> claimed(truth.paths.size(), 0);
    for (const auto &[i_ms, j_bs] : result.pairs) {
        const double aoa_hat = -1.0 + (2.0 * i_ms - 1.0) /
                                          static_cast<double>(k_oversample * truth.n_ms_antennas);
        const double aod_hat = -1.0 + (2.0 * j_bs - 1.0) /
                                          static_cast<double>(k_oversample * truth.n_bs_antennas);
        bool matched = false;
        for (std::size_t p = 0; p < truth.paths.size(); ++p) {
            if (claimed[p])
                continue;
            if (wrapped_angle_error(truth.paths[p].aod_cos, aod_hat) < aod_tol &&
                wrapped_angle_error(truth.paths[p].aoa_cos, aoa_hat) < aoa_tol) {
                claimed[p] = 1;
                matched = true;
                break;
            }
        }
        if (!matched)
            return false;
    }
    return true;
}

std::int64_t time_cost_hierarchical(const SimConfig &cfg) {
    const std::int64_t stages =
        static_cast<std::int64_t>(int_log(cfg.n_a, cfg.m) + int_log(cfg.m_a, cfg.m)) -
        2 * cfg.i_ly;
    const std::int64_t rf = static_cast<std::int64_t>(cfg.n_r * cfg.m_r);
    std::int64_t initial = 1;
    for (int i = 0; i < 2 * cfg.i_ly; ++i)
        initial *= static_cast<std::int64_t>(cfg.m);
    const std::int64_t per_path = stages * ceil_div(static_cast<std::int64_t>(cfg.m), rf) +
                                  ceil_div(initial, rf) +
                                  ceil_div(static_cast<std::int64_t>(cfg.k * cfg.k), rf);
    return static_cast<std::int64_t>(cfg.n_s) * per_path;
}

std::int64_t time_cost_sequential(const SimConfig &cfg) {
    const std::int64_t measurements =
        static_cast<std::int64_t>(cfg.k * cfg.k) * static_cast<std::int64_t>(cfg.m_a) *
        static_cast<std::int64_t>(cfg.n_a);
    return ceil_div(measurements, static_cast<std::int64_t>(cfg.n_r * cfg.m_r));
}

double time_cost_sparse(const SimConfig &cfg) {
    const double m = static_cast<double>(cfg.m);
    const double n_s = static_cast<double>(cfg.n_s);
    if (n_s == 0.0)
        return 0.0;
    const double chains = std::ceil(m * n_s / static_cast<double>(cfg.n_r));
    const double levels = std::log(static_cast<double>(cfg.k * cfg.n_a) / n_s) / std::log(m);
    return m * n_s * n_s * chains * levels;
}

namespace {

struct TrialInputs {
    const SimConfig &cfg;
    const Codebook &cb_bs;
    const Codebook &cb_ms;
    double snr_db;
};

TrialRecord run_success_trial(const TrialInputs &in, std::size_t trial) {
    // trial streams deliberately exclude the sweep point: every SNR point and
    // config variant sees the same channel set, so sweep comparisons are
    // paired (common random numbers)
    Rng rng = Rng::from_stream(in.cfg.master_seed, trial);
    const ChannelRealization h = generate_channel(in.cfg.n_a, in.cfg.m_a, in.cfg.l, rng);
    const double power = db_to_linear(in.snr_db);
    const BeamSearchResult result = hierarchical_search(h, in.cb_bs, in.cb_ms, in.cfg.n_s,
                                                        in.cfg.i_ly, power, rng, false);
    TrialRecord rec{};
    rec.trial_index = trial;
    rec.snr_db = in.snr_db;
    rec.n_found = result.pairs.size();
    rec.measurements_used = result.measurements_used;
    rec.success = success_decision(result, h, in.cfg.k, in.cfg.n_s);
    rec.rate_lc_hpc = 0.0;
    rec.rate_bound = 0.0;
    return rec;
}

TrialRecord run_rate_trial(const TrialInputs &in, std::size_t trial) {
    Rng rng = Rng::from_stream(in.cfg.master_seed, trial);
    const ChannelRealization h = generate_channel(in.cfg.n_a, in.cfg.m_a, in.cfg.l, rng);
    const double power = db_to_linear(in.snr_db);
    const bool noiseless = in.cfg.noiseless_estimation;
    const BeamSearchResult result = hierarchical_search(h, in.cb_bs, in.cb_ms, in.cfg.n_s,
                                                        in.cfg.i_ly, power, rng, noiseless);
    // fewer found beams than streams: transmit on what was found
    const PrecodingSolution sol =
        build_precoding_solution(h, result, in.cb_bs, in.cb_ms, power,
                                 db_to_linear(in.cfg.training_snr_db), rng, noiseless);
    TrialRecord rec{};
    rec.trial_index = trial;
    rec.snr_db = in.snr_db;
    rec.n_found = result.pairs.size();
    rec.measurements_used = result.measurements_used;
    rec.success = success_decision(result, h, in.cfg.k, in.cfg.n_s);
    rec.rate_lc_hpc = achievable_rate(h, sol, power);
    rec.rate_bound = rate_bound(h, in.cfg.n_s, power);
    return rec;
}

void require_valid(const SimConfig &cfg) {
    const std::vector<std::string> problems = validate(cfg);
    if (problems.empty())
        return;
    std::string msg = "invalid experiment configuration:";
    for (const auto &p : problems)
        msg += "\n  - " + p;
    throw ValidationError(msg);
}

} // namespace

std::vector<SuccessRow> run_success_sweep(const SimConfig &cfg, std::size_t threads) {
    require_valid(cfg);
    const Codebook cb_bs = build_codebook(cfg.n_a, cfg.m, cfg.k);
    const Codebook cb_ms = build_codebook(cfg.m_a, cfg.m, cfg.k);

    std::vector<SuccessRow> rows;
    rows.reserve(cfg.snr_db_grid.size());
    for (std::size_t point = 0; point < cfg.snr_db_grid.size(); ++point) {
        const TrialInputs in{cfg, cb_bs, cb_ms, cfg.snr_db_grid[point]};
        std::vector<double> successes(cfg.trials, 0.0);
        parallel_for_trials(cfg.trials, threads, [&](std::size_t t) {
            successes[t] = run_success_trial(in, t).success ? 1.0 : 0.0;
        });
        const double n = static_cast<double>(cfg.trials);
        const double p_hat = compensated_sum(successes) / n;
        const double sigma = std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / n);
        rows.push_back({in.snr_db, cfg.n_s, cfg.k, cfg.i_ly, p_hat, 1.96 * sigma, cfg.trials});
    }
    return rows;
}

std::vector<RateRow> run_rate_sweep(const SimConfig &cfg, std::size_t threads) {
    require_valid(cfg);
    const Codebook cb_bs = build_codebook(cfg.n_a, cfg.m, cfg.k);
    const Codebook cb_ms = build_codebook(cfg.m_a, cfg.m, cfg.k);

    std::vector<RateRow> rows;
    rows.reserve(cfg.snr_db_grid.size());
    for (std::size_t point = 0; point < cfg.snr_db_grid.size(); ++point) {
        const TrialInputs in{cfg, cb_bs, cb_ms, cfg.snr_db_grid[point]};
        std::vector<double> rates(cfg.trials, 0.0), bounds(cfg.trials, 0.0);
        parallel_for_trials(cfg.trials, threads, [&](std::size_t t) {
            const TrialRecord rec = run_rate_trial(in, t);
            rates[t] = rec.rate_lc_hpc;
            bounds[t] = rec.rate_bound;
        });
        const double n = static_cast<double>(cfg.trials);
        const double rate_mean = compensated_sum(rates) / n;
        const double bound_mean = compensated_sum(bounds) / n;
        auto ci95 = [n](const std::vector<double> &v, double mean) {
            if (v.size() < 2)
                return 0.0;
            double ss = 0.0;
            for (double x : v)
                ss += (x - mean) * (x - mean);
            return 1.96 * std::sqrt(ss / (n - 1.0) / n);
        };
        rows.push_back({in.snr_db, cfg.n_s, cfg.k, cfg.i_ly, rate_mean, ci95(rates, rate_mean),
                        bound_mean, ci95(bounds, bound_mean), cfg.trials});
    }
    return rows;
}

std::string success_csv(const std::vector<SuccessRow> &rows) {
    std::ostringstream out;
    out << "snr_db,n_s,k,i_ly,success_rate,ci95_halfwidth,trials\n";
    for (const auto &r : rows)
        out << format_double(r.snr_db) << ',' << r.n_s << ',' << r.k << ',' << r.i_ly << ','
            << format_double(r.success_rate) << ',' << format_double(r.ci95_halfwidth) << ','
            << r.trials << '\n';
    return out.str();
}

std::string rate_csv(const std::vector<RateRow> &rows) {
    std::ostringstream out;
    out << "snr_db,n_s,k,i_ly,rate_lc_hpc_mean,rate_lc_hpc_ci95,rate_bound_mean,"
           "rate_bound_ci95,trials\n";
    for (const auto &r : rows)
        out << format_double(r.snr_db) << ',' << r.n_s << ',' << r.k << ',' << r.i_ly << ','
            << format_double(r.rate_lc_hpc_mean) << ',' << format_double(r.rate_lc_hpc_ci95)
            << ',' << format_double(r.rate_bound_mean) << ',' << format_double(r.rate_bound_ci95)
            << ',' << r.trials << '\n';
    return out.str();
}

} // namespace mmbeam
