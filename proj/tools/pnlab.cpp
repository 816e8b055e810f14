// pnlab: experiment runner for the white phase-noise channel.
//
//   pnlab lemma  --sigma2 1.0 --ladder 8:16 --trials 1000 --seed 7 --out lemma.csv
//   pnlab psd    --sigma2 0.6931 --snr-db inf --out psd.csv
//   pnlab mi     --constellation qam16 --snr-db 10 --sigma2 0.25
//   pnlab equiv  --sigma2 1 --l 256 --trials 100000
//   pnlab gram   --n-max 8 --S 2 --l 64
//   pnlab verify --quick --out-dir verify_out
//
// Exit codes: 0 success, 1 usage/config error, 2 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "pnlab/pnlab.hpp"

namespace {

using pnlab::ExperimentConfig;
using pnlab::detail::format_double;

/// Flag name -> config key, shared by every experiment subcommand.
const std::map<std::string, std::string> kCommonFlags = {
    {"--S", "S"},           {"--T", "T"},         {"--l", "l"},
    {"--phase", "phase"},   {"--sigma2", "sigma2"}, {"--es", "es"},
    {"--snr-db", "snr_db"}, {"--constellation", "constellation"},
    {"--seed", "seed"},     {"--trials", "trials"}, {"--threads", "threads"},
};

struct Experiment {
    CLI::App* app = nullptr;
    std::string config_path;
    std::string out_path;
    std::map<std::string, std::string> flag_values;  // config key -> text
    ExperimentConfig defaults;
};

void add_flag(Experiment& e, const std::string& flag, const std::string& key, const std::string& help) {
    e.app->add_option_function<std::string>(
        flag, [&e, key](const std::string& v) { e.flag_values[key] = v; }, help);
}

Experiment& make_experiment(CLI::App& root, const std::string& name, const std::string& help,
                            ExperimentConfig defaults, std::map<std::string, std::unique_ptr<Experiment>>& all) {
    auto exp = std::make_unique<Experiment>();
    exp->app = root.add_subcommand(name, help);
    exp->defaults = std::move(defaults);
    exp->app->add_option("--config", exp->config_path, "key = value config file (or an earlier output file)");
    exp->app->add_option("--out", exp->out_path, "output CSV (default: stdout)");
    for (const auto& [flag, key] : kCommonFlags) add_flag(*exp, flag, key, "override config key '" + key + "'");
    auto& ref = *exp;
    all[name] = std::move(exp);
    return ref;
}

/// Defaults, then the config file, then flags.
ExperimentConfig effective_config(const Experiment& e) {
    ExperimentConfig cfg = e.defaults;
    if (!e.config_path.empty()) cfg = pnlab::load_config(e.config_path, cfg);
    for (const auto& [key, value] : e.flag_values) cfg.set(key, value);
    cfg.grid();
    return cfg;
}

void emit(const Experiment& e, const std::string& command, const ExperimentConfig& cfg, const std::string& body) {
    std::ostringstream os;
    os << "# pnlab " << command << '\n' << cfg.echo() << body;
    if (e.out_path.empty()) {
        std::cout << os.str();
        return;
    }
    std::ofstream out(e.out_path, std::ios::binary);
    if (!out) throw pnlab::ConfigError("cannot write '" + e.out_path + "'");
    out << os.str();
}

int run_lemma(const Experiment& e) {
    const auto cfg = effective_config(e);
    const pnlab::BasisIndex idx{cfg.n, cfg.m};
    const auto table = pnlab::lemma_convergence_table(cfg.k, idx, cfg.phase_model(), cfg.ladder(), cfg.S, cfg.T,
                                                      cfg.trials, pnlab::RandomStream(cfg.seed, 300), cfg.threads);
    std::ostringstream os;
    os << "# limit_re = " << format_double(table.limit.real()) << '\n';
    os << "# limit_im = " << format_double(table.limit.imag()) << '\n';
    os << "# variance_slope = " << format_double(table.variance_slope()) << '\n';
    os << "l,mean_re,mean_im,var,stderr,nested_path_re,nested_path_im,nested_path_dev\n";
    for (const auto& r : table.rows) {
        const double se = std::sqrt(r.variance / static_cast<double>(cfg.trials));
        os << r.level << ',' << format_double(r.mean.real()) << ',' << format_double(r.mean.imag()) << ','
           << format_double(r.variance) << ',' << format_double(se) << ',' << format_double(r.nested_path.real())
           << ',' << format_double(r.nested_path.imag()) << ','
           << format_double(std::abs(r.nested_path - table.limit)) << '\n';
    }
    emit(e, "lemma", cfg, os.str());
    std::cerr << "limit " << table.limit << ", log-variance slope " << table.variance_slope() << '\n';
    return 0;
}

int run_psd(const Experiment& e) {
    const auto cfg = effective_config(e);
    auto channel = cfg.channel();
    pnlab::SpectralLossOptions opt;
    opt.segment = cfg.segment;
    opt.overlap = cfg.overlap;
    opt.threads = cfg.threads;
    opt.constellation = cfg.constellation;
    const auto est = pnlab::spectral_loss_estimate(channel, cfg.trials, opt);
    const double expected = std::norm(pnlab::mu_theta(channel.phase).value);
    std::ostringstream os;
    os << "# gain = " << format_double(est.gain) << '\n';
    os << "# expected_gain = " << format_double(expected) << '\n';
    os << "# floor = " << format_double(est.floor) << '\n';
    os << "# segments = " << est.segments << '\n';
    os << "frequency,density_noisy,density_clean\n";
    for (std::size_t i = 0; i < est.noisy.frequencies.size(); ++i)
        os << format_double(est.noisy.frequencies[i]) << ',' << format_double(est.noisy.density[i]) << ','
           << format_double(est.clean.density[i]) << '\n';
    emit(e, "psd", cfg, os.str());
    std::cerr << "spectral loss: estimated gain " << est.gain << " (exp(-sigma2) = " << expected << "), floor "
              << est.floor << ", " << est.segments << " segments\n";
    return 0;
}

int run_mi(const Experiment& e) {
    const auto cfg = effective_config(e);
    const auto channel = cfg.channel();
    const auto c = pnlab::Constellation::by_name(cfg.constellation);
    const auto mu = pnlab::mu_theta(channel.phase);
    const auto penalty = pnlab::snr_penalty_db(channel.phase);
    std::ostringstream os;
    os << "# snr_penalty_db = " << (penalty ? format_double(*penalty) : std::string("inf")) << '\n';
    os << "method,value_bits,stderr_bits,trials\n";
    auto row = [&](const std::string& name, const pnlab::MIEstimate& m) {
        os << name << ',' << format_double(m.value) << ',' << format_double(m.stderr_) << ',' << m.trials << '\n';
        std::cerr << name << ": " << m.value << " +/- " << m.stderr_ << " bits\n";
    };
    if (channel.noise.n0 > 0.0) row("gaussian_closed_form", pnlab::mi_gaussian_closed_form(cfg.es, channel.noise.n0, mu));
    if (!c.is_gaussian()) {
        row("equivalent_monte_carlo", pnlab::mi_monte_carlo(c, mu, cfg.es, channel.noise.n0, cfg.trials,
                                                            pnlab::RandomStream(cfg.seed, 1), cfg.threads));
        if (channel.noise.n0 > 0.0) {
            row("end_to_end", pnlab::mi_end_to_end(channel, c, cfg.trials, cfg.threads));
            if (penalty) {
                const double n0_pen = cfg.es / std::pow(10.0, (cfg.snr_db - *penalty) / 10.0);
                row("awgn_at_penalized_snr", pnlab::mi_monte_carlo(c, pnlab::MuTheta{}, cfg.es, n0_pen, cfg.trials,
                                                                   pnlab::RandomStream(cfg.seed, 2), cfg.threads));
            }
        }
    }
    emit(e, "mi", cfg, os.str());
    return 0;
}

int run_equiv(const Experiment& e) {
    const auto cfg = effective_config(e);
    const auto channel = cfg.channel();
    const auto c = pnlab::Constellation::by_name(cfg.constellation);
    const auto rows = pnlab::compare_equivalent_channel(channel, c, cfg.trials, cfg.threads);
    std::ostringstream os;
    os << "point_re,point_im,count,pipeline_mean_re,pipeline_mean_im,oracle_mean_re,oracle_mean_im,"
          "pipeline_var,residual,pipeline_var_minus_residual,oracle_var,var_stderr\n";
    for (const auto& r : rows) {
        os << format_double(r.point.real()) << ',' << format_double(r.point.imag()) << ',' << r.pipeline.count << ','
           << format_double(r.pipeline.mean.real()) << ',' << format_double(r.pipeline.mean.imag()) << ','
           << format_double(r.oracle.mean.real()) << ',' << format_double(r.oracle.mean.imag()) << ','
           << format_double(r.pipeline.variance) << ',' << format_double(r.residual) << ','
           << format_double(r.pipeline.variance - r.residual) << ',' << format_double(r.oracle.variance) << ','
           << format_double(std::hypot(r.pipeline.variance_stderr, r.oracle.variance_stderr)) << '\n';
    }
    emit(e, "equiv", cfg, os.str());
    return 0;
}

int run_gram(const Experiment& e) {
    const auto cfg = effective_config(e);
    const auto grid = cfg.grid();
    std::vector<pnlab::BasisIndex> idx;
    for (std::int64_t n = 0; n <= cfg.n_max; ++n)
        for (std::int64_t m = grid.first_slot(); m < grid.first_slot() + grid.num_slots(); ++m) idx.push_back({n, m});
    const auto g = pnlab::gram_matrix(idx, grid);
    std::ostringstream os;
    os << "# max_abs_deviation_from_identity = " << format_double(g.distance_from_identity()) << '\n';
    os << "a_n,a_m,b_n,b_m,re,im\n";
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
            os << idx[a].n << ',' << idx[a].m << ',' << idx[b].n << ',' << idx[b].m << ','
               << format_double(g(a, b).real()) << ',' << format_double(g(a, b).imag()) << '\n';
    emit(e, "gram", cfg, os.str());
    if (grid.samples_per_symbol() <= 2 * cfg.n_max)
        std::cerr << "warning: T/dt = " << grid.samples_per_symbol() << " <= 2*n_max; basis aliasing expected\n";
    std::cerr << "max |G - I| = " << g.distance_from_identity() << " over " << idx.size() << " basis functions\n";
    return 0;
}

int run_verify(bool full, std::uint64_t seed, unsigned threads, const std::string& out_dir) {
    namespace fs = std::filesystem;
    pnlab::verify::SuiteOptions opt;
    opt.full = full;
    opt.seed = seed;
    opt.threads = threads;
    fs::create_directories(out_dir);
    std::ostringstream summary;
    bool all = true;
    int index = 0;
    for (const auto& fn : pnlab::verify::criteria()) {
        ++index;
        const auto r = pnlab::verify::run_timed(fn, opt);
        pnlab::verify::write_file(fs::path(out_dir) / (std::to_string(index) + "_" + r.name + ".csv"),
                                  pnlab::verify::criterion_csv(r, opt));
        const auto line = pnlab::verify::summary_line(r);
        summary << line << '\n';
        std::printf("%-60s %6.2fs%s%s\n", line.c_str(), r.seconds,
                    r.within_time() ? "" : " (over time limit)", r.error.empty() ? "" : (" error: " + r.error).c_str());
        all = all && r.pass();
    }
    pnlab::verify::write_file(fs::path(out_dir) / "summary.txt", summary.str());
    std::printf("%s\n", all ? "all criteria PASS" : "verification FAILED");
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pnlab: white phase-noise channel laboratory"};
    app.require_subcommand(1);
    std::map<std::string, std::unique_ptr<Experiment>> exps;

    ExperimentConfig lemma_defaults;
    lemma_defaults.S = 2.0;
    lemma_defaults.l = 1 << 16;
    lemma_defaults.trials = 1000;
    auto& lemma = make_experiment(app, "lemma", "convergence of phase-noise projections over a refinement ladder",
                                  lemma_defaults, exps);
    add_flag(lemma, "--k", "k", "pulse shift k");
    add_flag(lemma, "--n", "n", "basis frequency index n");
    add_flag(lemma, "--m", "m", "basis shift index m");
    add_flag(lemma, "--ladder", "ladder", "log2 refinement levels, min:max");

    ExperimentConfig psd_defaults;
    psd_defaults.S = 64.0;
    psd_defaults.l = 1 << 14;
    psd_defaults.trials = 4;
    psd_defaults.snr_db = INFINITY;
    auto& psd = make_experiment(app, "psd", "Welch PSD and spectral loss of the phase-noisy signal", psd_defaults, exps);
    add_flag(psd, "--segment", "segment", "Welch segment length (samples)");
    add_flag(psd, "--overlap", "overlap", "Welch overlap fraction in [0, 1)");

    auto& mi = make_experiment(app, "mi", "mutual information: closed form, equivalent channel, full pipeline",
                               ExperimentConfig{}, exps);
    ExperimentConfig equiv_defaults;
    equiv_defaults.l = 256;
    equiv_defaults.snr_db = 5.0;
    equiv_defaults.trials = 100000;
    auto& equiv = make_experiment(app, "equiv", "matched-filter output vs. the equivalent discrete channel",
                                  equiv_defaults, exps);
    ExperimentConfig gram_defaults;
    gram_defaults.S = 2.0;
    gram_defaults.l = 64;
    auto& gram = make_experiment(app, "gram", "Gram matrix of the trigonometric basis on the grid", gram_defaults, exps);
    add_flag(gram, "--n-max", "n_max", "largest basis frequency index");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    bool full = false;
    bool quick = false;
    std::uint64_t seed = pnlab::verify::SuiteOptions{}.seed;
    unsigned threads = 0;
    std::string out_dir = "verify_out";
    verify->add_flag("--quick", quick, "desk-scale trial counts (default)");
    verify->add_flag("--full", full, "ten times the trials; runtime limits not enforced");
    verify->add_option("--seed", seed, "master seed");
    verify->add_option("--threads", threads, "worker threads (0 = all cores); results do not depend on it");
    verify->add_option("--out-dir", out_dir, "directory for per-criterion CSVs and summary.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (lemma.app->parsed()) return run_lemma(lemma);
        if (psd.app->parsed()) return run_psd(psd);
        if (mi.app->parsed()) return run_mi(mi);
        if (equiv.app->parsed()) return run_equiv(equiv);
        if (gram.app->parsed()) return run_gram(gram);
        if (verify->parsed()) {
            if (full && quick) {
                std::cerr << "error: --quick and --full are exclusive\n";
                return 1;
            }
            return run_verify(full, seed, threads, out_dir);
        }
    } catch (const pnlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const pnlab::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
