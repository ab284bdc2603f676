// rsf — random-spanning-forest estimators for graph Tikhonov regularization,
// interpolation, SSL, Newton/IRLS solvers, and the benchmark harness.
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 numeric, 5 capability.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rsf/bench.hpp"
#include "rsf/baselines.hpp"
#include "rsf/graph_gen.hpp"
#include "rsf/graph_io.hpp"
#include "rsf/smoother.hpp"
#include "rsf/spectrum.hpp"
#include "rsf/tasks.hpp"
#include "rsf/tuning.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace rsf;

struct CommonFlags {
    std::string graph_spec;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string config_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_graph = true) {
    auto* g = cmd->add_option("--graph", flags.graph_spec,
                              "graph spec: grid:RxC[:periodic] | er:N:DEG | ba:N:M | kreg:N:K | "
                              "knn:N:K[:DIM] | file:PATH");
    if (needs_graph) g->required();
    cmd->add_option("--seed", flags.seed, "rng seed")->capture_default_str();
    cmd->add_option("--threads", flags.threads,
                    "worker cap; 0 = all cores (bench defaults to 1)")
        ->capture_default_str();
    cmd->add_option("--config", flags.config_path, "key=value file merged into the flags");
}

// Echo every flag that has a value so the run can be reproduced by feeding the
// same lines back through --config.
void echo_config(const CLI::App* cmd) {
    std::cout << "# --- config ---\n";
    std::cout << "command=" << cmd->get_name() << "\n";
    for (const auto* opt : cmd->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "config" || name == "help") continue;
        if (opt->count() == 0 && opt->get_default_str().empty()) continue;
        std::string value = opt->get_default_str();
        if (opt->count() > 0) {
            value.clear();
            for (const auto& r : opt->results()) {
                if (!value.empty()) value += ' ';
                value += r;
            }
        }
        if (opt->get_expected_min() == 0) {
            // flag: echo only when set
            if (opt->count() > 0) std::cout << name << "=true\n";
        } else {
            std::cout << name << "=" << value << "\n";
        }
    }
    std::cout << "# --- end config ---\n";
}

// Merge `key=value` lines into argv form; a key that was also passed on the
// command line is a conflict, not a silent override.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    std::vector<std::string> out = args;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("config: expected key=value, got '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "command") continue;
        const std::string flag = "--" + key;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0)
                throw UsageError("config: '" + key + "' conflicts with a command-line flag");
        out.push_back(flag);
        if (value != "true") out.push_back(value);
    }
    return out;
}

int resolve_threads(int threads, int bench_default = 0) {
    if (threads > 0) return threads;
    if (bench_default > 0) return bench_default;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Estimator parse_estimator(const std::string& s) {
    if (s == "tilde") return Estimator::tilde;
    if (s == "bar") return Estimator::bar;
    throw UsageError("estimator must be tilde or bar");
}

SolveMethod parse_method(const std::string& s) {
    if (s == "exact") return SolveMethod::exact;
    if (s == "tilde") return SolveMethod::tilde;
    if (s == "bar") return SolveMethod::bar;
    throw UsageError("method must be exact, tilde or bar");
}

Signal load_or_make_signal(const Graph& g, const std::string& signal_path, int k, double snr,
                           std::uint64_t seed, double* sigma2_out) {
    if (!signal_path.empty()) {
        Signal y = load_signal_csv(signal_path);
        if (y.size() != static_cast<std::size_t>(g.num_nodes()))
            throw DataError("signal length does not match graph size");
        return y;
    }
    auto sig = bandlimited_signal(g, k, snr, seed);
    if (sigma2_out) *sigma2_out = sig.sigma2;
    return sig.y;
}

int run(int argc, char** argv) {
    CLI::App app{"random spanning forest estimators for graph smoothing and interpolation"};
    app.name("rsf");
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // ---- smooth ----
    CommonFlags smooth_flags;
    std::string smooth_signal, smooth_out = "smooth.csv", smooth_estimator = "bar";
    double smooth_q = 1.0, smooth_snr = 2.0;
    int smooth_k = 5;
    std::int64_t smooth_forests = 100;
    auto* smooth = app.add_subcommand("smooth", "Tikhonov smoothing x = (L+qI)^(-1) q y");
    add_common(smooth, smooth_flags);
    smooth->add_option("--q", smooth_q, "regularization strength")->capture_default_str();
    smooth->add_option("--signal", smooth_signal, "input signal csv (node,value); default: "
                                                  "synthetic bandlimited signal");
    smooth->add_option("--k", smooth_k, "synthetic signal bandwidth")->capture_default_str();
    smooth->add_option("--snr", smooth_snr, "synthetic signal snr")->capture_default_str();
    smooth->add_option("--estimator", smooth_estimator, "exact | tilde | bar")
        ->capture_default_str();
    smooth->add_option("--forests", smooth_forests, "forest count N")->capture_default_str();
    smooth->add_option("--out", smooth_out, "output csv")->capture_default_str();

    // ---- sample-forest ----
    CommonFlags forest_flags;
    std::string forest_out = "forest.csv";
    double forest_q = 1.0;
    auto* forest_cmd = app.add_subcommand("sample-forest", "sample one rooted spanning forest");
    add_common(forest_cmd, forest_flags);
    forest_cmd->add_option("--q", forest_q, "absorption weight")->capture_default_str();
    forest_cmd->add_option("--out", forest_out, "output csv (node,next,root,tree_id)")
        ->capture_default_str();

    // ---- tune ----
    CommonFlags tune_flags;
    std::string tune_method = "sure", tune_signal, tune_grid = "0.5:0.5:5.0",
                tune_out = "tune.csv", tune_estimator = "bar";
    double tune_sigma2 = 0.0, tune_snr = 2.0;
    int tune_k = 5;
    std::int64_t tune_forests = 100;
    auto* tune = app.add_subcommand("tune", "grid-search mu by SURE or LOOCV");
    add_common(tune, tune_flags);
    tune->add_option("--method", tune_method, "sure | sure-rsf | loocv | loocv-rsf")
        ->capture_default_str();
    tune->add_option("--sigma2", tune_sigma2, "noise variance (SURE)");
    tune->add_option("--grid", tune_grid, "lo:step:hi candidate sweep")->capture_default_str();
    tune->add_option("--signal", tune_signal, "input signal csv; default synthetic");
    tune->add_option("--k", tune_k, "synthetic signal bandwidth")->capture_default_str();
    tune->add_option("--snr", tune_snr, "synthetic signal snr")->capture_default_str();
    tune->add_option("--estimator", tune_estimator, "tilde | bar (rsf methods)")
        ->capture_default_str();
    tune->add_option("--forests", tune_forests, "forests per candidate")->capture_default_str();
    tune->add_option("--out", tune_out, "candidate,score csv")->capture_default_str();

    // ---- interpolate ----
    CommonFlags interp_flags;
    std::string interp_known, interp_out = "interpolate.csv", interp_method = "exact";
    double interp_mu = 0.0;
    std::int64_t interp_forests = 100;
    auto* interp = app.add_subcommand("interpolate", "extend a partially known signal");
    add_common(interp, interp_flags);
    interp->add_option("--known", interp_known, "csv of known node,value rows")->required();
    interp->add_option("--mu", interp_mu, "regularization (0 = harmonic)")->capture_default_str();
    interp->add_option("--method", interp_method, "exact | tilde | bar")->capture_default_str();
    interp->add_option("--forests", interp_forests, "forest count N")->capture_default_str();
    interp->add_option("--out", interp_out, "output csv")->capture_default_str();

    // ---- lp ----
    CommonFlags lp_flags;
    std::string lp_labels, lp_truth, lp_out = "lp.csv", lp_method = "exact";
    std::int64_t lp_forests = 100;
    auto* lp = app.add_subcommand("lp", "label propagation (harmonic classification)");
    add_common(lp, lp_flags);
    lp->add_option("--labels", lp_labels, "known labels file: `node class` lines")->required();
    lp->add_option("--truth", lp_truth, "ground-truth labels file for accuracy");
    lp->add_option("--method", lp_method, "exact | rsf")->capture_default_str();
    lp->add_option("--forests", lp_forests, "forest count N")->capture_default_str();
    lp->add_option("--out", lp_out, "classification csv")->capture_default_str();

    // ---- ssl ----
    CommonFlags ssl_flags;
    std::string ssl_labels, ssl_truth, ssl_out = "ssl.csv", ssl_method = "exact";
    double ssl_mu = 1.0, ssl_eta = 0.0;
    std::int64_t ssl_forests = 100;
    auto* ssl = app.add_subcommand("ssl", "generalized SSL classification");
    add_common(ssl, ssl_flags);
    ssl->add_option("--labels", ssl_labels, "known labels file: `node class` lines")->required();
    ssl->add_option("--truth", ssl_truth, "ground-truth labels file for accuracy");
    ssl->add_option("--mu", ssl_mu, "regularization")->capture_default_str();
    ssl->add_option("--eta", ssl_eta, "normalization exponent")->capture_default_str();
    ssl->add_option("--method", ssl_method, "exact | tilde | bar")->capture_default_str();
    ssl->add_option("--forests", ssl_forests, "forest count N")->capture_default_str();
    ssl->add_option("--out", ssl_out, "classification csv")->capture_default_str();

    // ---- newton ----
    CommonFlags newton_flags;
    std::string newton_image, newton_out = "newton.pgm", newton_trace = "newton_trace.csv",
                newton_method = "exact";
    double newton_mu = 0.5, newton_peak = 30.0;
    std::int64_t newton_forests = 100;
    auto* newton = app.add_subcommand("newton", "Poisson denoising via Newton's method");
    add_common(newton, newton_flags, false);
    newton->add_option("--image", newton_image, "input PGM; synthesized when omitted along with "
                                                "--graph grid spec")
        ->required();
    newton->add_option("--mu", newton_mu, "data-fidelity weight")->capture_default_str();
    newton->add_option("--peak", newton_peak, "intensity scale for the Poisson counts")
        ->capture_default_str();
    newton->add_option("--method", newton_method, "exact | bar")->capture_default_str();
    newton->add_option("--forests", newton_forests, "forests per update")->capture_default_str();
    newton->add_option("--out", newton_out, "denoised PGM")->capture_default_str();
    newton->add_option("--trace", newton_trace, "iteration trace csv")->capture_default_str();

    // ---- irls ----
    CommonFlags irls_flags;
    std::string irls_signal, irls_out = "irls.csv", irls_trace = "irls_trace.csv",
                irls_method = "exact", irls_norm = "printed";
    double irls_mu = 1.0, irls_eps = 0.0;
    int irls_iters = 100;
    std::int64_t irls_forests = 100;
    auto* irls = app.add_subcommand("irls", "l1 graph regularization via IRLS");
    add_common(irls, irls_flags);
    irls->add_option("--signal", irls_signal, "input signal csv")->required();
    irls->add_option("--mu", irls_mu, "data-fidelity weight")->capture_default_str();
    irls->add_option("--eps", irls_eps, "reweighting floor; 0 = auto")->capture_default_str();
    irls->add_option("--max-iters", irls_iters, "outer iterations")->capture_default_str();
    irls->add_option("--method", irls_method, "exact | bar")->capture_default_str();
    irls->add_option("--normalization", irls_norm, "printed | rescaled")->capture_default_str();
    irls->add_option("--forests", irls_forests, "forests per update")->capture_default_str();
    irls->add_option("--out", irls_out, "output csv")->capture_default_str();
    irls->add_option("--trace", irls_trace, "iteration trace csv")->capture_default_str();

    // ---- bench ----
    CommonFlags bench_flags;
    std::string bench_methods = "bar,cg,pcg,cheb", bench_sweep = "log:1:100:17",
                bench_out = "bench.csv";
    int bench_k = 5, bench_realizations = 20, bench_timing = 100;
    double bench_snr = 2.0;
    auto* bench = app.add_subcommand("bench", "error-vs-runtime benchmark over a method sweep");
    add_common(bench, bench_flags);
    bench->add_option("--methods", bench_methods, "comma list: bar,tilde,cg,pcg,cheb")
        ->capture_default_str();
    bench->add_option("--sweep", bench_sweep, "log:LO:HI:COUNT or comma list")
        ->capture_default_str();
    bench->add_option("--k", bench_k, "signal bandwidth")->capture_default_str();
    bench->add_option("--snr", bench_snr, "signal snr")->capture_default_str();
    bench->add_option("--realizations", bench_realizations, "signal realizations")
        ->capture_default_str();
    bench->add_option("--timing-runs", bench_timing, "timing repetitions")->capture_default_str();
    bench->add_option("--out", bench_out, "records csv")->capture_default_str();

    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(args);
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* active = app.get_subcommands().front();
    echo_config(active);

    if (smooth->parsed()) {
        Graph g = make_graph({smooth_flags.graph_spec}, smooth_flags.seed);
        Signal y = load_or_make_signal(g, smooth_signal, smooth_k, smooth_snr, smooth_flags.seed,
                                       nullptr);
        Signal out;
        if (smooth_estimator == "exact") {
            out = exact_smooth(g, DiagQ::scalar(g.num_nodes(), smooth_q), y);
        } else {
            auto est = estimate(g, DiagQ::scalar(g.num_nodes(), smooth_q), y,
                                parse_estimator(smooth_estimator), smooth_forests,
                                smooth_flags.seed, resolve_threads(smooth_flags.threads));
            out = est.values;
            std::cout << "# mean_root_count=" << est.mean_root_count << "\n";
        }
        save_signal_csv(smooth_out, out);
        std::cout << "# wrote " << smooth_out << "\n";
        return 0;
    }

    if (forest_cmd->parsed()) {
        Graph g = make_graph({forest_flags.graph_spec}, forest_flags.seed);
        Rng rng(forest_flags.seed, streams::forest_base);
        Forest f = sample_forest(g, DiagQ::scalar(g.num_nodes(), forest_q), rng);
        std::ofstream out(forest_out);
        if (!out) throw DataError("cannot open '" + forest_out + "'");
        write_forest_csv(out, f);
        std::cout << "# roots=" << f.roots.size() << " walk_steps=" << f.walk_steps << "\n"
                  << "# wrote " << forest_out << "\n";
        return 0;
    }

    if (tune->parsed()) {
        Graph g = make_graph({tune_flags.graph_spec}, tune_flags.seed);
        double sigma2 = tune_sigma2;
        Signal y =
            load_or_make_signal(g, tune_signal, tune_k, tune_snr, tune_flags.seed,
                                tune_sigma2 > 0.0 ? nullptr : &sigma2);
        TuneMethod method;
        if (tune_method == "sure") method = TuneMethod::sure_exact;
        else if (tune_method == "sure-rsf") method = TuneMethod::sure_rsf;
        else if (tune_method == "loocv") method = TuneMethod::loocv_exact;
        else if (tune_method == "loocv-rsf") method = TuneMethod::loocv_rsf;
        else throw UsageError("tune: unknown method '" + tune_method + "'");
        TuneParams params;
        params.sigma2 = sigma2;
        params.estimator = parse_estimator(tune_estimator == "exact" ? "bar" : tune_estimator);
        params.n_forests = tune_forests;
        params.seed = tune_flags.seed;
        params.threads = resolve_threads(tune_flags.threads);
        TuningResult result = grid_search(g, y, parse_grid(tune_grid), method, params);
        std::ofstream out(tune_out);
        if (!out) throw DataError("cannot open '" + tune_out + "'");
        write_tuning_csv(out, result);
        std::cout << "# best=" << result.best() << "\n# wrote " << tune_out << "\n";
        return 0;
    }

    if (interp->parsed()) {
        Graph g = make_graph({interp_flags.graph_spec}, interp_flags.seed);
        auto known = load_partial_signal_csv(interp_known);
        std::vector<std::int32_t> nodes;
        std::vector<double> values;
        for (auto [node, value] : known) {
            nodes.push_back(node);
            values.push_back(value);
        }
        InterpolateOptions opts;
        opts.mu = interp_mu;
        opts.method = parse_method(interp_method);
        opts.n_forests = interp_forests;
        opts.seed = interp_flags.seed;
        opts.threads = resolve_threads(interp_flags.threads);
        Signal out = interpolate(g, nodes, values, opts);
        save_signal_csv(interp_out, out);
        std::cout << "# wrote " << interp_out << "\n";
        return 0;
    }

    if (lp->parsed()) {
        Graph g = make_graph({lp_flags.graph_spec}, lp_flags.seed);
        auto labels = load_labels(lp_labels, g.num_nodes());
        auto problem = LabeledProblem::from_labels(g.num_nodes(), labels);
        auto method = lp_method == "rsf" ? SolveMethod::bar : parse_method(lp_method);
        auto result = label_propagate(g, problem, method, lp_forests, lp_flags.seed,
                                      resolve_threads(lp_flags.threads));
        std::ofstream out(lp_out);
        if (!out) throw DataError("cannot open '" + lp_out + "'");
        write_classification_csv(out, result);
        if (!lp_truth.empty()) {
            auto truth = load_labels(lp_truth, g.num_nodes());
            std::cout << "# accuracy=" << accuracy(result, truth, problem.labeled_mask()) << "\n";
        }
        std::cout << "# wrote " << lp_out << "\n";
        return 0;
    }

    if (ssl->parsed()) {
        Graph g = make_graph({ssl_flags.graph_spec}, ssl_flags.seed);
        auto labels = load_labels(ssl_labels, g.num_nodes());
        auto problem = LabeledProblem::from_labels(g.num_nodes(), labels);
        auto result = generalized_ssl(g, problem, ssl_mu, ssl_eta, parse_method(ssl_method),
                                      ssl_forests, ssl_flags.seed,
                                      resolve_threads(ssl_flags.threads));
        std::ofstream out(ssl_out);
        if (!out) throw DataError("cannot open '" + ssl_out + "'");
        write_classification_csv(out, result);
        if (!ssl_truth.empty()) {
            auto truth = load_labels(ssl_truth, g.num_nodes());
            std::cout << "# accuracy=" << accuracy(result, truth, problem.labeled_mask()) << "\n";
        }
        std::cout << "# wrote " << ssl_out << "\n";
        return 0;
    }

    if (newton->parsed()) {
        PgmImage img = load_pgm(newton_image);
        Signal intensity(img.values.size());
        for (std::size_t i = 0; i < intensity.size(); ++i)
            intensity[i] = img.values[i] * newton_peak;
        Rng rng(newton_flags.seed, streams::noise);
        Signal counts(intensity.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            counts[i] = static_cast<double>(rng.poisson(intensity[i]));
        auto rep = run_denoise_poisson(img.grid, intensity, counts, newton_mu, newton_forests,
                                       newton_flags.seed, resolve_threads(newton_flags.threads));
        const bool exact = newton_method == "exact";
        const Signal& t = exact ? rep.t_exact : rep.t_bar;
        Signal denoised(t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            denoised[i] = std::exp(t[i]) / newton_peak;
        save_pgm(newton_out, img.rows, img.cols, denoised);
        std::ofstream trace(newton_trace);
        if (!trace) throw DataError("cannot open '" + newton_trace + "'");
        write_trace_csv(trace, exact ? rep.trace_exact : rep.trace_bar);
        std::cout << "# psnr_noisy=" << rep.psnr_noisy << " psnr_exact=" << rep.psnr_exact
                  << " psnr_bar=" << rep.psnr_bar << "\n# wrote " << newton_out << " and "
                  << newton_trace << "\n";
        return 0;
    }

    if (irls->parsed()) {
        Graph g = make_graph({irls_flags.graph_spec}, irls_flags.seed);
        Signal y = load_signal_csv(irls_signal);
        if (y.size() != static_cast<std::size_t>(g.num_nodes()))
            throw DataError("irls: signal length does not match graph size");
        IrlsOptions opts;
        opts.mu = irls_mu;
        opts.eps = irls_eps;
        opts.max_iters = irls_iters;
        opts.method = parse_method(irls_method);
        opts.normalization = irls_norm == "rescaled" ? IrlsNormalization::rescaled
                                                     : IrlsNormalization::printed;
        opts.n_forests = irls_forests;
        opts.seed = irls_flags.seed;
        opts.threads = resolve_threads(irls_flags.threads);
        auto [z, tr] = irls_l1(g, y, opts);
        save_signal_csv(irls_out, z);
        std::ofstream trace(irls_trace);
        if (!trace) throw DataError("cannot open '" + irls_trace + "'");
        write_trace_csv(trace, tr);
        std::cout << "# converged=" << (tr.converged ? "yes" : "no") << "\n# wrote " << irls_out
                  << " and " << irls_trace << "\n";
        return 0;
    }

    if (bench->parsed()) {
        BenchConfig cfg;
        cfg.graph_spec = bench_flags.graph_spec;
        cfg.k = bench_k;
        cfg.snr = bench_snr;
        cfg.signal_realizations = bench_realizations;
        cfg.timing_runs = bench_timing;
        cfg.seed = bench_flags.seed;
        cfg.threads = bench_flags.threads > 0 ? bench_flags.threads : 1;
        cfg.sweep = parse_sweep(bench_sweep);
        cfg.methods.clear();
        std::stringstream ms(bench_methods);
        std::string tok;
        while (std::getline(ms, tok, ',')) cfg.methods.push_back(tok);
        auto records = run_bench(cfg, &std::cout);
        std::ofstream out(bench_out);
        if (!out) throw DataError("cannot open '" + bench_out + "'");
        write_bench_csv(out, records);
        std::cout << "# wrote " << bench_out << " (" << records.size() << " records)\n";
        return 0;
    }

    throw UsageError("no subcommand executed");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rsf::Error& e) {
        const char* cls = e.error_class() == rsf::ErrorClass::usage       ? "config"
                          : e.error_class() == rsf::ErrorClass::data      ? "data"
                          : e.error_class() == rsf::ErrorClass::numeric   ? "numeric"
                                                                          : "capability";
        std::cerr << "error(" << cls << "): " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error(numeric): " << e.what() << "\n";
        return 4;
    }
}
