#include "rsf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "rsf/baselines.hpp"
#include "rsf/graph_gen.hpp"
#include "rsf/smoother.hpp"
#include "rsf/spectrum.hpp"

namespace rsf {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

double l2_dist(const Signal& a, const Signal& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Signal reference_smooth(const Graph& g, double q, const Signal& y) {
    CgOptions opts;
    opts.tol = 1e-10;
    opts.max_iters = 20 * g.num_nodes();
    opts.precond = CgPrecond::jacobi;
    return cg_solve(g, DiagQ::scalar(g.num_nodes(), q), y, opts).x;
}

std::vector<double> default_q_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 24; ++i) grid.push_back(std::pow(10.0, -3.0 + 5.0 * i / 24.0));
    return grid;
}

struct MethodRun {
    Signal x;
};

// One run of a swept method at the given iteration parameter.
MethodRun run_method(const std::string& method, const Graph& g, double q, const Signal& y,
                     int param, const FilterSpec* cheb, std::uint64_t seed, int threads) {
    if (method == "bar" || method == "tilde") {
        const Estimator kind = method == "bar" ? Estimator::bar : Estimator::tilde;
        return {estimate(g, DiagQ::scalar(g.num_nodes(), q), y, kind, param, seed, threads).values};
    }
    if (method == "cg" || method == "pcg") {
        CgOptions opts;
        opts.max_iters = param;
        opts.tol = 0.0;
        opts.precond = method == "pcg" ? CgPrecond::jacobi : CgPrecond::none;
        return {cg_solve(g, DiagQ::scalar(g.num_nodes(), q), y, opts).x};
    }
    if (method == "cheb") {
        FilterSpec spec = *cheb;
        spec.degree = param;
        spec.coefficients.clear();
        // Reuse the precomputed interval; refit coefficients for this degree.
        FilterSpec fresh = spec;
        {
            const int m = param + 1;
            fresh.coefficients.assign(m, 0.0);
            std::vector<double> h(m);
            for (int j = 0; j < m; ++j) {
                const double lam = (std::cos(M_PI * (j + 0.5) / m) + 1.0) * spec.b / 2.0;
                h[j] = spec.q / (spec.q + lam);
            }
            for (int k = 0; k < m; ++k) {
                double acc = 0.0;
                for (int j = 0; j < m; ++j) acc += h[j] * std::cos(k * M_PI * (j + 0.5) / m);
                fresh.coefficients[k] = 2.0 * acc / m;
            }
        }
        return {chebyshev_apply(g, fresh, y)};
    }
    throw UsageError("run_bench: unknown method '" + method + "'");
}

}  // namespace

std::vector<int> parse_sweep(const std::string& text) {
    std::vector<int> out;
    if (text.rfind("log:", 0) == 0) {
        std::stringstream ss(text.substr(4));
        std::string tok;
        std::vector<long> f;
        while (std::getline(ss, tok, ':')) f.push_back(std::stol(tok));
        if (f.size() != 3) throw UsageError("sweep: expected log:LO:HI:COUNT");
        const long lo = f[0], hi = f[1], count = f[2];
        if (lo < 1 || hi < lo || count < 1) throw UsageError("sweep: bad log range");
        long prev = 0;
        for (long i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            long v = std::lround(std::exp(std::log(static_cast<double>(lo)) +
                                          t * (std::log(static_cast<double>(hi)) -
                                               std::log(static_cast<double>(lo)))));
            v = std::max(v, prev + 1);
            out.push_back(static_cast<int>(v));
            prev = v;
        }
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) throw UsageError("sweep: empty");
    return out;
}

std::vector<BenchRecord> run_bench(const BenchConfig& cfg, std::ostream* log) {
    const std::vector<int> sweep = cfg.sweep.empty() ? parse_sweep("log:1:100:17") : cfg.sweep;
    const std::vector<double> q_grid = cfg.q_grid.empty() ? default_q_grid() : cfg.q_grid;
    for (int p : sweep)
        if (p < 1) throw UsageError("run_bench: sweep values must be positive");

    Graph g = make_graph({cfg.graph_spec}, cfg.seed);
    if (log) *log << "# graph " << cfg.graph_spec << " n=" << g.num_nodes()
                  << " m=" << g.num_edges() << "\n";

    const std::string label_suffix = cfg.threads == 1 ? "" : "@mt" + std::to_string(cfg.threads);

    // Chebyshev preprocessing (interval estimate) is q-independent; time it once.
    bool wants_cheb = false;
    for (const auto& m : cfg.methods) wants_cheb = wants_cheb || m == "cheb";
    double cheb_pre_s = 0.0;
    FilterSpec cheb_base;
    if (wants_cheb) {
        const double t0 = now_seconds();
        cheb_base.b = lambda_max_estimate(g);
        cheb_pre_s = now_seconds() - t0;
        cheb_base.degree = 1;
    }

    struct Accum {
        double approx = 0.0;
        double recon = 0.0;
        int runs = 0;
    };
    std::map<std::pair<std::string, int>, Accum> acc;

    // Error pass: per realization, tune q, then run every method x parameter.
    std::vector<double> tuned_q(cfg.signal_realizations);
    std::vector<Signal> first_y;
    double exact_recon_mean = 0.0;
    for (int r = 0; r < cfg.signal_realizations; ++r) {
        const std::uint64_t rseed = cfg.seed + 0x9E3779B97F4A7C15ULL * (r + 1);
        auto sig = bandlimited_signal(g, cfg.k, cfg.snr, rseed);
        double best_q = q_grid.front();
        double best_err = std::numeric_limits<double>::infinity();
        Signal best_xhat;
        for (double q : q_grid) {
            Signal xhat = reference_smooth(g, q, sig.y);
            const double err = l2_dist(sig.x, xhat);
            if (err < best_err) {
                best_err = err;
                best_q = q;
                best_xhat = std::move(xhat);
            }
        }
        tuned_q[r] = best_q;
        exact_recon_mean += best_err / cfg.signal_realizations;
        if (log) *log << "# realization " << r << " q*=" << best_q << " |x-xhat|=" << best_err
                      << "\n";
        if (r == 0) first_y.push_back(sig.y);

        for (const auto& method : cfg.methods) {
            FilterSpec cheb = cheb_base;
            cheb.q = best_q;
            for (int p : sweep) {
                const std::uint64_t mseed = rseed + 0xD2B74407ULL * (p + 1);
                MethodRun run = run_method(method, g, best_q, sig.y, p, &cheb, mseed, cfg.threads);
                auto& a = acc[{method, p}];
                a.approx += l2_dist(best_xhat, run.x);
                a.recon += l2_dist(sig.x, run.x);
                a.runs += 1;
            }
        }
    }

    // Timing pass on the first realization, separate from error sampling.
    std::map<std::pair<std::string, int>, double> time_s;
    for (const auto& method : cfg.methods) {
        FilterSpec cheb = cheb_base;
        cheb.q = tuned_q[0];
        for (int p : sweep) {
            const double t0 = now_seconds();
            for (int rep = 0; rep < cfg.timing_runs; ++rep) {
                MethodRun run = run_method(method, g, tuned_q[0], first_y[0], p, &cheb,
                                           cfg.seed + rep, cfg.threads);
                (void)run;
            }
            time_s[{method, p}] = (now_seconds() - t0) / std::max(1, cfg.timing_runs);
        }
    }

    std::vector<BenchRecord> records;
    for (const auto& method : cfg.methods) {
        for (int p : sweep) {
            const auto& a = acc.at({method, p});
            BenchRecord rec;
            rec.graph = cfg.graph_spec;
            rec.method = method + label_suffix;
            rec.param = p;
            rec.approx_err = a.approx / a.runs;
            rec.recon_err = a.recon / a.runs;
            rec.time_s = time_s.at({method, p});
            rec.pre_s = method == "cheb" ? cheb_pre_s : 0.0;
            rec.n_runs = a.runs;
            records.push_back(rec);
        }
    }

    // Exact-solve reference line: time once per graph.
    {
        const double t0 = now_seconds();
        Signal xhat = reference_smooth(g, tuned_q[0], first_y[0]);
        (void)xhat;
        BenchRecord rec;
        rec.graph = cfg.graph_spec;
        rec.method = "exact_ref" + label_suffix;
        rec.param = 0;
        rec.approx_err = 0.0;
        rec.recon_err = exact_recon_mean;
        rec.time_s = now_seconds() - t0;
        rec.pre_s = 0.0;
        rec.n_runs = 1;
        records.push_back(rec);
    }
    return records;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "graph,method,param,approx_err,recon_err,time_s,pre_s,n_runs\n";
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, ",%d,%.17g,%.17g,%.6e,%.6e,%d\n", r.param, r.approx_err,
                      r.recon_err, r.time_s, r.pre_s, r.n_runs);
        out << r.graph << ',' << r.method << buf;
    }
}

DenoiseGaussianReport run_denoise_gaussian(const Graph& g, const Signal& x_true, const Signal& y,
                                           double sigma2, const std::vector<double>& mu_grid,
                                           std::int64_t n_forests, std::uint64_t seed, int threads,
                                           double peak) {
    if (!(sigma2 > 0.0)) throw UsageError("run_denoise_gaussian: sigma2 must be known and positive");
    DenoiseGaussianReport rep;
    TuneParams params;
    params.sigma2 = sigma2;
    params.n_forests = n_forests;
    params.seed = seed;
    params.threads = threads;
    params.keep_estimates = true;

    rep.exact = grid_search(g, y, mu_grid, TuneMethod::sure_exact, params);
    rep.denoised_exact =
        exact_smooth(g, DiagQ::scalar(g.num_nodes(), rep.exact.best()), y);

    params.estimator = Estimator::tilde;
    rep.tilde = grid_search(g, y, mu_grid, TuneMethod::sure_rsf, params);
    rep.denoised_tilde = rep.tilde.estimates[rep.tilde.best_index].values;

    params.estimator = Estimator::bar;
    rep.bar = grid_search(g, y, mu_grid, TuneMethod::sure_rsf, params);
    rep.denoised_bar = rep.bar.estimates[rep.bar.best_index].values;

    rep.psnr_noisy = psnr(y, x_true, peak);
    rep.psnr_exact = psnr(rep.denoised_exact, x_true, peak);
    rep.psnr_tilde = psnr(rep.denoised_tilde, x_true, peak);
    rep.psnr_bar = psnr(rep.denoised_bar, x_true, peak);
    return rep;
}

DenoisePoissonReport run_denoise_poisson(const Graph& g, const Signal& x_intensity,
                                         const Signal& y_counts, double mu,
                                         std::int64_t n_forests, std::uint64_t seed, int threads) {
    DenoisePoissonReport rep;
    NewtonOptions opts;
    opts.mu = mu;
    opts.n_forests = n_forests;
    opts.seed = seed;
    opts.threads = threads;

    opts.method = SolveMethod::exact;
    std::tie(rep.t_exact, rep.trace_exact) = newton_poisson(g, y_counts, opts);
    opts.method = SolveMethod::bar;
    std::tie(rep.t_bar, rep.trace_bar) = newton_poisson(g, y_counts, opts);

    double peak = 0.0;
    for (double v : x_intensity) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;
    Signal exp_exact(rep.t_exact.size()), exp_bar(rep.t_bar.size());
    for (std::size_t i = 0; i < exp_exact.size(); ++i) {
        exp_exact[i] = std::exp(rep.t_exact[i]);
        exp_bar[i] = std::exp(rep.t_bar[i]);
    }
    rep.psnr_noisy = psnr(y_counts, x_intensity, peak);
    rep.psnr_exact = psnr(exp_exact, x_intensity, peak);
    rep.psnr_bar = psnr(exp_bar, x_intensity, peak);
    return rep;
}

namespace {

// LOOCV over the labeled set, summed across one-hot classes; diag holds the
// smoother diagonal surrogate.
double ssl_loocv(const std::vector<Signal>& F, const std::vector<Signal>& Y,
                 const std::vector<std::int32_t>& labeled, const std::vector<double>& diag) {
    double acc = 0.0;
    for (auto i : labeled) {
        const double kii = diag[i];
        if (kii >= 1.0 - 1e-9)
            throw NumericError("ssl loocv: degenerate diagonal at node " + std::to_string(i));
        for (std::size_t c = 0; c < F.size(); ++c) {
            const double r = (F[c][i] - Y[c][i]) / (1.0 - kii);
            acc += r * r;
        }
    }
    return acc / static_cast<double>(labeled.size());
}

LabeledProblem draw_problem(const std::vector<int>& truth, std::int32_t n, int num_classes,
                            int m_per_class, Rng& rng) {
    std::vector<int> per_node(n, -1);
    for (int c = 0; c < num_classes; ++c) {
        std::vector<std::int32_t> members;
        for (std::int32_t i = 0; i < n; ++i)
            if (truth[i] == c) members.push_back(i);
        const int take = std::min<int>(m_per_class, static_cast<int>(members.size()));
        for (int t = 0; t < take; ++t) {
            const auto j = t + static_cast<std::size_t>(rng.below(members.size() - t));
            std::swap(members[t], members[j]);
            per_node[members[t]] = c;
        }
    }
    return LabeledProblem::from_labels(n, per_node);
}

}  // namespace

SslReport run_ssl(const Graph& g, const std::vector<int>& ground_truth, const SslConfig& cfg,
                  std::ostream* log) {
    const std::int32_t n = g.num_nodes();
    if (ground_truth.size() != static_cast<std::size_t>(n))
        throw DimensionError("run_ssl: ground truth length does not match node count");
    int num_classes = 0;
    for (int c : ground_truth) num_classes = std::max(num_classes, c + 1);
    if (num_classes < 2) throw UsageError("run_ssl: need at least two classes");

    SslReport rep;
    std::map<std::string, std::vector<double>> accs;

    for (int r = 0; r < cfg.repetitions; ++r) {
        Rng rng(cfg.seed + r, streams::labels);
        LabeledProblem problem = draw_problem(ground_truth, n, num_classes, cfg.m_per_class, rng);
        auto mask = problem.labeled_mask();
        auto labeled = problem.labeled_nodes();
        auto Y = problem.one_hot_columns();

        if (r == 0) {
            // Tune gSSL's mu by LOOCV, separately per route, on the first draw.
            double best_exact = cfg.mu_grid.front(), best_exact_score = 1e300;
            double best_rsf = cfg.mu_grid.front(), best_rsf_score = 1e300;
            for (double mu : cfg.mu_grid) {
                try {
                    auto exact = generalized_ssl(g, problem, mu, cfg.eta, SolveMethod::exact);
                    std::vector<double> qv(n);
                    for (std::int32_t i = 0; i < n; ++i) qv[i] = 0.5 * mu * g.degree_sum(i);
                    DenseOracle oracle = DenseOracle::build(g, DiagQ::per_node(std::move(qv)));
                    std::vector<double> diag(n);
                    for (std::int32_t i = 0; i < n; ++i) diag[i] = oracle.K(i, i);
                    const double s = ssl_loocv(exact.F, Y, labeled, diag);
                    if (s < best_exact_score) {
                        best_exact_score = s;
                        best_exact = mu;
                    }
                } catch (const NumericError&) {
                }
                try {
                    std::vector<double> qv(n);
                    for (std::int32_t i = 0; i < n; ++i) qv[i] = 0.5 * mu * g.degree_sum(i);
                    std::vector<Signal> scaled(Y.size(), Signal(n));
                    for (std::size_t c = 0; c < Y.size(); ++c)
                        for (std::int32_t i = 0; i < n; ++i)
                            scaled[c][i] = std::pow(g.degree_sum(i), cfg.eta - 1.0) * Y[c][i];
                    MultiSmooth ms = smooth_columns(g, DiagQ::per_node(std::move(qv)), scaled,
                                                    Estimator::bar, cfg.n_forests_gssl,
                                                    cfg.seed + 977, cfg.threads);
                    std::vector<Signal> F(ms.values);
                    for (std::size_t c = 0; c < F.size(); ++c)
                        for (std::int32_t i = 0; i < n; ++i)
                            F[c][i] *= std::pow(g.degree_sum(i), 1.0 - cfg.eta);
                    const double s = ssl_loocv(F, Y, labeled, ms.diag);
                    if (s < best_rsf_score) {
                        best_rsf_score = s;
                        best_rsf = mu;
                    }
                } catch (const NumericError&) {
                }
            }
            rep.mu_exact = best_exact;
            rep.mu_rsf = best_rsf;
            if (log) *log << "# gssl mu: exact=" << rep.mu_exact << " rsf=" << rep.mu_rsf << "\n";
        }

        auto record = [&](const std::string& name, const ClassificationResult& res) {
            accs[name].push_back(accuracy(res, ground_truth, mask));
        };
        record("lp_exact", label_propagate(g, problem, SolveMethod::exact));
        record("lp_rsf", label_propagate(g, problem, SolveMethod::bar, cfg.n_forests_lp,
                                         cfg.seed + 31 * r, cfg.threads));
        record("gssl_exact",
               generalized_ssl(g, problem, rep.mu_exact, cfg.eta, SolveMethod::exact));
        record("gssl_bar", generalized_ssl(g, problem, rep.mu_rsf, cfg.eta, SolveMethod::bar,
                                           cfg.n_forests_gssl, cfg.seed + 37 * r, cfg.threads));
        accs["constant"].push_back(constant_classifier_accuracy(ground_truth, mask));
        if (log) *log << "# draw " << r << " done\n";
    }

    for (const auto& [name, values] : accs) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= values.size();
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var = values.size() > 1 ? var / (values.size() - 1) : 0.0;
        rep.rows.push_back({name, mean, std::sqrt(var / values.size())});
    }
    return rep;
}

}  // namespace rsf
