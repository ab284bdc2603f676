#ifndef RSF_BENCH_HPP
#define RSF_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsf/graph.hpp"
#include "rsf/tasks.hpp"
#include "rsf/tuning.hpp"

namespace rsf {

// Error-vs-runtime methodology: k-bandlimited signal plus Gaussian noise,
// q tuned per realization to minimize ||x - x_hat||, every method swept over
// an iteration parameter, error sampling and timing collected from separate
// runs.
struct BenchConfig {
    std::string graph_spec = "grid:100x100:periodic";
    int k = 5;
    double snr = 2.0;
    std::vector<std::string> methods = {"bar", "cg", "pcg", "cheb"};  // also "tilde"
    std::vector<int> sweep;            // iteration parameters; empty = log:1:100:17
    int signal_realizations = 20;
    int timing_runs = 100;
    std::uint64_t seed = 1;
    int threads = 1;                   // timing parity with single-threaded runs
    std::vector<double> q_grid;        // empty = log-spaced 1e-3..100, 25 points
};

struct BenchRecord {
    std::string graph;
    std::string method;
    int param = 0;
    double approx_err = 0.0;  // mean ||x_hat - x*||_2
    double recon_err = 0.0;   // mean ||x - x*||_2
    double time_s = 0.0;
    double pre_s = 0.0;
    int n_runs = 0;
};

std::vector<BenchRecord> run_bench(const BenchConfig& cfg, std::ostream* log = nullptr);

// `graph,method,param,approx_err,recon_err,time_s,pre_s,n_runs` rows.
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);

// "log:LO:HI:COUNT" (strictly increasing rounded geometric spacing) or a
// comma-separated integer list.
std::vector<int> parse_sweep(const std::string& text);

// Gaussian image denoising: mu tuned by SURE separately for the exact smoother
// and both RSF estimators.
struct DenoiseGaussianReport {
    TuningResult exact, tilde, bar;   // per-method SURE sweeps
    Signal denoised_exact, denoised_tilde, denoised_bar;
    double psnr_noisy = 0.0, psnr_exact = 0.0, psnr_tilde = 0.0, psnr_bar = 0.0;
};
DenoiseGaussianReport run_denoise_gaussian(const Graph& g, const Signal& x_true, const Signal& y,
                                           double sigma2, const std::vector<double>& mu_grid,
                                           std::int64_t n_forests, std::uint64_t seed,
                                           int threads = 0, double peak = 1.0);

// Poisson denoising through Newton's method with exact and bar updates.
struct DenoisePoissonReport {
    Signal t_exact, t_bar;            // log-intensity iterates
    IterateTrace trace_exact, trace_bar;
    double psnr_noisy = 0.0, psnr_exact = 0.0, psnr_bar = 0.0;
};
DenoisePoissonReport run_denoise_poisson(const Graph& g, const Signal& x_intensity,
                                         const Signal& y_counts, double mu,
                                         std::int64_t n_forests, std::uint64_t seed,
                                         int threads = 0);

// SSL accuracy experiment: m labels per class drawn at random, gSSL's mu tuned
// by LOOCV separately for the exact and RSF routes (on the first draw), label
// propagation run exactly and through absorbing forests, accuracies averaged
// over the label draws.
struct SslConfig {
    int m_per_class = 5;
    int repetitions = 10;
    std::int64_t n_forests_lp = 20;
    std::int64_t n_forests_gssl = 200;
    std::vector<double> mu_grid = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
    double eta = 0.0;
    std::uint64_t seed = 1;
    int threads = 0;
};
struct SslReport {
    struct Row {
        std::string method;
        double mean_accuracy = 0.0;
        double stderr_accuracy = 0.0;
    };
    std::vector<Row> rows;
    double mu_exact = 0.0;
    double mu_rsf = 0.0;
};
SslReport run_ssl(const Graph& g, const std::vector<int>& ground_truth, const SslConfig& cfg,
                  std::ostream* log = nullptr);

}  // namespace rsf

#endif
