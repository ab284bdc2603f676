#ifndef RSF_TASKS_HPP
#define RSF_TASKS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "rsf/forest.hpp"
#include "rsf/graph.hpp"

namespace rsf {

enum class SolveMethod { exact, tilde, bar };

// Known class ids on a subset of nodes plus the one-hot prior matrix they
// induce; rows of unlabeled nodes are all zero.
struct LabeledProblem {
    std::int32_t n = 0;
    std::int32_t num_classes = 0;
    std::vector<std::pair<std::int32_t, int>> labels;  // (node, class)

    static LabeledProblem from_labels(std::int32_t n, std::span<const int> per_node_class);

    std::vector<std::int32_t> labeled_nodes() const;
    std::vector<std::uint8_t> labeled_mask() const;
    // One column per class, one-hot on the labeled nodes.
    std::vector<Signal> one_hot_columns() const;
};

struct ClassificationResult {
    std::vector<Signal> F;        // one classification function per class
    std::vector<int> assigned;    // argmax class per node, ties toward smaller index
};

// `node,assigned,score_0,...` rows.
void write_classification_csv(std::ostream& out, const ClassificationResult& result);

struct IterateTrace {
    struct Row {
        int iter;
        double loss;
        double alpha;
        double update_norm;
    };
    std::vector<Row> rows;
    bool converged = false;
    bool clamped = false;  // Newton iterates hit the exp-overflow clamp
};

// `iter,loss,alpha,update_norm` rows.
void write_trace_csv(std::ostream& out, const IterateTrace& trace);

struct InterpolateOptions {
    double mu = 0.0;
    SolveMethod method = SolveMethod::exact;
    std::int64_t n_forests = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    // When mu = 0 and some unlabeled node has no labeled neighbour, the
    // reduced-graph form is singular; route such RSF requests through the
    // absorbing-walk estimator instead of failing.
    bool allow_dirichlet_fallback = true;
};

// Fixes x on the labeled set and extends it to the rest of the graph by
// minimizing z'(L + mu I)z; unknown entries solve the reduced system
// (L_red + Q) x_u = b with Q_ii = mu + sum of weights to labeled neighbours.
Signal interpolate(const Graph& g, std::span<const std::int32_t> labeled_nodes,
                   std::span<const double> x_labeled, const InterpolateOptions& opts);

// Harmonic extension of the one-hot labels (Dirichlet problem per class).
// rsf mode absorbs walks exactly on the labeled set and propagates each root's
// label down its tree.
ClassificationResult label_propagate(const Graph& g, const LabeledProblem& problem,
                                     SolveMethod method, std::int64_t n_forests = 100,
                                     std::uint64_t seed = 1, int threads = 0);

// Power-iteration cross-check of the harmonic solution: F <- D^(-1) W F with
// labeled rows clamped to Y.
ClassificationResult label_propagate_power(const Graph& g, const LabeledProblem& problem,
                                           int max_iters = 20000, double tol = 1e-10);

// f_c = D^(1-eta) K D^(eta-1) y_c with Q = (mu/2) D; all classes share forests.
ClassificationResult generalized_ssl(const Graph& g, const LabeledProblem& problem, double mu,
                                     double eta, SolveMethod method, std::int64_t n_forests = 100,
                                     std::uint64_t seed = 1, int threads = 0);

struct NewtonOptions {
    double mu = 1.0;
    SolveMethod method = SolveMethod::exact;  // exact or bar
    std::int64_t n_forests = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    double alpha0 = 1.0;
    double shrink = 0.5;
    double armijo_c = 1e-4;
    int max_halvings = 30;
    double tol = 1e-9;
    int max_iters = 100;
};

// Newton's method with backtracking line search on the graph-regularized
// Poisson deviance
//   loss(t) = mu sum_i (exp(t_i) - y_i t_i + y_i log y_i - y_i) + t'Lt/2,
// update direction (mu diag(exp t) + L)^(-1) (mu exp(t) - mu y + L t) computed
// exactly or as the bar estimate with Q = mu diag(exp t).
std::pair<Signal, IterateTrace> newton_poisson(const Graph& g, const Signal& y,
                                               const NewtonOptions& opts);

enum class IrlsNormalization {
    printed,   // z+ = (2 mu I + B'MB)^(-1) mu y; constants are fixed points at y/2
    rescaled,  // z+ = (2 mu I + B'MB)^(-1) 2 mu y; constants are fixed points at y
};

struct IrlsOptions {
    double mu = 1.0;
    SolveMethod method = SolveMethod::exact;  // exact or bar
    std::int64_t n_forests = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    double eps = 0.0;  // 0: 1e-8 * median initial |Bz|, floored at 1e-12
    int max_iters = 100;
    double tol = 1e-9;
    IrlsNormalization normalization = IrlsNormalization::printed;
    const Signal* z0 = nullptr;  // defaults to y
};

// Iteratively reweighted least squares for mu||y-z||^2 + ||Bz||_1 via
// M_k = diag(max(|Bz_k|, eps))^(-1): each update is a Tikhonov solve on the
// graph reweighted to w_e / max(|Bz_k|_e, eps). The trace records the
// eps-smoothed majorize-minimize objective matching the chosen normalization,
// which is nonincreasing along exact iterates.
std::pair<Signal, IterateTrace> irls_l1(const Graph& g, const Signal& y, const IrlsOptions& opts);

// Smoothed objective evaluated by the IRLS trace (exposed for tests).
double irls_surrogate(const Graph& g, const Signal& y, const Signal& z, double mu, double eps,
                      IrlsNormalization normalization);

// 10 log10(peak^2 n / ||x - ref||^2); +infinity at zero error.
double psnr(const Signal& x, const Signal& x_ref, double peak = 1.0);

// Fraction of correct assignments over unlabeled nodes only.
double accuracy(const ClassificationResult& result, std::span<const int> ground_truth,
                std::span<const std::uint8_t> labeled_mask);

// Accuracy of assigning the most frequent ground-truth class to every
// unlabeled node.
double constant_classifier_accuracy(std::span<const int> ground_truth,
                                    std::span<const std::uint8_t> labeled_mask);

}  // namespace rsf

#endif
