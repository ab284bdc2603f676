#ifndef RSF_FOREST_HPP
#define RSF_FOREST_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rsf/graph.hpp"
#include "rsf/rng.hpp"

namespace rsf {

constexpr std::int32_t kNoNext = -1;

// Per-node nonnegative absorption weights q_i; scalar shorthand means q_i = q
// for all i. At least one q_i must be positive so the extended graph (original
// plus the absorption node) stays connected.
class DiagQ {
public:
    static DiagQ scalar(std::int32_t n, double q);
    static DiagQ per_node(std::vector<double> q);

    std::int32_t size() const { return n_; }
    bool is_scalar() const { return is_scalar_; }
    double scalar_value() const { return scalar_; }
    double operator[](std::int32_t i) const { return is_scalar_ ? scalar_ : values_[i]; }
    double sum() const;
    double max_value() const;

    // Throws unless every component of g contains a positive q_i.
    void validate_for(const Graph& g) const;

private:
    std::int32_t n_ = 0;
    bool is_scalar_ = true;
    double scalar_ = 0.0;
    std::vector<double> values_;
};

// One rooted spanning forest: next-pointers toward the roots plus derived
// per-node root/tree assignments and per-tree q-mass.
struct Forest {
    std::vector<std::int32_t> next;     // kNoNext at roots
    std::vector<std::int32_t> root_of;  // terminal of the next-chain
    std::vector<std::int32_t> tree_id;
    std::vector<std::int32_t> roots;
    std::vector<double> tree_qmass;     // sum of q over each tree
    std::int64_t walk_steps = 0;        // random-successor-equivalent draws used

    std::int32_t num_trees() const { return static_cast<std::int32_t>(roots.size()); }
};

// Reusable buffers for the sampling loop; one per thread.
struct ForestWorkspace {
    std::vector<std::int32_t> next;
    std::vector<std::int32_t> root_of;
    std::vector<std::int32_t> tree_id;
    std::vector<double> tree_qmass;
    std::vector<std::int32_t> roots;
    std::vector<std::uint8_t> in_forest;
    std::vector<std::int32_t> chain;
    std::int64_t walk_steps = 0;
};

// Wilson-style loop-erased sampling of the rooted-forest distribution
//   P(phi) ~ prod_{i in roots} q_i * prod_{(i,j) in phi} w(i,j).
// At node u one uniform draw on [0, q_u + d_u) decides between absorption
// (u becomes a root) and stepping to a neighbour picked proportionally to the
// edge weights. step_budget aborts pathological configurations.
void sample_forest_into(const Graph& g, const DiagQ& q, Rng& rng, ForestWorkspace& ws,
                        std::int64_t step_budget = 1'000'000'000);
Forest sample_forest(const Graph& g, const DiagQ& q, Rng& rng,
                     std::int64_t step_budget = 1'000'000'000);

// Absorption exactly on reaching a node of `absorbing` (the q_i = infinity
// limit there, q = 0 elsewhere); walks never self-absorb outside the set.
// Every root lies in the absorbing set.
void sample_forest_absorbing_into(const Graph& g, std::span<const std::uint8_t> absorbing,
                                  Rng& rng, ForestWorkspace& ws,
                                  std::int64_t step_budget = 1'000'000'000);

// CSV dump `node,next,root,tree_id` for debugging.
void write_forest_csv(std::ostream& out, const Forest& f);

enum class Estimator { tilde, bar };

// Accumulated statistics over N sampled forests: streaming mean and M2 of the
// per-forest estimates for each of `cols` input columns, the smoother-diagonal
// surrogates for both estimators, per-forest root counts, and the mean number
// of walk draws. Exact running means; merge() of two index-disjoint ensembles
// matches sequential processing up to floating-point summation order.
class ForestEnsemble {
public:
    ForestEnsemble() = default;
    ForestEnsemble(std::int32_t n, std::int32_t cols, Estimator kind);

    // Folds one forest into the running statistics. columns is n*cols,
    // column-major (column c at columns[c*n .. c*n+n)).
    void absorb(const ForestWorkspace& ws, const DiagQ& q, const double* columns);

    void merge(const ForestEnsemble& other);

    std::int64_t count() const { return count_; }
    Estimator kind() const { return kind_; }
    std::int32_t cols() const { return cols_; }

    // Running mean / unbiased sample variance of estimate for column c.
    const double* mean(std::int32_t c = 0) const { return mean_.data() + static_cast<std::size_t>(c) * n_; }
    Signal mean_signal(std::int32_t c = 0) const;
    Signal variance_signal(std::int32_t c = 0) const;

    // Mean of I(root(i) = i) — the tilde smoother diagonal.
    const std::vector<double>& diag_tilde() const { return diag_tilde_; }
    // Mean of q_i / qmass(tree(i)) — the bar smoother diagonal.
    const std::vector<double>& diag_bar() const { return diag_bar_; }

    const std::vector<std::int32_t>& root_count_samples() const { return root_counts_; }
    double mean_root_count() const;
    double variance_root_count() const;
    double mean_walk_steps() const;

private:
    std::int32_t n_ = 0;
    std::int32_t cols_ = 0;
    Estimator kind_ = Estimator::tilde;
    std::int64_t count_ = 0;
    std::vector<double> mean_;  // n*cols
    std::vector<double> m2_;    // n*cols
    std::vector<double> diag_tilde_;
    std::vector<double> diag_bar_;
    std::vector<std::int32_t> root_counts_;
    double walk_steps_mean_ = 0.0;
    std::vector<double> scratch_;
};

// Samples N forests with one RNG stream per forest index (seed, stream =
// first_stream + k) and folds them into an ensemble. The parallel variant
// partitions indices into contiguous per-thread blocks and merges in block
// order, so the sampled forests are identical for any thread count.
ForestEnsemble build_ensemble_serial(const Graph& g, const DiagQ& q, const double* columns,
                                     std::int32_t cols, Estimator kind, std::int64_t n_forests,
                                     std::uint64_t seed, std::uint64_t first_stream = 0);
ForestEnsemble build_ensemble(const Graph& g, const DiagQ& q, const double* columns,
                              std::int32_t cols, Estimator kind, std::int64_t n_forests,
                              std::uint64_t seed, int threads = 0, std::uint64_t first_stream = 0);

// Absorbing-walk ensemble used by label propagation; tilde semantics (the bar
// estimator coincides with tilde when all mass sits on the roots).
ForestEnsemble build_absorbing_ensemble(const Graph& g, std::span<const std::uint8_t> absorbing,
                                        const double* columns, std::int32_t cols,
                                        std::int64_t n_forests, std::uint64_t seed,
                                        int threads = 0);

}  // namespace rsf

#endif
