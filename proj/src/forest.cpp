#include "rsf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsf {

DiagQ DiagQ::scalar(std::int32_t n, double q) {
    if (n <= 0) throw UsageError("DiagQ: empty graph");
    if (!(q >= 0.0) || !std::isfinite(q)) throw UsageError("DiagQ: q must be finite and >= 0");
    if (q == 0.0) throw UsageError("DiagQ: all-zero q leaves the extended graph disconnected");
    DiagQ d;
    d.n_ = n;
    d.is_scalar_ = true;
    d.scalar_ = q;
    return d;
}

DiagQ DiagQ::per_node(std::vector<double> q) {
    if (q.empty()) throw UsageError("DiagQ: empty graph");
    bool any_positive = false;
    for (double v : q) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw UsageError("DiagQ: entries must be finite and >= 0");
        any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) throw UsageError("DiagQ: all-zero q leaves the extended graph disconnected");
    DiagQ d;
    d.n_ = static_cast<std::int32_t>(q.size());
    d.is_scalar_ = false;
    d.values_ = std::move(q);
    return d;
}

double DiagQ::sum() const {
    if (is_scalar_) return scalar_ * n_;
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

double DiagQ::max_value() const {
    if (is_scalar_) return scalar_;
    return *std::max_element(values_.begin(), values_.end());
}

void DiagQ::validate_for(const Graph& g) const {
    if (n_ != g.num_nodes()) throw DimensionError("DiagQ: size does not match node count");
    if (is_scalar_) return;  // positive scalar reaches every component
    auto [comp, count] = g.components();
    std::vector<double> mass(count, 0.0);
    for (std::int32_t i = 0; i < n_; ++i) mass[comp[i]] += values_[i];
    for (std::int32_t c = 0; c < count; ++c)
        if (!(mass[c] > 0.0))
            throw UsageError("DiagQ: component " + std::to_string(c) +
                             " has no positive q; walks there cannot terminate");
}

namespace {

void derive_trees(const Graph& g, const DiagQ& q, ForestWorkspace& ws) {
    const std::int32_t n = g.num_nodes();
    ws.root_of.assign(n, -1);
    ws.tree_id.assign(n, -1);
    ws.roots.clear();
    for (std::int32_t i = 0; i < n; ++i) {
        if (ws.root_of[i] >= 0) continue;
        ws.chain.clear();
        std::int32_t u = i;
        while (ws.root_of[u] < 0 && ws.next[u] != kNoNext) {
            ws.chain.push_back(u);
            u = ws.next[u];
        }
        std::int32_t r, t;
        if (ws.next[u] == kNoNext) {
            if (ws.root_of[u] < 0) {
                t = static_cast<std::int32_t>(ws.roots.size());
                ws.roots.push_back(u);
                ws.root_of[u] = u;
                ws.tree_id[u] = t;
            }
            r = u;
            t = ws.tree_id[u];
        } else {
            r = ws.root_of[u];
            t = ws.tree_id[u];
        }
        for (auto v : ws.chain) {
            ws.root_of[v] = r;
            ws.tree_id[v] = t;
        }
    }
    ws.tree_qmass.assign(ws.roots.size(), 0.0);
    for (std::int32_t i = 0; i < n; ++i) ws.tree_qmass[ws.tree_id[i]] += q[i];
}

[[noreturn]] void budget_abort(std::int64_t budget) {
    throw NumericError("sample_forest: walk exceeded step budget of " + std::to_string(budget) +
                       " draws; q is likely vanishing on a large region");
}

}  // namespace

void sample_forest_into(const Graph& g, const DiagQ& q, Rng& rng, ForestWorkspace& ws,
                        std::int64_t step_budget) {
    const std::int32_t n = g.num_nodes();
    if (q.size() != n) throw DimensionError("sample_forest: q size does not match node count");
    ws.next.assign(n, kNoNext);
    ws.in_forest.assign(n, 0);
    ws.walk_steps = 0;
    for (std::int32_t start = 0; start < n; ++start) {
        std::int32_t u = start;
        while (!ws.in_forest[u]) {
            if (++ws.walk_steps > step_budget) budget_abort(step_budget);
            const double qu = q[u];
            const double du = g.degree_sum(u);
            double r = rng.next_double() * (qu + du);
            if (r < qu) {
                ws.in_forest[u] = 1;
                ws.next[u] = kNoNext;
            } else {
                r -= qu;
                auto nb = g.neighbors(u);
                auto wt = g.weights(u);
                std::int32_t pick = nb.back();
                double acc = 0.0;
                for (std::size_t k = 0; k < nb.size(); ++k) {
                    acc += wt[k];
                    if (r < acc) {
                        pick = nb[k];
                        break;
                    }
                }
                ws.next[u] = pick;
                u = pick;
            }
        }
        u = start;
        while (!ws.in_forest[u]) {
            ws.in_forest[u] = 1;
            u = ws.next[u];
        }
    }
    derive_trees(g, q, ws);
}

Forest sample_forest(const Graph& g, const DiagQ& q, Rng& rng, std::int64_t step_budget) {
    q.validate_for(g);
    ForestWorkspace ws;
    sample_forest_into(g, q, rng, ws, step_budget);
    Forest f;
    f.next = ws.next;
    f.root_of = ws.root_of;
    f.tree_id = ws.tree_id;
    f.roots = ws.roots;
    f.tree_qmass = ws.tree_qmass;
    f.walk_steps = ws.walk_steps;
    return f;
}

namespace {

// Core absorbing walk; q_proxy holds 1 on absorbing nodes and 0 elsewhere so
// derive_trees assigns unit mass to each root (bar collapses onto tilde).
void absorbing_walk(const Graph& g, std::span<const std::uint8_t> absorbing, const DiagQ& q_proxy,
                    Rng& rng, ForestWorkspace& ws, std::int64_t step_budget) {
    const std::int32_t n = g.num_nodes();
    ws.next.assign(n, kNoNext);
    ws.in_forest.assign(n, 0);
    ws.walk_steps = 0;
    for (std::int32_t i = 0; i < n; ++i)
        if (absorbing[i]) ws.in_forest[i] = 1;

    for (std::int32_t start = 0; start < n; ++start) {
        std::int32_t u = start;
        while (!ws.in_forest[u]) {
            if (++ws.walk_steps > step_budget) budget_abort(step_budget);
            const double du = g.degree_sum(u);
            if (!(du > 0.0))
                throw UsageError("sample_forest_absorbing: isolated unlabeled node " +
                                 std::to_string(u));
            double r = rng.next_double() * du;
            auto nb = g.neighbors(u);
            auto wt = g.weights(u);
            std::int32_t pick = nb.back();
            double acc = 0.0;
            for (std::size_t k = 0; k < nb.size(); ++k) {
                acc += wt[k];
                if (r < acc) {
                    pick = nb[k];
                    break;
                }
            }
            ws.next[u] = pick;
            u = pick;
        }
        u = start;
        while (!ws.in_forest[u]) {
            ws.in_forest[u] = 1;
            u = ws.next[u];
        }
    }
    derive_trees(g, q_proxy, ws);
}

DiagQ absorbing_proxy(const Graph& g, std::span<const std::uint8_t> absorbing) {
    const std::int32_t n = g.num_nodes();
    if (absorbing.size() != static_cast<std::size_t>(n))
        throw DimensionError("sample_forest_absorbing: mask length does not match node count");
    bool any = false;
    std::vector<double> proxy(n, 0.0);
    for (std::int32_t i = 0; i < n; ++i) {
        proxy[i] = absorbing[i] ? 1.0 : 0.0;
        any = any || absorbing[i];
    }
    if (!any) throw UsageError("sample_forest_absorbing: empty absorbing set");
    return DiagQ::per_node(std::move(proxy));
}

}  // namespace

void sample_forest_absorbing_into(const Graph& g, std::span<const std::uint8_t> absorbing,
                                  Rng& rng, ForestWorkspace& ws, std::int64_t step_budget) {
    const DiagQ proxy = absorbing_proxy(g, absorbing);
    absorbing_walk(g, absorbing, proxy, rng, ws, step_budget);
}

void write_forest_csv(std::ostream& out, const Forest& f) {
    out << "node,next,root,tree_id\n";
    for (std::size_t i = 0; i < f.next.size(); ++i)
        out << i << ',' << f.next[i] << ',' << f.root_of[i] << ',' << f.tree_id[i] << '\n';
}

ForestEnsemble::ForestEnsemble(std::int32_t n, std::int32_t cols, Estimator kind)
    : n_(n), cols_(cols), kind_(kind) {
    mean_.assign(static_cast<std::size_t>(n) * cols, 0.0);
    m2_.assign(mean_.size(), 0.0);
    diag_tilde_.assign(n, 0.0);
    diag_bar_.assign(n, 0.0);
}

void ForestEnsemble::absorb(const ForestWorkspace& ws, const DiagQ& q, const double* columns) {
    ++count_;
    const double inv_count = 1.0 / static_cast<double>(count_);
    const auto num_trees = static_cast<std::int32_t>(ws.roots.size());
    for (std::int32_t c = 0; c < cols_; ++c) {
        const double* col = columns + static_cast<std::size_t>(c) * n_;
        double* mean = mean_.data() + static_cast<std::size_t>(c) * n_;
        double* m2 = m2_.data() + static_cast<std::size_t>(c) * n_;
        if (kind_ == Estimator::bar) {
            scratch_.assign(num_trees, 0.0);
            for (std::int32_t i = 0; i < n_; ++i) scratch_[ws.tree_id[i]] += q[i] * col[i];
            for (std::int32_t t = 0; t < num_trees; ++t) scratch_[t] /= ws.tree_qmass[t];
            for (std::int32_t i = 0; i < n_; ++i) {
                const double v = scratch_[ws.tree_id[i]];
                const double delta = v - mean[i];
                mean[i] += delta * inv_count;
                m2[i] += delta * (v - mean[i]);
            }
        } else {
            for (std::int32_t i = 0; i < n_; ++i) {
                const double v = col[ws.root_of[i]];
                const double delta = v - mean[i];
                mean[i] += delta * inv_count;
                m2[i] += delta * (v - mean[i]);
            }
        }
    }
    for (std::int32_t i = 0; i < n_; ++i) {
        const double vt = ws.root_of[i] == i ? 1.0 : 0.0;
        diag_tilde_[i] += (vt - diag_tilde_[i]) * inv_count;
        const double vb = q[i] > 0.0 ? q[i] / ws.tree_qmass[ws.tree_id[i]] : 0.0;
        diag_bar_[i] += (vb - diag_bar_[i]) * inv_count;
    }
    root_counts_.push_back(num_trees);
    walk_steps_mean_ += (static_cast<double>(ws.walk_steps) - walk_steps_mean_) * inv_count;
}

void ForestEnsemble::merge(const ForestEnsemble& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    if (n_ != other.n_ || cols_ != other.cols_ || kind_ != other.kind_)
        throw DimensionError("ForestEnsemble::merge: incompatible ensembles");
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double nab = na + nb;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        const double delta = other.mean_[i] - mean_[i];
        mean_[i] += delta * (nb / nab);
        m2_[i] += other.m2_[i] + delta * delta * (na * nb / nab);
    }
    for (std::int32_t i = 0; i < n_; ++i) {
        diag_tilde_[i] += (other.diag_tilde_[i] - diag_tilde_[i]) * (nb / nab);
        diag_bar_[i] += (other.diag_bar_[i] - diag_bar_[i]) * (nb / nab);
    }
    walk_steps_mean_ += (other.walk_steps_mean_ - walk_steps_mean_) * (nb / nab);
    root_counts_.insert(root_counts_.end(), other.root_counts_.begin(), other.root_counts_.end());
    count_ += other.count_;
}

Signal ForestEnsemble::mean_signal(std::int32_t c) const {
    const double* p = mean(c);
    return Signal(p, p + n_);
}

Signal ForestEnsemble::variance_signal(std::int32_t c) const {
    Signal v(n_, 0.0);
    if (count_ > 1) {
        const double* m2 = m2_.data() + static_cast<std::size_t>(c) * n_;
        for (std::int32_t i = 0; i < n_; ++i)
            v[i] = m2[i] / static_cast<double>(count_ - 1);
    }
    return v;
}

double ForestEnsemble::mean_root_count() const {
    double m = 0.0;
    for (std::size_t k = 0; k < root_counts_.size(); ++k)
        m += (static_cast<double>(root_counts_[k]) - m) / static_cast<double>(k + 1);
    return m;
}

double ForestEnsemble::variance_root_count() const {
    if (root_counts_.size() < 2) return 0.0;
    const double m = mean_root_count();
    double acc = 0.0;
    for (auto v : root_counts_) acc += (v - m) * (v - m);
    return acc / static_cast<double>(root_counts_.size() - 1);
}

double ForestEnsemble::mean_walk_steps() const { return walk_steps_mean_; }

ForestEnsemble build_ensemble_serial(const Graph& g, const DiagQ& q, const double* columns,
                                     std::int32_t cols, Estimator kind, std::int64_t n_forests,
                                     std::uint64_t seed, std::uint64_t first_stream) {
    if (n_forests < 1) throw UsageError("build_ensemble: need at least one forest");
    q.validate_for(g);
    ForestEnsemble ens(g.num_nodes(), cols, kind);
    ForestWorkspace ws;
    for (std::int64_t k = 0; k < n_forests; ++k) {
        Rng rng(seed, first_stream + static_cast<std::uint64_t>(k));
        sample_forest_into(g, q, rng, ws);
        ens.absorb(ws, q, columns);
    }
    return ens;
}

ForestEnsemble build_ensemble(const Graph& g, const DiagQ& q, const double* columns,
                              std::int32_t cols, Estimator kind, std::int64_t n_forests,
                              std::uint64_t seed, int threads, std::uint64_t first_stream) {
    q.validate_for(g);
#ifdef _OPENMP
    int want = threads > 0 ? threads : omp_get_max_threads();
    want = static_cast<int>(std::min<std::int64_t>(want, n_forests));
    if (want > 1) {
        std::vector<ForestEnsemble> parts(want);
        std::exception_ptr failure;
#pragma omp parallel num_threads(want)
        {
            const int t = omp_get_thread_num();
            const std::int64_t lo = n_forests * t / want;
            const std::int64_t hi = n_forests * (t + 1) / want;
            try {
                ForestEnsemble local(g.num_nodes(), cols, kind);
                ForestWorkspace ws;
                for (std::int64_t k = lo; k < hi; ++k) {
                    Rng rng(seed, first_stream + static_cast<std::uint64_t>(k));
                    sample_forest_into(g, q, rng, ws);
                    local.absorb(ws, q, columns);
                }
                parts[t] = std::move(local);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        for (int t = 1; t < want; ++t) parts[0].merge(parts[t]);
        return std::move(parts[0]);
    }
#else
    (void)threads;
#endif
    return build_ensemble_serial(g, q, columns, cols, kind, n_forests, seed, first_stream);
}

ForestEnsemble build_absorbing_ensemble(const Graph& g, std::span<const std::uint8_t> absorbing,
                                        const double* columns, std::int32_t cols,
                                        std::int64_t n_forests, std::uint64_t seed, int threads) {
    if (n_forests < 1) throw UsageError("build_ensemble: need at least one forest");
    // Unlabeled components would make the walks non-terminating.
    {
        auto [comp, count] = g.components();
        std::vector<std::uint8_t> has(count, 0);
        for (std::int32_t i = 0; i < g.num_nodes(); ++i)
            if (absorbing[i]) has[comp[i]] = 1;
        for (std::int32_t c = 0; c < count; ++c)
            if (!has[c])
                throw UsageError("absorbing ensemble: component " + std::to_string(c) +
                                 " contains no absorbing node");
    }
    const DiagQ q = absorbing_proxy(g, absorbing);

    auto run_block = [&](std::int64_t lo, std::int64_t hi) {
        ForestEnsemble local(g.num_nodes(), cols, Estimator::tilde);
        ForestWorkspace ws;
        for (std::int64_t k = lo; k < hi; ++k) {
            Rng rng(seed, static_cast<std::uint64_t>(k));
            absorbing_walk(g, absorbing, q, rng, ws, 1'000'000'000);
            local.absorb(ws, q, columns);
        }
        return local;
    };

#ifdef _OPENMP
    int want = threads > 0 ? threads : omp_get_max_threads();
    want = static_cast<int>(std::min<std::int64_t>(want, n_forests));
    if (want > 1) {
        std::vector<ForestEnsemble> parts(want);
        std::exception_ptr failure;
#pragma omp parallel num_threads(want)
        {
            const int t = omp_get_thread_num();
            try {
                parts[t] = run_block(n_forests * t / want, n_forests * (t + 1) / want);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        for (int t = 1; t < want; ++t) parts[0].merge(parts[t]);
        return std::move(parts[0]);
    }
#else
    (void)threads;
#endif
    return run_block(0, n_forests);
}

}  // namespace rsf
