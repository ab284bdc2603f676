#include "rsf/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rsf/smoother.hpp"

namespace rsf {

namespace {

double dot(const Signal& a, const Signal& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Signal& a) { return std::sqrt(dot(a, a)); }

std::vector<int> argmax_rows(const std::vector<Signal>& F, std::int32_t n) {
    std::vector<int> assigned(n, 0);
    for (std::int32_t i = 0; i < n; ++i) {
        double best = F[0][i];
        for (std::size_t c = 1; c < F.size(); ++c) {
            if (F[c][i] > best) {
                best = F[c][i];
                assigned[i] = static_cast<int>(c);
            }
        }
    }
    return assigned;
}

}  // namespace

LabeledProblem LabeledProblem::from_labels(std::int32_t n, std::span<const int> per_node_class) {
    if (per_node_class.size() != static_cast<std::size_t>(n))
        throw DimensionError("LabeledProblem: label array length does not match node count");
    LabeledProblem p;
    p.n = n;
    int max_class = -1;
    for (std::int32_t i = 0; i < n; ++i) {
        if (per_node_class[i] >= 0) {
            p.labels.emplace_back(i, per_node_class[i]);
            max_class = std::max(max_class, per_node_class[i]);
        }
    }
    if (p.labels.empty()) throw UsageError("LabeledProblem: no labeled nodes");
    p.num_classes = max_class + 1;
    return p;
}

std::vector<std::int32_t> LabeledProblem::labeled_nodes() const {
    std::vector<std::int32_t> out;
    out.reserve(labels.size());
    for (auto [node, cls] : labels) out.push_back(node);
    return out;
}

std::vector<std::uint8_t> LabeledProblem::labeled_mask() const {
    std::vector<std::uint8_t> mask(n, 0);
    for (auto [node, cls] : labels) mask[node] = 1;
    return mask;
}

std::vector<Signal> LabeledProblem::one_hot_columns() const {
    std::vector<Signal> Y(num_classes, Signal(n, 0.0));
    for (auto [node, cls] : labels) Y[cls][node] = 1.0;
    return Y;
}

void write_classification_csv(std::ostream& out, const ClassificationResult& result) {
    char buf[48];
    out << "node,assigned";
    for (std::size_t c = 0; c < result.F.size(); ++c) out << ",score_" << c;
    out << '\n';
    for (std::size_t i = 0; i < result.assigned.size(); ++i) {
        out << i << ',' << result.assigned[i];
        for (const auto& col : result.F) {
            std::snprintf(buf, sizeof buf, ",%.17g", col[i]);
            out << buf;
        }
        out << '\n';
    }
}

void write_trace_csv(std::ostream& out, const IterateTrace& trace) {
    char buf[120];
    out << "iter,loss,alpha,update_norm\n";
    for (const auto& row : trace.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.iter, row.loss, row.alpha,
                      row.update_norm);
        out << buf;
    }
}

Signal interpolate(const Graph& g, std::span<const std::int32_t> labeled_nodes,
                   std::span<const double> x_labeled, const InterpolateOptions& opts) {
    const std::int32_t n = g.num_nodes();
    if (labeled_nodes.size() != x_labeled.size())
        throw DimensionError("interpolate: labeled nodes and values differ in length");
    if (labeled_nodes.empty()) throw UsageError("interpolate: empty labeled set");
    if (!(opts.mu >= 0.0)) throw UsageError("interpolate: mu must be >= 0");

    Signal out(n, 0.0);
    std::vector<std::uint8_t> labeled(n, 0);
    for (std::size_t k = 0; k < labeled_nodes.size(); ++k) {
        const auto i = labeled_nodes[k];
        if (i < 0 || i >= n) throw DimensionError("interpolate: labeled node out of range");
        if (labeled[i]) throw UsageError("interpolate: duplicate labeled node");
        labeled[i] = 1;
        out[i] = x_labeled[k];
    }
    std::vector<std::uint8_t> keep(n);
    bool any_unlabeled = false;
    for (std::int32_t i = 0; i < n; ++i) {
        keep[i] = labeled[i] ? 0 : 1;
        any_unlabeled = any_unlabeled || keep[i];
    }
    if (!any_unlabeled) return out;

    Subgraph red = induced_subgraph(g, keep);
    const auto nu = red.graph.num_nodes();
    std::vector<double> qv(nu, opts.mu);
    Signal b(nu, 0.0);
    for (std::int32_t ui = 0; ui < nu; ++ui) {
        const auto oi = red.to_old[ui];
        auto nb = g.neighbors(oi);
        auto wt = g.weights(oi);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (labeled[nb[k]]) {
                qv[ui] += wt[k];
                b[ui] += wt[k] * out[nb[k]];
            }
        }
    }

    if (opts.method == SolveMethod::exact) {
        Signal xu = solve_shifted_laplacian(red.graph, DiagQ::per_node(qv), b);
        for (std::int32_t ui = 0; ui < nu; ++ui) out[red.to_old[ui]] = xu[ui];
        return out;
    }

    const bool q_invertible =
        std::all_of(qv.begin(), qv.end(), [](double v) { return v > 0.0; });
    if (!q_invertible) {
        if (!opts.allow_dirichlet_fallback)
            throw NumericError(
                "interpolate: mu = 0 and some unlabeled node has no labeled neighbour; "
                "the reduced form is singular");
        // Absorb walks on the labeled set of the full graph and propagate the
        // root's value; the mu = 0 harmonic extension.
        auto ens = build_absorbing_ensemble(g, labeled, out.data(), 1, opts.n_forests, opts.seed,
                                            opts.threads);
        Signal mean = ens.mean_signal(0);
        for (std::int32_t i = 0; i < n; ++i)
            if (!labeled[i]) out[i] = mean[i];
        return out;
    }

    Signal y(nu);
    for (std::int32_t ui = 0; ui < nu; ++ui) y[ui] = b[ui] / qv[ui];
    const Estimator kind = opts.method == SolveMethod::bar ? Estimator::bar : Estimator::tilde;
    SmoothEstimate est =
        estimate(red.graph, DiagQ::per_node(qv), y, kind, opts.n_forests, opts.seed, opts.threads);
    for (std::int32_t ui = 0; ui < nu; ++ui) out[red.to_old[ui]] = est.values[ui];
    return out;
}

ClassificationResult label_propagate(const Graph& g, const LabeledProblem& problem,
                                     SolveMethod method, std::int64_t n_forests,
                                     std::uint64_t seed, int threads) {
    const std::int32_t n = g.num_nodes();
    if (problem.n != n) throw DimensionError("label_propagate: problem size mismatch");
    auto Y = problem.one_hot_columns();
    auto mask = problem.labeled_mask();

    ClassificationResult result;
    result.F.assign(problem.num_classes, Signal(n, 0.0));

    bool all_labeled = true;
    for (auto m : mask) all_labeled = all_labeled && m;
    if (all_labeled) {
        result.F = Y;
        result.assigned = argmax_rows(result.F, n);
        return result;
    }

    if (method == SolveMethod::exact) {
        std::vector<std::uint8_t> keep(n);
        for (std::int32_t i = 0; i < n; ++i) keep[i] = mask[i] ? 0 : 1;
        Subgraph red = induced_subgraph(g, keep);
        const auto nu = red.graph.num_nodes();
        std::vector<double> qv(nu, 0.0);
        for (std::int32_t ui = 0; ui < nu; ++ui) {
            const auto oi = red.to_old[ui];
            auto nb = g.neighbors(oi);
            auto wt = g.weights(oi);
            for (std::size_t k = 0; k < nb.size(); ++k)
                if (mask[nb[k]]) qv[ui] += wt[k];
        }
        const DiagQ q = DiagQ::per_node(qv);
        std::vector<Signal> rhs(problem.num_classes, Signal(nu, 0.0));
        for (int c = 0; c < problem.num_classes; ++c) {
            for (std::int32_t ui = 0; ui < nu; ++ui) {
                const auto oi = red.to_old[ui];
                auto nb = g.neighbors(oi);
                auto wt = g.weights(oi);
                for (std::size_t k = 0; k < nb.size(); ++k)
                    if (mask[nb[k]]) rhs[c][ui] += wt[k] * Y[c][nb[k]];
            }
        }
        auto solved = solve_shifted_laplacian_multi(red.graph, q, rhs);
        for (int c = 0; c < problem.num_classes; ++c) {
            result.F[c] = Y[c];
            for (std::int32_t ui = 0; ui < nu; ++ui) result.F[c][red.to_old[ui]] = solved[c][ui];
        }
    } else {
        // Absorption exactly on the labeled set; every root carries its label
        // column and x-tilde equals x-bar here.
        std::vector<double> packed(static_cast<std::size_t>(n) * problem.num_classes);
        for (int c = 0; c < problem.num_classes; ++c)
            std::copy(Y[c].begin(), Y[c].end(), packed.begin() + static_cast<std::size_t>(c) * n);
        auto ens = build_absorbing_ensemble(g, mask, packed.data(), problem.num_classes,
                                            n_forests, seed, threads);
        for (int c = 0; c < problem.num_classes; ++c) {
            result.F[c] = ens.mean_signal(c);
            for (auto [node, cls] : problem.labels) result.F[c][node] = Y[c][node];
        }
    }
    result.assigned = argmax_rows(result.F, n);
    return result;
}

ClassificationResult label_propagate_power(const Graph& g, const LabeledProblem& problem,
                                           int max_iters, double tol) {
    const std::int32_t n = g.num_nodes();
    if (problem.n != n) throw DimensionError("label_propagate_power: problem size mismatch");
    auto Y = problem.one_hot_columns();
    auto mask = problem.labeled_mask();
    ClassificationResult result;
    result.F = Y;
    std::vector<Signal> next = Y;
    for (int it = 0; it < max_iters; ++it) {
        double max_delta = 0.0;
        for (int c = 0; c < problem.num_classes; ++c) {
            for (std::int32_t i = 0; i < n; ++i) {
                if (mask[i]) {
                    next[c][i] = Y[c][i];
                    continue;
                }
                auto nb = g.neighbors(i);
                auto wt = g.weights(i);
                double acc = 0.0;
                for (std::size_t k = 0; k < nb.size(); ++k) acc += wt[k] * result.F[c][nb[k]];
                next[c][i] = acc / g.degree_sum(i);
                max_delta = std::max(max_delta, std::abs(next[c][i] - result.F[c][i]));
            }
        }
        result.F.swap(next);
        if (max_delta < tol) break;
    }
    result.assigned = argmax_rows(result.F, n);
    return result;
}

ClassificationResult generalized_ssl(const Graph& g, const LabeledProblem& problem, double mu,
                                     double eta, SolveMethod method, std::int64_t n_forests,
                                     std::uint64_t seed, int threads) {
    const std::int32_t n = g.num_nodes();
    if (problem.n != n) throw DimensionError("generalized_ssl: problem size mismatch");
    if (!(mu > 0.0)) throw UsageError("generalized_ssl: mu must be positive");
    std::vector<double> qv(n);
    for (std::int32_t i = 0; i < n; ++i) {
        const double d = g.degree_sum(i);
        if (!(d > 0.0)) throw UsageError("generalized_ssl: isolated node " + std::to_string(i));
        qv[i] = 0.5 * mu * d;
    }
    const DiagQ q = DiagQ::per_node(std::move(qv));

    auto Y = problem.one_hot_columns();
    std::vector<Signal> scaled(Y.size(), Signal(n));
    for (std::size_t c = 0; c < Y.size(); ++c)
        for (std::int32_t i = 0; i < n; ++i)
            scaled[c][i] = std::pow(g.degree_sum(i), eta - 1.0) * Y[c][i];

    ClassificationResult result;
    result.F.assign(problem.num_classes, Signal(n, 0.0));
    if (method == SolveMethod::exact) {
        std::vector<Signal> rhs(scaled);
        for (auto& col : rhs)
            for (std::int32_t i = 0; i < n; ++i) col[i] *= q[i];
        result.F = solve_shifted_laplacian_multi(g, q, rhs);
    } else {
        const Estimator kind = method == SolveMethod::bar ? Estimator::bar : Estimator::tilde;
        MultiSmooth ms = smooth_columns(g, q, scaled, kind, n_forests, seed, threads);
        result.F = std::move(ms.values);
    }
    for (std::size_t c = 0; c < Y.size(); ++c)
        for (std::int32_t i = 0; i < n; ++i)
            result.F[c][i] *= std::pow(g.degree_sum(i), 1.0 - eta);
    result.assigned = argmax_rows(result.F, n);
    return result;
}

namespace {

constexpr double kNewtonClamp = 30.0;

// mu sum(exp t - y t + y log y - y) + t'Lt/2; the 0 log 0 = 0 convention keeps
// zero counts finite.
double poisson_loss(const Graph& g, const Signal& y, const Signal& t, double mu) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double term = std::exp(t[i]) - y[i] * t[i];
        if (y[i] > 0.0) term += y[i] * std::log(y[i]) - y[i];
        acc += term;
    }
    return mu * acc + 0.5 * laplacian_quadratic(g, t);
}

bool clamp_signal(Signal& t) {
    bool hit = false;
    for (auto& v : t) {
        if (v > kNewtonClamp) {
            v = kNewtonClamp;
            hit = true;
        } else if (v < -kNewtonClamp) {
            v = -kNewtonClamp;
            hit = true;
        }
    }
    return hit;
}

}  // namespace

std::pair<Signal, IterateTrace> newton_poisson(const Graph& g, const Signal& y,
                                               const NewtonOptions& opts) {
    const std::int32_t n = g.num_nodes();
    if (y.size() != static_cast<std::size_t>(n))
        throw DimensionError("newton_poisson: signal length does not match node count");
    for (double v : y)
        if (v < 0.0 || !std::isfinite(v))
            throw UsageError("newton_poisson: y must be nonnegative Poisson counts");
    if (!(opts.mu > 0.0)) throw UsageError("newton_poisson: mu must be positive");
    if (opts.method == SolveMethod::tilde)
        throw UsageError("newton_poisson: supported update methods are exact and bar");

    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);
    Signal t(n, std::log(std::max(mean_y, 1e-3)));

    IterateTrace trace;
    trace.clamped = clamp_signal(t);
    double loss = poisson_loss(g, y, t, opts.mu);
    trace.rows.push_back({0, loss, 0.0, 0.0});

    Signal grad(n), hess_diag(n), direction, t_try(n);
    for (int k = 1; k <= opts.max_iters; ++k) {
        Signal lt = laplacian_apply(g, t);
        double grad_norm = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            hess_diag[i] = opts.mu * std::exp(t[i]);
            grad[i] = hess_diag[i] - opts.mu * y[i] + lt[i];
            grad_norm += grad[i] * grad[i];
        }
        if (std::sqrt(grad_norm) <= opts.tol * (1.0 + std::abs(loss))) {
            trace.converged = true;
            break;
        }
        const DiagQ q = DiagQ::per_node(hess_diag);
        if (opts.method == SolveMethod::exact) {
            direction = solve_shifted_laplacian(g, q, grad);
        } else {
            // Cast the Newton solve as K y' with Q = mu diag(exp t) and
            // y' = Q^(-1) grad, then estimate K y' from forests.
            Signal yprime(n);
            for (std::int32_t i = 0; i < n; ++i) yprime[i] = grad[i] / hess_diag[i];
            const std::uint64_t iter_seed = opts.seed + 0x9E3779B9ULL * static_cast<std::uint64_t>(k);
            direction = estimate_bar(g, q, yprime, opts.n_forests, iter_seed, opts.threads).values;
        }
        const double gd = dot(grad, direction);
        if (!(gd > 0.0)) break;  // not a descent direction (stochastic noise)

        double alpha = opts.alpha0;
        bool accepted = false;
        double loss_try = loss;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            for (std::int32_t i = 0; i < n; ++i) t_try[i] = t[i] - alpha * direction[i];
            trace.clamped = clamp_signal(t_try) || trace.clamped;
            loss_try = poisson_loss(g, y, t_try, opts.mu);
            if (std::isfinite(loss_try) && loss_try <= loss - opts.armijo_c * alpha * gd) {
                accepted = true;
                break;
            }
            alpha *= opts.shrink;
        }
        if (!accepted) break;

        double step_sq = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            const double d = t_try[i] - t[i];
            step_sq += d * d;
        }
        const double decrease = loss - loss_try;
        t = t_try;
        loss = loss_try;
        trace.rows.push_back({k, loss, alpha, std::sqrt(step_sq)});
        if (decrease < opts.tol * (1.0 + std::abs(loss))) {
            trace.converged = true;
            break;
        }
    }
    return {std::move(t), std::move(trace)};
}

double irls_surrogate(const Graph& g, const Signal& y, const Signal& z, double mu, double eps,
                      IrlsNormalization normalization) {
    double data = 0.0;
    const double shift = normalization == IrlsNormalization::printed ? 0.5 : 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = z[i] - shift * y[i];
        data += d * d;
    }
    double edge = 0.0;
    for (double a : incidence_apply(g, z)) {
        const double m = std::abs(a);
        edge += m >= eps ? m : 0.5 * (m * m / eps + eps);
    }
    return mu * data + edge;
}

std::pair<Signal, IterateTrace> irls_l1(const Graph& g, const Signal& y, const IrlsOptions& opts) {
    const std::int32_t n = g.num_nodes();
    if (y.size() != static_cast<std::size_t>(n))
        throw DimensionError("irls_l1: signal length does not match node count");
    if (!(opts.mu > 0.0)) throw UsageError("irls_l1: mu must be positive");
    if (opts.method == SolveMethod::tilde)
        throw UsageError("irls_l1: supported update methods are exact and bar");

    Signal z = opts.z0 ? *opts.z0 : y;
    if (z.size() != static_cast<std::size_t>(n))
        throw DimensionError("irls_l1: z0 length does not match node count");

    double eps = opts.eps;
    if (!(eps > 0.0)) {
        auto a0 = incidence_apply(g, z);
        for (auto& v : a0) v = std::abs(v);
        std::nth_element(a0.begin(), a0.begin() + a0.size() / 2, a0.end());
        eps = std::max(1e-8 * a0[a0.size() / 2], 1e-12);
    }

    const auto base_edges = g.edge_list();
    std::vector<double> new_w(base_edges.size());
    const DiagQ q = DiagQ::scalar(n, 2.0 * opts.mu);
    Signal input(n);
    const double input_scale = opts.normalization == IrlsNormalization::printed ? 0.5 : 1.0;
    for (std::int32_t i = 0; i < n; ++i) input[i] = input_scale * y[i];

    IterateTrace trace;
    trace.rows.push_back({0, irls_surrogate(g, y, z, opts.mu, eps, opts.normalization), 1.0, 0.0});

    for (int k = 1; k <= opts.max_iters; ++k) {
        const auto a = incidence_apply(g, z);
        for (std::size_t e = 0; e < a.size(); ++e)
            new_w[e] = base_edges[e].w / std::max(std::abs(a[e]), eps);
        Graph gk = g.reweighted(new_w);

        Signal z_next;
        if (opts.method == SolveMethod::exact) {
            z_next = exact_smooth(gk, q, input);
        } else {
            const std::uint64_t iter_seed = opts.seed + 0x2545F491ULL * static_cast<std::uint64_t>(k);
            z_next = estimate_bar(gk, q, input, opts.n_forests, iter_seed, opts.threads).values;
        }

        double step_sq = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            const double d = z_next[i] - z[i];
            step_sq += d * d;
        }
        z = std::move(z_next);
        trace.rows.push_back({k, irls_surrogate(g, y, z, opts.mu, eps, opts.normalization), 1.0,
                              std::sqrt(step_sq)});
        if (std::sqrt(step_sq) < opts.tol * (1.0 + norm2(z))) {
            trace.converged = true;
            break;
        }
    }
    return {std::move(z), std::move(trace)};
}

double psnr(const Signal& x, const Signal& x_ref, double peak) {
    if (x.size() != x_ref.size()) throw DimensionError("psnr: length mismatch");
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_ref[i];
        err += d * d;
    }
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak * static_cast<double>(x.size()) / err);
}

double accuracy(const ClassificationResult& result, std::span<const int> ground_truth,
                std::span<const std::uint8_t> labeled_mask) {
    if (result.assigned.size() != ground_truth.size() ||
        ground_truth.size() != labeled_mask.size())
        throw DimensionError("accuracy: length mismatch");
    std::int64_t total = 0, correct = 0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        if (labeled_mask[i]) continue;
        ++total;
        if (result.assigned[i] == ground_truth[i]) ++correct;
    }
    if (total == 0) return 1.0;
    return static_cast<double>(correct) / static_cast<double>(total);
}

double constant_classifier_accuracy(std::span<const int> ground_truth,
                                    std::span<const std::uint8_t> labeled_mask) {
    if (ground_truth.size() != labeled_mask.size())
        throw DimensionError("constant_classifier_accuracy: length mismatch");
    std::map<int, std::int64_t> counts;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        if (labeled_mask[i]) continue;
        ++counts[ground_truth[i]];
        ++total;
    }
    if (total == 0) return 1.0;
    std::int64_t best = 0;
    for (auto [cls, c] : counts) best = std::max(best, c);
    return static_cast<double>(best) / static_cast<double>(total);
}

}  // namespace rsf
