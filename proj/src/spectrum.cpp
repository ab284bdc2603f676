#include "rsf/spectrum.hpp"

#include <cmath>

#include "rsf/rng.hpp"

namespace rsf {

Eigen::MatrixXd dense_laplacian(const Graph& g) {
    const std::int32_t n = g.num_nodes();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::int32_t i = 0; i < n; ++i) {
        auto nb = g.neighbors(i);
        auto ws = g.weights(i);
        L(i, i) = g.degree_sum(i);
        for (std::size_t k = 0; k < nb.size(); ++k) L(i, nb[k]) = -ws[k];
    }
    return L;
}

Spectrum dense_spectrum(const Graph& g) {
    if (g.num_nodes() > kDenseCap)
        throw CapabilityError("dense_spectrum: graph exceeds dense cap of " +
                              std::to_string(kDenseCap) + " nodes");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g));
    if (es.info() != Eigen::Success) throw NumericError("dense_spectrum: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

// One Lanczos sweep with full reorthogonalization, deflated against the
// already-converged eigenvectors. Returns up to k_want low Ritz pairs (best
// effort at the iteration cap).
void lanczos_pass(const Graph& g, std::int32_t k_want, Rng& rng, const Eigen::MatrixXd& deflate,
                  Eigen::VectorXd& values_out, Eigen::MatrixXd& vectors_out) {
    const std::int32_t n = g.num_nodes();
    const int m_max = static_cast<int>(std::min<std::int64_t>(n, 500));
    Eigen::MatrixXd V(n, m_max);
    std::vector<double> alpha, beta;
    const double tol = 1e-9;
    const double lam_scale = std::max(1.0, 2.0 * g.max_degree_sum());

    auto project_out = [&](Eigen::VectorXd& w, int cols) {
        for (int pass = 0; pass < 2; ++pass) {
            if (deflate.cols() > 0) w -= deflate * (deflate.transpose() * w);
            if (cols > 0) w -= V.leftCols(cols) * (V.leftCols(cols).transpose() * w);
        }
    };

    {
        Eigen::VectorXd v0 =
            Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(); });
        project_out(v0, 0);
        const double norm = v0.norm();
        if (norm < 1e-12) throw NumericError("lanczos: cannot find a start direction");
        V.col(0) = v0 / norm;
    }

    Eigen::VectorXd w(n);
    for (int m = 1; m <= m_max; ++m) {
        laplacian_apply(g, {V.col(m - 1).data(), static_cast<std::size_t>(n)},
                        {w.data(), static_cast<std::size_t>(n)});
        const double a = V.col(m - 1).dot(w);
        alpha.push_back(a);
        w -= a * V.col(m - 1);
        if (m > 1) w -= beta[m - 2] * V.col(m - 2);
        project_out(w, m);
        const double b = w.norm();
        const bool breakdown = b < 1e-12 * lam_scale;

        const bool check =
            breakdown || m == m_max || (m >= std::max(2 * k_want + 2, 20) && m % 10 == 0);
        if (check) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            const int avail = std::min<int>(k_want, m);
            bool converged = true;
            for (int j = 0; j < avail && converged; ++j)
                converged = std::abs(b * es.eigenvectors()(m - 1, j)) <= tol * lam_scale;
            if (converged || breakdown || m == m_max) {
                values_out = es.eigenvalues().head(avail);
                vectors_out = V.leftCols(m) * es.eigenvectors().leftCols(avail);
                for (int j = 0; j < avail; ++j) vectors_out.col(j).normalize();
                return;
            }
        }
        if (m < m_max) {
            if (breakdown) break;
            beta.push_back(b);
            V.col(m) = w / b;
        }
    }
    throw NumericError("lanczos: failed to produce Ritz pairs");
}

// Degenerate eigenvalues need one deflated restart per extra copy: a single
// Krylov sequence carries only one Ritz vector per eigenvalue. Passes keep
// pooling pairs until the deflated complement's smallest eigenvalue confirms
// no missing copy below the current k-th.
Spectrum lanczos_lowest(const Graph& g, std::int32_t k, std::uint64_t seed) {
    const std::int32_t n = g.num_nodes();
    Rng rng(seed, streams::misc);
    std::vector<double> pool_values;
    Eigen::MatrixXd pool(n, 0);
    const int max_passes = k + 4;
    const double lam_scale = std::max(1.0, 2.0 * g.max_degree_sum());

    for (int pass = 0; pass < max_passes; ++pass) {
        Eigen::VectorXd vals;
        Eigen::MatrixXd vecs;
        lanczos_pass(g, k, rng, pool, vals, vecs);
        if (vals.size() == 0) break;
        const Eigen::Index old_cols = pool.cols();
        pool.conservativeResize(Eigen::NoChange, old_cols + vals.size());
        for (Eigen::Index j = 0; j < vals.size(); ++j) {
            pool_values.push_back(vals[j]);
            pool.col(old_cols + j) = vecs.col(j);
        }
        if (static_cast<std::int32_t>(pool_values.size()) >= k) {
            std::vector<double> sorted(pool_values);
            std::sort(sorted.begin(), sorted.end());
            // vals[0] is the smallest eigenvalue in the complement of the pool
            if (vals[0] >= sorted[k - 1] - 1e-10 * lam_scale) break;
        }
    }
    if (static_cast<std::int32_t>(pool_values.size()) < k)
        throw NumericError("lanczos: could not assemble k eigenpairs");

    std::vector<int> order(pool_values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pool_values[a] < pool_values[b]; });
    Spectrum out;
    out.eigenvalues.resize(k);
    out.U.resize(n, k);
    for (int i = 0; i < k; ++i) {
        out.eigenvalues[i] = pool_values[order[i]];
        out.U.col(i) = pool.col(order[i]);
    }
    return out;
}

}  // namespace

Spectrum lowest_eigenpairs(const Graph& g, std::int32_t k, std::uint64_t seed) {
    if (k < 1 || k > g.num_nodes())
        throw UsageError("lowest_eigenpairs: k out of range");
    if (g.num_nodes() <= kDenseCap) {
        Spectrum full = dense_spectrum(g);
        return {full.eigenvalues.head(k), full.U.leftCols(k)};
    }
    return lanczos_lowest(g, k, seed);
}

BandlimitedSignal bandlimited_signal(const Graph& g, std::int32_t k, double snr,
                                     std::uint64_t seed) {
    const std::int32_t n = g.num_nodes();
    if (k < 1 || k > n) throw UsageError("bandlimited_signal: k out of range");
    if (!(snr > 0.0)) throw UsageError("bandlimited_signal: snr must be positive");
    Spectrum low = lowest_eigenpairs(g, k, seed);

    Rng coef_rng(seed, streams::signal);
    Eigen::VectorXd alpha =
        Eigen::VectorXd::NullaryExpr(k, [&](Eigen::Index) { return coef_rng.normal(); });
    Eigen::VectorXd x = low.U * alpha;
    x /= x.norm();

    BandlimitedSignal out;
    out.sigma2 = 1.0 / (static_cast<double>(n) * snr);
    out.x.assign(x.data(), x.data() + n);
    out.y.resize(n);
    Rng noise_rng(seed, streams::noise);
    const double sigma = std::sqrt(out.sigma2);
    for (std::int32_t i = 0; i < n; ++i) out.y[i] = out.x[i] + sigma * noise_rng.normal();
    return out;
}

}  // namespace rsf
