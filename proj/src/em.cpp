#include <algorithm>
#include <cmath>
#include <numeric>

#include "glyphrun/gaicda.hpp"
#include "glyphrun/rng.hpp"

namespace glyphrun {
namespace detail {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kLogLikelihoodTol = 1e-8;
constexpr double kVarianceFloor = 1e-6;
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

} // namespace

EmRun emFit(const std::vector<NormalizedVector>& vectors, int targetClusters, std::uint64_t seed) {
    const int n = static_cast<int>(vectors.size());
    const int k = targetClusters;
    if (k < 1) throw ValidationError("targetClusters must be >= 1");
    if (n < k) throw ValidationError("fewer documents than mixture components");
    const int d = static_cast<int>(vectors[0].values.size());
    for (const auto& v : vectors)
        if (static_cast<int>(v.values.size()) != d)
            throw ValidationError("inconsistent feature dimensions");

    Rng rng(seed);

    // init: k distinct random points as means, per-column variance, uniform weights
    std::vector<int> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    for (int i = 0; i < k; ++i) {
        std::size_t j = i + rng.below(static_cast<std::uint64_t>(n - i));
        std::swap(indices[i], indices[j]);
    }

    std::vector<double> columnVar(d, 0.0);
    {
        std::vector<double> mean(d, 0.0);
        for (const auto& v : vectors)
            for (int c = 0; c < d; ++c) mean[c] += v.values[c];
        for (int c = 0; c < d; ++c) mean[c] /= n;
        for (const auto& v : vectors)
            for (int c = 0; c < d; ++c) {
                double diff = v.values[c] - mean[c];
                columnVar[c] += diff * diff;
            }
        for (int c = 0; c < d; ++c) columnVar[c] = std::max(columnVar[c] / n, kVarianceFloor);
    }

    std::vector<std::vector<double>> means(k), variances(k, columnVar);
    for (int c = 0; c < k; ++c) means[c] = vectors[indices[c]].values;
    std::vector<double> weights(k, 1.0 / k);

    std::vector<std::vector<double>> resp(n, std::vector<double>(k, 0.0));
    EmRun run;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // E step with log-sum-exp
        double logLikelihood = 0;
        for (int i = 0; i < n; ++i) {
            std::vector<double> logp(k);
            for (int c = 0; c < k; ++c) {
                double lp = std::log(std::max(weights[c], 1e-300));
                for (int col = 0; col < d; ++col) {
                    double var = variances[c][col];
                    double diff = vectors[i].values[col] - means[c][col];
                    lp -= 0.5 * (kLogTwoPi + std::log(var) + diff * diff / var);
                }
                logp[c] = lp;
            }
            double maxLog = *std::max_element(logp.begin(), logp.end());
            double sum = 0;
            for (int c = 0; c < k; ++c) sum += std::exp(logp[c] - maxLog);
            double logSum = maxLog + std::log(sum);
            logLikelihood += logSum;
            for (int c = 0; c < k; ++c) resp[i][c] = std::exp(logp[c] - logSum);
        }
        run.logLikelihoods.push_back(logLikelihood);

        if (run.logLikelihoods.size() >= 2) {
            double prev = run.logLikelihoods[run.logLikelihoods.size() - 2];
            if (logLikelihood - prev < kLogLikelihoodTol) break;
        }

        // M step
        for (int c = 0; c < k; ++c) {
            double total = 0;
            for (int i = 0; i < n; ++i) total += resp[i][c];
            weights[c] = total / n;
            if (total < 1e-12) continue; // dead component keeps its parameters

            for (int col = 0; col < d; ++col) {
                double m = 0;
                for (int i = 0; i < n; ++i) m += resp[i][c] * vectors[i].values[col];
                means[c][col] = m / total;
            }
            for (int col = 0; col < d; ++col) {
                double v = 0;
                for (int i = 0; i < n; ++i) {
                    double diff = vectors[i].values[col] - means[c][col];
                    v += resp[i][c] * diff * diff;
                }
                variances[c][col] = std::max(v / total, kVarianceFloor);
            }
        }
    }

    Partition partition;
    for (int i = 0; i < n; ++i) {
        int bestC = 0;
        for (int c = 1; c < k; ++c)
            if (resp[i][c] > resp[i][bestC]) bestC = c;
        partition.assignment[vectors[i].docId] = bestC;
    }
    partition.provenance.method = Method::EM;
    partition.provenance.seed = seed;
    partition.provenance.params = {{"components", std::to_string(k)},
                                   {"covariance", "diagonal"},
                                   {"maxIterations", std::to_string(kMaxIterations)},
                                   {"tolerance", "1e-8"},
                                   {"varianceFloor", "1e-6"}};
    canonicalizeLabels(partition);

    run.partition = std::move(partition);
    return run;
}

} // namespace detail

Partition clusterEM(const std::vector<NormalizedVector>& vectors, int targetClusters,
                    std::uint64_t seed) {
    return detail::emFit(vectors, targetClusters, seed).partition;
}

} // namespace glyphrun
