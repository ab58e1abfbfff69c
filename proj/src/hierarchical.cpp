#include <algorithm>
#include <cmath>
#include <limits>

#include "glyphrun/gaicda.hpp"

namespace glyphrun {

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

} // namespace

Partition clusterHierarchical(const std::vector<NormalizedVector>& vectors, int targetClusters,
                              std::uint64_t seed) {
    const int n = static_cast<int>(vectors.size());
    if (targetClusters < 1) throw ValidationError("targetClusters must be >= 1");
    if (n < targetClusters)
        throw ValidationError("fewer documents than targetClusters");

    struct Cluster {
        std::vector<int> members;
        std::string minDocId;
        bool active = true;
    };

    std::vector<Cluster> clusters(n);
    for (int i = 0; i < n; ++i) {
        clusters[i].members = {i};
        clusters[i].minDocId = vectors[i].docId;
    }

    // average-linkage distances, updated by the Lance-Williams rule
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = euclidean(vectors[i].values, vectors[j].values);

    int active = n;
    while (active > targetClusters) {
        int bestA = -1, bestB = -1;
        double bestDist = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a) {
            if (!clusters[a].active) continue;
            for (int b = 0; b < n; ++b) {
                if (b == a || !clusters[b].active) continue;
                const auto& lo = clusters[a].minDocId < clusters[b].minDocId ? clusters[a] : clusters[b];
                const auto& hi = clusters[a].minDocId < clusters[b].minDocId ? clusters[b] : clusters[a];
                double d = dist[a][b];
                bool better = d < bestDist;
                if (d == bestDist && bestA >= 0) {
                    // equal distance: lowest docId pair wins
                    const auto& curLo = clusters[bestA].minDocId;
                    const auto& curHi = clusters[bestB].minDocId;
                    better = std::pair(lo.minDocId, hi.minDocId) < std::pair(curLo, curHi);
                }
                if (better) {
                    bestDist = d;
                    bestA = clusters[a].minDocId < clusters[b].minDocId ? a : b;
                    bestB = clusters[a].minDocId < clusters[b].minDocId ? b : a;
                }
            }
        }

        auto& dst = clusters[bestA];
        auto& src = clusters[bestB];
        const double sizeA = static_cast<double>(dst.members.size());
        const double sizeB = static_cast<double>(src.members.size());
        for (int c = 0; c < n; ++c) {
            if (!clusters[c].active || c == bestA || c == bestB) continue;
            double merged = (sizeA * dist[bestA][c] + sizeB * dist[bestB][c]) / (sizeA + sizeB);
            dist[bestA][c] = dist[c][bestA] = merged;
        }
        dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
        dst.minDocId = std::min(dst.minDocId, src.minDocId);
        src.active = false;
        --active;
    }

    Partition out;
    int label = 0;
    for (const auto& c : clusters) {
        if (!c.active) continue;
        for (int idx : c.members) out.assignment[vectors[idx].docId] = label;
        ++label;
    }
    out.k = label;
    out.provenance.method = Method::Hierarchical;
    out.provenance.seed = seed;
    out.provenance.params = {{"linkage", "average"},
                             {"metric", "euclidean"},
                             {"targetClusters", std::to_string(targetClusters)}};
    canonicalizeLabels(out);
    return out;
}

} // namespace glyphrun
