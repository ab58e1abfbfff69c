#ifndef GLYPHRUN_GAICDA_HPP
#define GLYPHRUN_GAICDA_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "glyphrun/texture.hpp"

namespace glyphrun {

// One document in standardized feature space (columns follow the selected
// feature subset, z-scored over the batch).
struct NormalizedVector {
    std::string docId;
    std::vector<double> values;
};

// Zero mean, unit variance per selected column; constant columns map to all
// zeros. Requires at least two vectors.
std::vector<NormalizedVector> normalizeFeatures(const std::vector<FeatureVector>& vectors,
                                                const std::vector<FeatureId>& selected);

struct GraphEdge {
    int u = 0, v = 0; // node indices, u < v
    double weight = 0;
};

// Weighted document graph. Nodes are documents; an edge may exist only
// between nodes whose ordering positions differ by at most thresholdT, and
// carries a Gaussian similarity weight.
struct DocumentGraph {
    std::vector<NormalizedVector> nodes;
    std::vector<int> position; // position[node] = rank in the node ordering
    int thresholdT = 0;
    std::vector<GraphEdge> edges;

    std::vector<std::vector<std::pair<int, double>>> adjacency; // node -> (neighbor, weight)
    std::vector<double> strength;                               // weighted degree per node
    double totalWeight = 0;                                     // sum of edge weights

    void rebuildIndex(); // fills adjacency/strength/totalWeight from edges
};

// Ordering = lexicographic sort on the normalized feature columns (ties by
// docId); edges = per-node nearest neighbors inside the T-window, weighted by
// exp(-d^2 / (2 sigma^2)) with sigma the mean pairwise distance.
DocumentGraph buildGraph(const std::vector<NormalizedVector>& vectors, int thresholdT,
                         int neighborCount);

// Newman weighted modularity of a node-index labelling.
double weightedModularity(const DocumentGraph& graph, const std::vector<int>& labels);

enum class Method { GAICDA, Hierarchical, EM };

std::string_view methodName(Method m);
std::optional<Method> methodFromName(std::string_view name);

struct Provenance {
    Method method = Method::GAICDA;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> params;
};

struct Partition {
    std::map<std::string, int> assignment; // docId -> label, labels 0..k-1
    int k = 0;
    Provenance provenance;
};

// Relabels clusters to contiguous 0..k-1 in order of first appearance over
// ascending docId.
void canonicalizeLabels(Partition& partition);

struct GaParams {
    int populationSize = 100;
    int generations = 100;
    double crossoverRate = 0.8;
    double mutationRate = 0.2;
    double elitismFraction = 0.1;
    int targetClusters = 3;
    std::uint64_t rngSeed = 0;

    void validate() const;
    std::map<std::string, std::string> record() const;
};

// Genetic clustering stage. Chromosomes use locus-based adjacency encoding:
// gene i names a graph neighbor of node i (or i itself, leaving the node
// unlinked), and a chromosome decodes to the connected components of its
// gene-induced edge set. Fitness is weighted modularity; partitions with at
// least targetClusters clusters are preferred over coarser ones so the merge
// refinement always has enough clusters to work with. Deterministic for a
// fixed rngSeed.
Partition clusterGA(const DocumentGraph& graph, const GaParams& params);

// Merges the two clusters with minimum centroid distance until exactly
// targetClusters remain. Only merges; k below target is an error.
Partition refine(const Partition& partition, const std::vector<NormalizedVector>& vectors,
                 int targetClusters);

// Full pipeline: normalize -> buildGraph -> clusterGA -> refine.
Partition classifyGAICDA(const std::vector<FeatureVector>& vectors, const GaParams& params,
                         int thresholdT, int neighborCount,
                         const std::vector<FeatureId>& selected = defaultFeatureSubset());

// Agglomerative baseline: average linkage, Euclidean metric, cut at
// targetClusters. Deterministic; the seed is recorded but unused.
Partition clusterHierarchical(const std::vector<NormalizedVector>& vectors, int targetClusters,
                              std::uint64_t seed);

// Gaussian-mixture baseline: diagonal covariances, seeded random init,
// 200-iteration cap, 1e-8 log-likelihood tolerance, hard assignment by
// maximum responsibility.
Partition clusterEM(const std::vector<NormalizedVector>& vectors, int targetClusters,
                    std::uint64_t seed);

namespace detail {

struct EmRun {
    Partition partition;
    std::vector<double> logLikelihoods; // one entry per EM iteration
};

EmRun emFit(const std::vector<NormalizedVector>& vectors, int targetClusters, std::uint64_t seed);

} // namespace detail

} // namespace glyphrun

#endif
