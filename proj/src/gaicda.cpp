#include "glyphrun/gaicda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "glyphrun/rng.hpp"

namespace glyphrun {

std::string_view methodName(Method m) {
    switch (m) {
    case Method::GAICDA: return "gaicda";
    case Method::Hierarchical: return "hierarchical";
    case Method::EM: return "em";
    }
    return "?";
}

std::optional<Method> methodFromName(std::string_view name) {
    if (name == "gaicda") return Method::GAICDA;
    if (name == "hierarchical") return Method::Hierarchical;
    if (name == "em") return Method::EM;
    return std::nullopt;
}

std::vector<NormalizedVector> normalizeFeatures(const std::vector<FeatureVector>& vectors,
                                                const std::vector<FeatureId>& selected) {
    if (vectors.size() < 2)
        throw ValidationError("normalization needs at least 2 feature vectors");
    if (selected.empty()) throw ValidationError("empty feature subset");

    const std::size_t n = vectors.size();
    const std::size_t d = selected.size();

    std::vector<NormalizedVector> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].docId = vectors[i].docId;
        out[i].values.resize(d);
    }

    for (std::size_t col = 0; col < d; ++col) {
        double mean = 0;
        for (const auto& v : vectors) mean += featureValue(v, selected[col]);
        mean /= static_cast<double>(n);

        double var = 0;
        for (const auto& v : vectors) {
            double diff = featureValue(v, selected[col]) - mean;
            var += diff * diff;
        }
        var /= static_cast<double>(n);

        const double std = std::sqrt(var);
        for (std::size_t i = 0; i < n; ++i) {
            double x = featureValue(vectors[i], selected[col]);
            out[i].values[col] = (std > 0) ? (x - mean) / std : 0.0;
        }
    }
    return out;
}

void DocumentGraph::rebuildIndex() {
    adjacency.assign(nodes.size(), {});
    strength.assign(nodes.size(), 0.0);
    totalWeight = 0;
    for (const auto& e : edges) {
        adjacency[e.u].emplace_back(e.v, e.weight);
        adjacency[e.v].emplace_back(e.u, e.weight);
        strength[e.u] += e.weight;
        strength[e.v] += e.weight;
        totalWeight += e.weight;
    }
}

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

DocumentGraph buildGraph(const std::vector<NormalizedVector>& vectors, int thresholdT,
                         int neighborCount) {
    const int n = static_cast<int>(vectors.size());
    if (n < 2) throw ValidationError("document graph needs at least 2 nodes");
    if (thresholdT < 1) throw ValidationError("thresholdT must be >= 1");
    if (neighborCount < 1) throw ValidationError("neighborCount must be >= 1");

    DocumentGraph g;
    g.nodes = vectors;
    g.thresholdT = thresholdT;

    // node ordering: lexicographic on the normalized columns, docId breaks ties
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vectors[a].values != vectors[b].values) return vectors[a].values < vectors[b].values;
        return vectors[a].docId < vectors[b].docId;
    });
    g.position.assign(n, 0);
    for (int rank = 0; rank < n; ++rank) g.position[order[rank]] = rank;

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    double sigma = 0;
    std::size_t pairs = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = euclidean(vectors[i].values, vectors[j].values);
            dist[i][j] = dist[j][i] = d;
            sigma += d;
            ++pairs;
        }
    }
    sigma /= static_cast<double>(pairs);

    const auto similarity = [&](double d) {
        if (d == 0.0) return 1.0;
        return std::exp(-(d * d) / (2.0 * sigma * sigma));
    };

    std::set<std::pair<int, int>> chosen;
    for (int u = 0; u < n; ++u) {
        std::vector<int> candidates;
        for (int v = 0; v < n; ++v) {
            if (v == u) continue;
            if (std::abs(g.position[u] - g.position[v]) <= thresholdT) candidates.push_back(v);
        }
        std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
            if (dist[u][a] != dist[u][b]) return dist[u][a] < dist[u][b];
            return vectors[a].docId < vectors[b].docId;
        });
        const std::size_t take = std::min<std::size_t>(candidates.size(), neighborCount);
        for (std::size_t i = 0; i < take; ++i) {
            int v = candidates[i];
            chosen.emplace(std::min(u, v), std::max(u, v));
        }
    }

    for (const auto& [u, v] : chosen) g.edges.push_back({u, v, similarity(dist[u][v])});
    g.rebuildIndex();
    return g;
}

double weightedModularity(const DocumentGraph& graph, const std::vector<int>& labels) {
    if (graph.totalWeight <= 0) return 0.0;
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);

    std::vector<double> internal(k, 0.0), volume(k, 0.0);
    for (const auto& e : graph.edges)
        if (labels[e.u] == labels[e.v]) internal[labels[e.u]] += e.weight;
    for (std::size_t i = 0; i < labels.size(); ++i) volume[labels[i]] += graph.strength[i];

    const double w = graph.totalWeight;
    double q = 0;
    for (int c = 0; c < k; ++c) {
        double frac = volume[c] / (2.0 * w);
        q += internal[c] / w - frac * frac;
    }
    return q;
}

void canonicalizeLabels(Partition& partition) {
    std::map<int, int> remap;
    int next = 0;
    for (auto& [docId, label] : partition.assignment) {
        auto [it, inserted] = remap.emplace(label, next);
        if (inserted) ++next;
        label = it->second;
    }
    partition.k = next;
}

void GaParams::validate() const {
    if (populationSize < 2) throw ValidationError("populationSize must be >= 2");
    if (generations < 1) throw ValidationError("generations must be >= 1");
    auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate(crossoverRate) || !rate(mutationRate) || !rate(elitismFraction))
        throw ValidationError("GA rates must lie in [0, 1]");
    if (targetClusters < 1) throw ValidationError("targetClusters must be >= 1");
}

std::map<std::string, std::string> GaParams::record() const {
    return {{"populationSize", std::to_string(populationSize)},
            {"generations", std::to_string(generations)},
            {"crossoverRate", std::to_string(crossoverRate)},
            {"mutationRate", std::to_string(mutationRate)},
            {"elitismFraction", std::to_string(elitismFraction)},
            {"targetClusters", std::to_string(targetClusters)},
            {"rngSeed", std::to_string(rngSeed)}};
}

namespace {

// Union-find over gene-induced edges {i, gene[i]}.
struct Decoded {
    std::vector<int> labels;
    int k = 0;
};

Decoded decodeChromosome(const std::vector<int>& genes) {
    const int n = static_cast<int>(genes.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);

    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (int i = 0; i < n; ++i) {
        if (genes[i] == i) continue;
        int a = find(i), b = find(genes[i]);
        if (a != b) parent[a] = b;
    }

    Decoded d;
    d.labels.assign(n, -1);
    std::vector<int> rootLabel(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (rootLabel[r] < 0) rootLabel[r] = d.k++;
        d.labels[i] = rootLabel[r];
    }
    return d;
}

struct Fitness {
    bool feasible = false;
    int k = 0;
    double modularity = 0;
};

// Feasible chromosomes (enough clusters for the refinement stage) beat
// infeasible ones; infeasible ones are ranked toward feasibility first.
bool strictlyBetter(const Fitness& a, const Fitness& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (!a.feasible && a.k != b.k) return a.k > b.k;
    return a.modularity > b.modularity;
}

// Spanning-forest chromosome: decodes to the graph's connected components.
std::vector<int> componentChromosome(const DocumentGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> genes(n);
    std::iota(genes.begin(), genes.end(), 0);
    std::vector<bool> visited(n, false);
    for (int root = 0; root < n; ++root) {
        if (visited[root]) continue;
        visited[root] = true;
        if (!g.adjacency[root].empty()) genes[root] = g.adjacency[root].front().first;
        std::queue<int> frontier;
        frontier.push(root);
        while (!frontier.empty()) {
            int u = frontier.front();
            frontier.pop();
            for (const auto& [v, w] : g.adjacency[u]) {
                if (visited[v]) continue;
                visited[v] = true;
                genes[v] = u;
                frontier.push(v);
            }
        }
    }
    return genes;
}

} // namespace

Partition clusterGA(const DocumentGraph& graph, const GaParams& params) {
    params.validate();
    const int n = static_cast<int>(graph.nodes.size());
    if (n == 0) throw ValidationError("cannot cluster an empty graph");

    // gene domain per node: itself plus its graph neighbors
    std::vector<std::vector<int>> domain(n);
    for (int i = 0; i < n; ++i) {
        domain[i].push_back(i);
        for (const auto& [v, w] : graph.adjacency[i]) domain[i].push_back(v);
        std::sort(domain[i].begin() + 1, domain[i].end());
    }

    Rng rng(params.rngSeed);

    const auto evaluate = [&](const std::vector<int>& genes) {
        Decoded d = decodeChromosome(genes);
        Fitness f;
        f.k = d.k;
        f.feasible = d.k >= params.targetClusters;
        f.modularity = weightedModularity(graph, d.labels);
        return f;
    };

    struct Individual {
        std::vector<int> genes;
        Fitness fitness;
    };

    const int popSize = params.populationSize;
    std::vector<Individual> population;
    population.reserve(popSize);

    // the two trivial decodings are always present at generation zero:
    // all-singletons and one-cluster-per-component
    {
        std::vector<int> selfGenes(n);
        std::iota(selfGenes.begin(), selfGenes.end(), 0);
        population.push_back({selfGenes, evaluate(selfGenes)});
    }
    if (popSize > 1) {
        auto genes = componentChromosome(graph);
        population.push_back({genes, evaluate(genes)});
    }
    while (static_cast<int>(population.size()) < popSize) {
        std::vector<int> genes(n);
        for (int i = 0; i < n; ++i) genes[i] = domain[i][rng.below(domain[i].size())];
        population.push_back({genes, evaluate(genes)});
    }

    auto sortPopulation = [&](std::vector<Individual>& pop) {
        std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
            return strictlyBetter(a.fitness, b.fitness);
        });
    };
    sortPopulation(population);

    Individual best = population.front();

    const int eliteCount = std::min(
        popSize, static_cast<int>(std::floor(params.elitismFraction * popSize)));

    for (int gen = 0; gen < params.generations; ++gen) {
        std::vector<Individual> next;
        next.reserve(popSize);
        for (int i = 0; i < eliteCount; ++i) next.push_back(population[i]);

        const auto tournament = [&]() -> const Individual& {
            const Individual& a = population[rng.below(popSize)];
            const Individual& b = population[rng.below(popSize)];
            return strictlyBetter(b.fitness, a.fitness) ? b : a;
        };

        while (static_cast<int>(next.size()) < popSize) {
            const Individual& p1 = tournament();
            const Individual& p2 = tournament();

            Individual child;
            if (rng.chance(params.crossoverRate)) {
                child.genes.resize(n);
                for (int i = 0; i < n; ++i)
                    child.genes[i] = rng.chance(0.5) ? p1.genes[i] : p2.genes[i];
            } else {
                child.genes = strictlyBetter(p2.fitness, p1.fitness) ? p2.genes : p1.genes;
            }

            for (int i = 0; i < n; ++i)
                if (rng.chance(params.mutationRate))
                    child.genes[i] = domain[i][rng.below(domain[i].size())];

            child.fitness = evaluate(child.genes);
            next.push_back(std::move(child));
        }

        population = std::move(next);
        sortPopulation(population);
        if (strictlyBetter(population.front().fitness, best.fitness)) best = population.front();
    }

    Decoded d = decodeChromosome(best.genes);
    Partition partition;
    for (int i = 0; i < n; ++i) partition.assignment[graph.nodes[i].docId] = d.labels[i];
    partition.k = d.k;
    partition.provenance.method = Method::GAICDA;
    partition.provenance.seed = params.rngSeed;
    partition.provenance.params = params.record();
    canonicalizeLabels(partition);
    return partition;
}

Partition refine(const Partition& partition, const std::vector<NormalizedVector>& vectors,
                 int targetClusters) {
    if (targetClusters < 1) throw ValidationError("targetClusters must be >= 1");
    if (partition.k < targetClusters)
        throw ValidationError("refinement only merges: partition has " +
                              std::to_string(partition.k) + " clusters, target is " +
                              std::to_string(targetClusters));

    std::map<std::string, const NormalizedVector*> byId;
    for (const auto& v : vectors) byId[v.docId] = &v;

    struct Cluster {
        std::vector<const NormalizedVector*> members;
        std::string minDocId;
    };

    std::map<int, Cluster> byLabel;
    for (const auto& [docId, label] : partition.assignment) {
        auto it = byId.find(docId);
        if (it == byId.end())
            throw ValidationError("partition references unknown docId: " + docId);
        auto& cluster = byLabel[label];
        cluster.members.push_back(it->second);
        if (cluster.minDocId.empty() || docId < cluster.minDocId) cluster.minDocId = docId;
    }

    std::vector<Cluster> clusters;
    for (auto& [label, c] : byLabel) clusters.push_back(std::move(c));

    const auto centroid = [](const Cluster& c) {
        std::vector<double> mean(c.members.front()->values.size(), 0.0);
        for (const auto* m : c.members)
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += m->values[i];
        for (double& x : mean) x /= static_cast<double>(c.members.size());
        return mean;
    };

    while (static_cast<int>(clusters.size()) > targetClusters) {
        // scanning in min-docId order makes the tie-break deterministic
        std::sort(clusters.begin(), clusters.end(),
                  [](const Cluster& a, const Cluster& b) { return a.minDocId < b.minDocId; });

        std::vector<std::vector<double>> centroids;
        centroids.reserve(clusters.size());
        for (const auto& c : clusters) centroids.push_back(centroid(c));

        std::size_t bestA = 0, bestB = 1;
        double bestDist = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                double d = euclidean(centroids[a], centroids[b]);
                if (d < bestDist) {
                    bestDist = d;
                    bestA = a;
                    bestB = b;
                }
            }
        }

        auto& dst = clusters[bestA];
        auto& src = clusters[bestB];
        dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
        dst.minDocId = std::min(dst.minDocId, src.minDocId);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bestB));
    }

    Partition out;
    out.provenance = partition.provenance;
    for (std::size_t label = 0; label < clusters.size(); ++label)
        for (const auto* m : clusters[label].members)
            out.assignment[m->docId] = static_cast<int>(label);
    out.k = static_cast<int>(clusters.size());
    canonicalizeLabels(out);
    return out;
}

Partition classifyGAICDA(const std::vector<FeatureVector>& vectors, const GaParams& params,
                         int thresholdT, int neighborCount,
                         const std::vector<FeatureId>& selected) {
    params.validate();
    if (static_cast<int>(vectors.size()) < params.targetClusters)
        throw ValidationError("need at least targetClusters documents");

    auto normalized = normalizeFeatures(vectors, selected);
    DocumentGraph graph = buildGraph(normalized, thresholdT, neighborCount);
    Partition coarse = clusterGA(graph, params);
    Partition final = refine(coarse, normalized, params.targetClusters);

    final.provenance.method = Method::GAICDA;
    final.provenance.seed = params.rngSeed;
    final.provenance.params = params.record();
    final.provenance.params["thresholdT"] = std::to_string(thresholdT);
    final.provenance.params["neighborCount"] = std::to_string(neighborCount);
    std::string names;
    for (FeatureId id : selected) {
        if (!names.empty()) names += ',';
        names += featureName(id);
    }
    final.provenance.params["features"] = names;
    return final;
}

} // namespace glyphrun
