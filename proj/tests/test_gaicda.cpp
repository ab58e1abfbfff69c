#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "glyphrun/gaicda.hpp"
#include "glyphrun/rng.hpp"

using namespace glyphrun;

namespace {

FeatureVector fv(std::string docId, double sre, double lre, double rp, double gln = 1,
                 double rln = 1) {
    FeatureVector f;
    f.docId = std::move(docId);
    f.sre = sre;
    f.lre = lre;
    f.gln = gln;
    f.rln = rln;
    f.rp = rp;
    return f;
}

NormalizedVector nv(std::string docId, std::vector<double> values) {
    return NormalizedVector{std::move(docId), std::move(values)};
}

// A graph assembled by hand (positions in index order, unit-ish weights).
DocumentGraph directGraph(int n, const std::vector<GraphEdge>& edges, int thresholdT = 1000) {
    DocumentGraph g;
    for (int i = 0; i < n; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "n%02d", i);
        g.nodes.push_back(nv(id, {static_cast<double>(i)}));
        g.position.push_back(i);
    }
    g.thresholdT = thresholdT;
    g.edges = edges;
    g.rebuildIndex();
    return g;
}

std::vector<GraphEdge> cliqueEdges(const std::vector<int>& nodes) {
    std::vector<GraphEdge> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            edges.push_back({std::min(nodes[i], nodes[j]), std::max(nodes[i], nodes[j]), 1.0});
    return edges;
}

// Exhaustive modularity maximum over every partition of n nodes, enumerated
// as restricted growth strings. Independent of the GA code path.
std::pair<double, std::vector<int>> bruteForceBestPartition(const DocumentGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> labels(n, 0);
    std::vector<int> best(n, 0);
    double bestQ = -2.0;

    auto recurse = [&](auto&& self, int i, int maxUsed) -> void {
        if (i == n) {
            double q = weightedModularity(g, labels);
            if (q > bestQ) {
                bestQ = q;
                best = labels;
            }
            return;
        }
        for (int l = 0; l <= maxUsed + 1; ++l) {
            labels[i] = l;
            self(self, i + 1, std::max(maxUsed, l));
        }
    };
    labels[0] = 0;
    recurse(recurse, 1, 0);
    return {bestQ, best};
}

std::map<std::string, std::set<std::string>> clusterSets(const Partition& p) {
    std::map<int, std::set<std::string>> byLabel;
    for (const auto& [docId, label] : p.assignment) byLabel[label].insert(docId);
    std::map<std::string, std::set<std::string>> canonical;
    for (auto& [label, docs] : byLabel) canonical[*docs.begin()] = docs;
    return canonical;
}

} // namespace

// ---------------------------------------------------------------------------
// normalization
// ---------------------------------------------------------------------------

TEST_CASE("two-point standardization lands on +-1") {
    auto out = normalizeFeatures({fv("a", 1, 0, 0), fv("b", 3, 0, 0)}, {FeatureId::Sre});
    REQUIRE(out.size() == 2);
    CHECK(out[0].values[0] == doctest::Approx(-1.0));
    CHECK(out[1].values[0] == doctest::Approx(1.0));
}

TEST_CASE("constant columns normalize to zero") {
    auto out = normalizeFeatures({fv("a", 5, 1, 2), fv("b", 5, 2, 3)},
                                 {FeatureId::Sre, FeatureId::Lre});
    CHECK(out[0].values[0] == 0.0);
    CHECK(out[1].values[0] == 0.0);
    CHECK(out[0].values[1] != 0.0);
}

TEST_CASE("normalization needs two vectors") {
    CHECK_THROWS_AS(normalizeFeatures({fv("a", 1, 1, 1)}, defaultFeatureSubset()),
                    ValidationError);
    CHECK_THROWS_AS(normalizeFeatures({}, defaultFeatureSubset()), ValidationError);
}

TEST_CASE("normalized batch has zero mean and unit variance") {
    Rng rng(11);
    std::vector<FeatureVector> vectors;
    for (int i = 0; i < 15; ++i)
        vectors.push_back(fv("d" + std::to_string(i), rng.uniform(), 1 + rng.uniform() * 20,
                             rng.uniform(), rng.uniform() * 3, rng.uniform() * 5));

    auto out = normalizeFeatures(vectors, defaultFeatureSubset());
    for (std::size_t col = 0; col < 3; ++col) {
        double mean = 0;
        for (const auto& v : out) mean += v.values[col];
        mean /= out.size();
        CHECK(std::abs(mean) < 1e-12);

        double var = 0;
        for (const auto& v : out) var += (v.values[col] - mean) * (v.values[col] - mean);
        var /= out.size();
        CHECK(std::abs(var - 1.0) < 1e-9);
    }
}

// ---------------------------------------------------------------------------
// graph construction
// ---------------------------------------------------------------------------

TEST_CASE("two identical vectors produce a single unit edge") {
    auto g = buildGraph({nv("a", {0, 0}), nv("b", {0, 0})}, 1, 1);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].weight == 1.0);
}

TEST_CASE("the ordering window excludes distant node pairs") {
    // lexicographic ordering puts these at positions 0,1,2; with T=1 the
    // outer pair cannot be linked even though neighborCount allows it
    auto g = buildGraph({nv("a", {0.0}), nv("b", {1.0}), nv("c", {2.0})}, 1, 3);
    for (const auto& e : g.edges)
        CHECK(std::abs(g.position[e.u] - g.position[e.v]) <= 1);
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : g.edges) pairs.emplace(e.u, e.v);
    CHECK(pairs.count({0, 2}) == 0);
    CHECK(pairs.count({0, 1}) == 1);
    CHECK(pairs.count({1, 2}) == 1);
}

TEST_CASE("graph construction validates its inputs") {
    CHECK_THROWS_AS(buildGraph({nv("a", {0.0})}, 1, 1), ValidationError);
    CHECK_THROWS_AS(buildGraph({nv("a", {0.0}), nv("b", {1.0})}, 0, 1), ValidationError);
    CHECK_THROWS_AS(buildGraph({nv("a", {0.0}), nv("b", {1.0})}, 1, 0), ValidationError);
}

TEST_CASE("graph invariants hold on a three-blob batch") {
    Rng rng(31);
    std::vector<NormalizedVector> vectors;
    const std::vector<std::vector<double>> centers = {{0, 0, 0}, {5, 5, 5}, {10, 0, 5}};
    for (int blob = 0; blob < 3; ++blob)
        for (int i = 0; i < 5; ++i) {
            std::vector<double> v = centers[blob];
            for (double& x : v) x += rng.normal(0, 0.1);
            vectors.push_back(nv("b" + std::to_string(blob) + "d" + std::to_string(i), v));
        }

    auto g = buildGraph(vectors, 5, 3);
    std::vector<int> degree(vectors.size(), 0);
    for (const auto& e : g.edges) {
        CHECK(e.u < e.v);
        CHECK(e.weight > 0);
        CHECK(std::isfinite(e.weight));
        CHECK(std::abs(g.position[e.u] - g.position[e.v]) <= 5);
        ++degree[e.u];
        ++degree[e.v];
    }
    for (int d : degree) {
        CHECK(d >= 1);
        CHECK(d <= 6); // 2 * neighborCount on this data
    }
}

// ---------------------------------------------------------------------------
// modularity + genetic clustering
// ---------------------------------------------------------------------------

TEST_CASE("weighted modularity of two disjoint cliques") {
    auto edges = cliqueEdges({0, 1, 2, 3});
    auto more = cliqueEdges({4, 5, 6, 7});
    edges.insert(edges.end(), more.begin(), more.end());
    auto g = directGraph(8, edges);

    std::vector<int> planted = {0, 0, 0, 0, 1, 1, 1, 1};
    CHECK(weightedModularity(g, planted) == doctest::Approx(0.5));
    std::vector<int> lumped(8, 0);
    CHECK(weightedModularity(g, lumped) == doctest::Approx(0.0));
}

TEST_CASE("clusterGA finds the two disjoint cliques for every seed") {
    auto edges = cliqueEdges({0, 1, 2, 3});
    auto more = cliqueEdges({4, 5, 6, 7});
    edges.insert(edges.end(), more.begin(), more.end());
    auto g = directGraph(8, edges);

    GaParams params;
    params.targetClusters = 2;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        params.rngSeed = seed;
        auto p = clusterGA(g, params);
        REQUIRE(p.k == 2);
        auto sets = clusterSets(p);
        CHECK(sets.at("n00") == std::set<std::string>{"n00", "n01", "n02", "n03"});
        CHECK(sets.at("n04") == std::set<std::string>{"n04", "n05", "n06", "n07"});
    }
}

TEST_CASE("clusterGA on a bridged two-clique graph matches the brute-force optimum") {
    auto edges = cliqueEdges({0, 1, 2, 3});
    auto more = cliqueEdges({4, 5, 6, 7});
    edges.insert(edges.end(), more.begin(), more.end());
    edges.push_back({3, 4, 1.0}); // bridge
    auto g = directGraph(8, edges);

    auto [bestQ, bestLabels] = bruteForceBestPartition(g);
    // the optimum is the planted two-clique split
    CHECK(bestLabels == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1});

    GaParams params;
    params.targetClusters = 2;
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        params.rngSeed = seed;
        auto p = clusterGA(g, params);
        std::vector<int> labels(8);
        for (int i = 0; i < 8; ++i) labels[i] = p.assignment.at(g.nodes[i].docId);
        if (weightedModularity(g, labels) == doctest::Approx(bestQ).epsilon(1e-12)) ++recovered;
    }
    CHECK(recovered >= 9);
}

TEST_CASE("a single edge collapses into one cluster when allowed") {
    auto g = directGraph(2, {{0, 1, 1.0}});
    GaParams params;
    params.targetClusters = 1;
    params.rngSeed = 3;
    auto p = clusterGA(g, params);
    CHECK(p.k == 1);

    // enumerating both decodable partitions confirms the choice
    CHECK(weightedModularity(g, {0, 0}) > weightedModularity(g, {0, 1}));
}

TEST_CASE("clusterGA is deterministic for a fixed seed") {
    auto edges = cliqueEdges({0, 1, 2});
    edges.push_back({2, 3, 0.5});
    auto more = cliqueEdges({3, 4, 5});
    edges.insert(edges.end(), more.begin(), more.end());
    auto g = directGraph(6, edges);

    GaParams params;
    params.targetClusters = 2;
    params.rngSeed = 1234;
    auto a = clusterGA(g, params);
    auto b = clusterGA(g, params);
    CHECK(a.assignment == b.assignment);
    CHECK(a.k == b.k);
}

TEST_CASE("GA result never loses to the trivial partitions") {
    Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<NormalizedVector> vectors;
        for (int i = 0; i < 10; ++i)
            vectors.push_back(nv("d" + std::to_string(i),
                                 {rng.normal(0, 1), rng.normal(0, 1)}));
        auto g = buildGraph(vectors, 4, 2);

        GaParams params;
        params.targetClusters = 1; // unconstrained modularity search
        params.rngSeed = trial;
        params.generations = 50;
        auto p = clusterGA(g, params);

        std::vector<int> labels(vectors.size());
        for (std::size_t i = 0; i < vectors.size(); ++i)
            labels[i] = p.assignment.at(g.nodes[i].docId);
        double q = weightedModularity(g, labels);

        std::vector<int> singletons(vectors.size());
        std::iota(singletons.begin(), singletons.end(), 0);
        std::vector<int> lump(vectors.size(), 0);
        CHECK(q >= weightedModularity(g, singletons) - 1e-12);
        CHECK(q >= weightedModularity(g, lump) - 1e-12);
    }
}

TEST_CASE("clusterGA rejects an empty graph") {
    DocumentGraph g;
    g.rebuildIndex();
    GaParams params;
    CHECK_THROWS_AS(clusterGA(g, params), ValidationError);
}

// ---------------------------------------------------------------------------
// refinement
// ---------------------------------------------------------------------------

TEST_CASE("refine is the identity when already at target") {
    std::vector<NormalizedVector> vectors = {nv("a", {0}), nv("b", {1}), nv("c", {10})};
    Partition p;
    p.assignment = {{"a", 0}, {"b", 0}, {"c", 1}};
    p.k = 2;
    auto out = refine(p, vectors, 2);
    CHECK(out.assignment == p.assignment);
    CHECK(out.k == 2);
}

TEST_CASE("refine merges nearest centroids on a line") {
    std::vector<NormalizedVector> vectors = {nv("a", {0}), nv("b", {1}), nv("c", {10}),
                                             nv("d", {11})};
    Partition p;
    p.assignment = {{"a", 0}, {"b", 1}, {"c", 2}, {"d", 3}};
    p.k = 4;
    auto out = refine(p, vectors, 2);
    REQUIRE(out.k == 2);
    auto sets = clusterSets(out);
    CHECK(sets.at("a") == std::set<std::string>{"a", "b"});
    CHECK(sets.at("c") == std::set<std::string>{"c", "d"});
}

TEST_CASE("refine only merges") {
    std::vector<NormalizedVector> vectors = {nv("a", {0}), nv("b", {1})};
    Partition p;
    p.assignment = {{"a", 0}, {"b", 1}};
    p.k = 2;
    CHECK_THROWS_AS(refine(p, vectors, 3), ValidationError);
}

TEST_CASE("refine matches an independent greedy merge oracle") {
    Rng rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 12;
        std::vector<NormalizedVector> vectors;
        for (int i = 0; i < n; ++i) {
            char id[8];
            std::snprintf(id, sizeof(id), "d%02d", i);
            vectors.push_back(nv(id, {rng.normal(0, 2), rng.normal(0, 2)}));
        }
        Partition p;
        for (int i = 0; i < n; ++i) p.assignment[vectors[i].docId] = i % 5;
        p.k = 5;
        canonicalizeLabels(p);

        auto ours = refine(p, vectors, 3);

        // oracle: label -> member list, recompute centroids from scratch,
        // merge the closest pair (ties by smallest member docId pair)
        std::map<int, std::vector<int>> groups;
        for (int i = 0; i < n; ++i) groups[p.assignment.at(vectors[i].docId)].push_back(i);
        while (groups.size() > 3) {
            auto centroidOf = [&](const std::vector<int>& members) {
                std::vector<double> c(2, 0.0);
                for (int m : members)
                    for (int col = 0; col < 2; ++col) c[col] += vectors[m].values[col];
                for (double& x : c) x /= members.size();
                return c;
            };
            auto minIdOf = [&](const std::vector<int>& members) {
                std::string lo = vectors[members[0]].docId;
                for (int m : members) lo = std::min(lo, vectors[m].docId);
                return lo;
            };

            double bestDist = 1e300;
            std::pair<std::string, std::string> bestIds{"~", "~"};
            int keyA = -1, keyB = -1;
            for (auto itA = groups.begin(); itA != groups.end(); ++itA) {
                for (auto itB = std::next(itA); itB != groups.end(); ++itB) {
                    auto ca = centroidOf(itA->second);
                    auto cb = centroidOf(itB->second);
                    double dx = ca[0] - cb[0], dy = ca[1] - cb[1];
                    double dist = std::sqrt(dx * dx + dy * dy);
                    auto ids = std::minmax(minIdOf(itA->second), minIdOf(itB->second));
                    if (dist < bestDist ||
                        (dist == bestDist && std::pair(ids.first, ids.second) < bestIds)) {
                        bestDist = dist;
                        bestIds = {ids.first, ids.second};
                        keyA = itA->first;
                        keyB = itB->first;
                    }
                }
            }
            auto& dst = groups[keyA];
            auto& src = groups[keyB];
            dst.insert(dst.end(), src.begin(), src.end());
            groups.erase(keyB);
        }

        Partition expected;
        int label = 0;
        for (auto& [key, members] : groups) {
            for (int m : members) expected.assignment[vectors[m].docId] = label;
            ++label;
        }
        expected.k = label;
        canonicalizeLabels(expected);

        CHECK(ours.assignment == expected.assignment);
    }
}

TEST_CASE("refine never empties a cluster and never increases k") {
    Rng rng(707);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 10;
        std::vector<NormalizedVector> vectors;
        for (int i = 0; i < n; ++i)
            vectors.push_back(nv("d" + std::to_string(i), {rng.uniform(), rng.uniform()}));
        Partition p;
        for (int i = 0; i < n; ++i)
            p.assignment[vectors[i].docId] = static_cast<int>(rng.below(6));
        canonicalizeLabels(p);
        if (p.k < 2) continue;

        int target = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(p.k)));
        auto out = refine(p, vectors, target);
        CHECK(out.k == target);

        std::vector<int> sizes(out.k, 0);
        for (const auto& [docId, label] : out.assignment) ++sizes[label];
        for (int s : sizes) CHECK(s > 0);
    }
}

// ---------------------------------------------------------------------------
// end-to-end pipeline
// ---------------------------------------------------------------------------

TEST_CASE("three distinct documents with target three become singletons") {
    std::vector<FeatureVector> vectors = {fv("a", 0.2, 18, 0.2), fv("b", 0.5, 8, 0.4),
                                          fv("c", 0.8, 2, 0.7)};
    GaParams params;
    params.targetClusters = 3;
    params.rngSeed = 5;
    auto p = classifyGAICDA(vectors, params, 5, 3);
    CHECK(p.k == 3);
    std::set<int> labels;
    for (const auto& [docId, label] : p.assignment) labels.insert(label);
    CHECK(labels.size() == 3);
}

TEST_CASE("duplicated documents stay together") {
    std::vector<FeatureVector> vectors;
    for (int i = 0; i < 6; ++i) vectors.push_back(fv("dup" + std::to_string(i), 0.5, 5, 0.5));
    vectors.push_back(fv("out1", 0.9, 1.2, 0.95));
    vectors.push_back(fv("out2", 0.1, 40, 0.1));

    GaParams params;
    params.targetClusters = 3;
    params.rngSeed = 8;
    auto p = classifyGAICDA(vectors, params, 5, 3);
    REQUIRE(p.k == 3);
    std::set<int> dupLabels;
    for (int i = 0; i < 6; ++i) dupLabels.insert(p.assignment.at("dup" + std::to_string(i)));
    CHECK(dupLabels.size() == 1);
    CHECK(p.assignment.at("out1") != *dupLabels.begin());
    CHECK(p.assignment.at("out2") != *dupLabels.begin());
}

TEST_CASE("pipeline needs at least targetClusters documents") {
    GaParams params;
    params.targetClusters = 3;
    CHECK_THROWS_AS(classifyGAICDA({fv("a", 1, 1, 1), fv("b", 2, 2, 2)}, params, 5, 3),
                    ValidationError);
}

TEST_CASE("three planted groups are recovered and provenance is recorded") {
    Rng rng(1001);
    std::vector<FeatureVector> vectors;
    const double centers[3][3] = {{0.7, 4, 0.55}, {0.6, 12, 0.38}, {0.5, 80, 0.15}};
    for (int g = 0; g < 3; ++g)
        for (int i = 0; i < 5; ++i)
            vectors.push_back(fv("g" + std::to_string(g) + "d" + std::to_string(i),
                                 centers[g][0] + rng.normal(0, 0.01),
                                 centers[g][1] * (1 + rng.normal(0, 0.05)),
                                 centers[g][2] + rng.normal(0, 0.01)));

    GaParams params;
    params.targetClusters = 3;
    params.rngSeed = 42;
    auto p = classifyGAICDA(vectors, params, 5, 3);
    REQUIRE(p.k == 3);
    for (int g = 0; g < 3; ++g) {
        int label = p.assignment.at("g" + std::to_string(g) + "d0");
        for (int i = 1; i < 5; ++i)
            CHECK(p.assignment.at("g" + std::to_string(g) + "d" + std::to_string(i)) == label);
    }
    CHECK(p.provenance.method == Method::GAICDA);
    CHECK(p.provenance.seed == 42);
    CHECK(p.provenance.params.at("thresholdT") == "5");
    CHECK(p.provenance.params.at("features") == "sre,lre,rp");
}

TEST_CASE("feature subset changes values but not the partition scaffolding") {
    Rng rng(2002);
    std::vector<FeatureVector> vectors;
    for (int g = 0; g < 3; ++g)
        for (int i = 0; i < 4; ++i)
            vectors.push_back(fv("s" + std::to_string(g) + std::to_string(i),
                                 0.2 + 0.3 * g + rng.normal(0, 0.01),
                                 5 + 10 * g + rng.normal(0, 0.1),
                                 0.2 + 0.25 * g + rng.normal(0, 0.01),
                                 1.5 + 0.5 * g + rng.normal(0, 0.02),
                                 2 + g + rng.normal(0, 0.02)));

    GaParams params;
    params.targetClusters = 3;
    params.rngSeed = 7;
    auto defaultRun = classifyGAICDA(vectors, params, 5, 3);
    auto allRun = classifyGAICDA(vectors, params, 5, 3,
                                 {FeatureId::Sre, FeatureId::Lre, FeatureId::Gln,
                                  FeatureId::Rln, FeatureId::Rp});

    CHECK(defaultRun.k == allRun.k);
    std::set<std::string> defaultIds, allIds;
    for (const auto& [docId, label] : defaultRun.assignment) defaultIds.insert(docId);
    for (const auto& [docId, label] : allRun.assignment) allIds.insert(docId);
    CHECK(defaultIds == allIds);
}

TEST_CASE("canonical labels follow ascending docId order") {
    Partition p;
    p.assignment = {{"a", 7}, {"b", 7}, {"c", 2}, {"d", 5}};
    canonicalizeLabels(p);
    CHECK(p.k == 3);
    CHECK(p.assignment.at("a") == 0);
    CHECK(p.assignment.at("b") == 0);
    CHECK(p.assignment.at("c") == 1);
    CHECK(p.assignment.at("d") == 2);
}

TEST_CASE("GA parameter validation") {
    GaParams params;
    params.populationSize = 1;
    CHECK_THROWS_AS(params.validate(), ValidationError);
    params = GaParams{};
    params.mutationRate = 1.5;
    CHECK_THROWS_AS(params.validate(), ValidationError);
    params = GaParams{};
    params.targetClusters = 0;
    CHECK_THROWS_AS(params.validate(), ValidationError);
}
