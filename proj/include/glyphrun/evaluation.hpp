#ifndef GLYPHRUN_EVALUATION_HPP
#define GLYPHRUN_EVALUATION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glyphrun/gaicda.hpp"

namespace glyphrun {

struct ClassMetrics {
    double precision = 0;
    double recall = 0;
    double fMeasure = 0;
};

struct MetricStats {
    double mean = 0;
    double stdDev = 0; // sample standard deviation
};

struct EvalReport {
    std::map<ScriptId, ClassMetrics> classMetrics;
    ClassMetrics macro; // unweighted average over classes
    std::map<int, ScriptId> mapping; // cluster label -> script class
    std::vector<std::vector<int>> confusion; // [class][cluster], classes in enum order
    std::vector<ScriptId> confusionClasses;
    int documentCount = 0;
    int clusterCount = 0;
    Provenance provenance;
    int runCount = 1;
    std::optional<std::map<std::string, MetricStats>> runStats;
};

// Optimal one-to-one assignment of cluster labels to script classes over the
// agreement grid, enumerated exhaustively (k stays tiny here); ties resolve
// toward the lexicographically first assignment by cluster label.
std::map<int, ScriptId> alignClusters(const Partition& partition,
                                      const std::map<std::string, ScriptId>& truth);

// Per-class and macro precision / recall / F-measure after alignment.
// Truth must cover every docId in the partition.
EvalReport score(const Partition& partition, const std::map<std::string, ScriptId>& truth);

// Mean and sample standard deviation per metric across repeated runs.
EvalReport aggregateRuns(const std::vector<EvalReport>& reports);

// Key-value text report; aggregated metrics print as "mean (std)".
std::string formatReport(const EvalReport& report);

std::string formatConfusionCsv(const EvalReport& report);

} // namespace glyphrun

#endif
