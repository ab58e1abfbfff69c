#include "glyphrun/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "glyphrun/textio.hpp"

namespace glyphrun {

namespace {

std::vector<ScriptId> classesIn(const std::map<std::string, ScriptId>& truth) {
    std::vector<ScriptId> classes;
    for (ScriptId s : kAllScripts) {
        bool present = false;
        for (const auto& [docId, script] : truth)
            if (script == s) {
                present = true;
                break;
            }
        if (present) classes.push_back(s);
    }
    return classes;
}

// agreement[classIdx][cluster]
std::vector<std::vector<int>> overlapGrid(const Partition& partition,
                                          const std::map<std::string, ScriptId>& truth,
                                          const std::vector<ScriptId>& classes) {
    std::vector<std::vector<int>> grid(classes.size(), std::vector<int>(partition.k, 0));
    for (const auto& [docId, label] : partition.assignment) {
        auto it = truth.find(docId);
        if (it == truth.end())
            throw ValidationError("truth has no label for docId: " + docId);
        auto pos = std::find(classes.begin(), classes.end(), it->second);
        grid[pos - classes.begin()][label] += 1;
    }
    return grid;
}

double fMeasureOf(double precision, double recall) {
    double denom = precision + recall;
    return denom > 0 ? 2.0 * precision * recall / denom : 0.0;
}

} // namespace

std::map<int, ScriptId> alignClusters(const Partition& partition,
                                      const std::map<std::string, ScriptId>& truth) {
    if (partition.assignment.empty()) throw ValidationError("cannot align an empty partition");
    const auto classes = classesIn(truth);
    const auto grid = overlapGrid(partition, truth, classes);
    const int k = partition.k;
    const int c = static_cast<int>(classes.size());

    // depth-first over classes, each taking an unused cluster (or none when
    // clusters are scarce). At most (k+1)^c assignments, and clusters are
    // tried in ascending label order so strict improvement keeps the
    // lowest-label optimal assignment.
    std::vector<int> current(c, -1), best(c, -1);
    std::vector<bool> taken(k, false);
    int bestScore = -1;

    auto recurse = [&](auto&& self, int cls, int score) -> void {
        if (cls == c) {
            if (score > bestScore) {
                bestScore = score;
                best = current;
            }
            return;
        }
        for (int cluster = 0; cluster < k; ++cluster) {
            if (taken[cluster]) continue;
            taken[cluster] = true;
            current[cls] = cluster;
            self(self, cls + 1, score + grid[cls][cluster]);
            taken[cluster] = false;
            current[cls] = -1;
        }
        // a class may stay unmatched only when clusters are outnumbered
        if (k < c) self(self, cls + 1, score);
    };
    recurse(recurse, 0, 0);

    std::map<int, ScriptId> mapping;
    for (int cls = 0; cls < c; ++cls)
        if (best[cls] >= 0) mapping[best[cls]] = classes[cls];
    return mapping;
}

EvalReport score(const Partition& partition, const std::map<std::string, ScriptId>& truth) {
    for (const auto& [docId, label] : partition.assignment)
        if (!truth.count(docId))
            throw ValidationError("truth has no label for docId: " + docId);

    const auto classes = classesIn(truth);
    const auto grid = overlapGrid(partition, truth, classes);
    const auto mapping = alignClusters(partition, truth);

    EvalReport report;
    report.mapping = mapping;
    report.confusion = grid;
    report.confusionClasses = classes;
    report.documentCount = static_cast<int>(partition.assignment.size());
    report.clusterCount = partition.k;
    report.provenance = partition.provenance;

    double macroP = 0, macroR = 0, macroF = 0;
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        const ScriptId script = classes[ci];

        int truthTotal = 0;
        for (int cluster = 0; cluster < partition.k; ++cluster) truthTotal += grid[ci][cluster];

        // the cluster mapped to this class, if any
        int mapped = -1;
        for (const auto& [cluster, cls] : mapping)
            if (cls == script) mapped = cluster;

        int truePositive = 0, retrieved = 0;
        if (mapped >= 0) {
            truePositive = grid[ci][mapped];
            for (std::size_t cj = 0; cj < classes.size(); ++cj) retrieved += grid[cj][mapped];
        }

        ClassMetrics m;
        m.precision = retrieved > 0 ? static_cast<double>(truePositive) / retrieved : 0.0;
        m.recall = truthTotal > 0 ? static_cast<double>(truePositive) / truthTotal : 0.0;
        m.fMeasure = fMeasureOf(m.precision, m.recall);
        report.classMetrics[script] = m;

        macroP += m.precision;
        macroR += m.recall;
        macroF += m.fMeasure;
    }

    const double count = static_cast<double>(classes.size());
    report.macro.precision = macroP / count;
    report.macro.recall = macroR / count;
    report.macro.fMeasure = macroF / count;
    return report;
}

namespace {

std::vector<std::pair<std::string, double>> metricRows(const EvalReport& r) {
    std::vector<std::pair<std::string, double>> rows;
    rows.emplace_back("macro.precision", r.macro.precision);
    rows.emplace_back("macro.recall", r.macro.recall);
    rows.emplace_back("macro.fmeasure", r.macro.fMeasure);
    for (const auto& [script, m] : r.classMetrics) {
        std::string base = "class." + std::string(scriptName(script)) + ".";
        rows.emplace_back(base + "precision", m.precision);
        rows.emplace_back(base + "recall", m.recall);
        rows.emplace_back(base + "fmeasure", m.fMeasure);
    }
    return rows;
}

} // namespace

EvalReport aggregateRuns(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw ValidationError("no reports to aggregate");

    EvalReport out = reports.front();
    out.runCount = static_cast<int>(reports.size());

    std::map<std::string, MetricStats> stats;
    const auto keys = metricRows(reports.front());
    for (const auto& [key, first] : keys) {
        std::vector<double> values;
        values.reserve(reports.size());
        for (const auto& r : reports) {
            for (const auto& [k2, v] : metricRows(r))
                if (k2 == key) values.push_back(v);
        }

        MetricStats s;
        for (double v : values) s.mean += v;
        s.mean /= static_cast<double>(values.size());
        if (values.size() > 1) {
            double ss = 0;
            for (double v : values) ss += (v - s.mean) * (v - s.mean);
            s.stdDev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        stats[key] = s;
    }

    // expose the means as the aggregate's headline metrics
    out.macro.precision = stats["macro.precision"].mean;
    out.macro.recall = stats["macro.recall"].mean;
    out.macro.fMeasure = stats["macro.fmeasure"].mean;
    for (auto& [script, m] : out.classMetrics) {
        std::string base = "class." + std::string(scriptName(script)) + ".";
        m.precision = stats[base + "precision"].mean;
        m.recall = stats[base + "recall"].mean;
        m.fMeasure = stats[base + "fmeasure"].mean;
    }
    out.runStats = std::move(stats);
    return out;
}

std::string formatReport(const EvalReport& report) {
    std::string out;
    out += "documents: " + std::to_string(report.documentCount) + "\n";
    out += "clusters: " + std::to_string(report.clusterCount) + "\n";
    out += "method: " + std::string(methodName(report.provenance.method)) + "\n";
    out += "seed: " + std::to_string(report.provenance.seed) + "\n";
    out += "runs: " + std::to_string(report.runCount) + "\n";

    for (const auto& [cluster, script] : report.mapping)
        out += "mapping." + std::to_string(cluster) + ": " + std::string(scriptName(script)) + "\n";

    if (report.runStats) {
        for (const auto& [key, s] : *report.runStats)
            out += key + ": " + formatDouble(s.mean) + " (" + formatDouble(s.stdDev) + ")\n";
    } else {
        for (const auto& [key, value] : metricRows(report))
            out += key + ": " + formatDouble(value) + "\n";
    }
    return out;
}

std::string formatConfusionCsv(const EvalReport& report) {
    std::string out = "class";
    for (int cluster = 0; cluster < report.clusterCount; ++cluster)
        out += ",cluster" + std::to_string(cluster);
    out += "\n";
    for (std::size_t ci = 0; ci < report.confusionClasses.size(); ++ci) {
        out += scriptName(report.confusionClasses[ci]);
        for (int cluster = 0; cluster < report.clusterCount; ++cluster)
            out += "," + std::to_string(report.confusion[ci][cluster]);
        out += "\n";
    }
    return out;
}

} // namespace glyphrun
