#ifndef GLYPHRUN_EXPORTS_HPP
#define GLYPHRUN_EXPORTS_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "glyphrun/evaluation.hpp"
#include "glyphrun/gaicda.hpp"
#include "glyphrun/texture.hpp"

namespace glyphrun {

// Feature CSV: docId,script,sre,lre,gln,rln,rp; doubles at full precision.
// The script column is empty for documents without a known label.
std::string formatFeatureCsv(const std::vector<FeatureVector>& features,
                             const std::map<std::string, ScriptId>& scripts);

struct FeatureCsv {
    std::vector<FeatureVector> features;
    std::map<std::string, ScriptId> scripts; // only rows with a script label
};

FeatureCsv parseFeatureCsv(std::string_view content);

// Partition CSV: docId,cluster,method,seed.
std::string formatPartitionCsv(const Partition& partition);
Partition parsePartitionCsv(std::string_view content);

// Flat key-value run record, one `key=value` per line, sorted by key.
std::string formatParamRecord(const std::map<std::string, std::string>& params);

// Per-script min/max summary: script,feature,min,max rows.
struct FeatureRange {
    ScriptId script;
    FeatureId feature;
    double min = 0;
    double max = 0;
};

std::vector<FeatureRange> summarizeRanges(const std::vector<FeatureVector>& features,
                                          const std::map<std::string, ScriptId>& scripts);
std::string formatRangeCsv(const std::vector<FeatureRange>& ranges);

// Min-max range bars per script for one feature, as SVG. Every bar carries
// data-script / data-min / data-max attributes so the values can be read
// back without rasterizing.
std::string renderRangePlot(FeatureId feature, const std::vector<FeatureRange>& ranges);

} // namespace glyphrun

#endif
