#include "glyphrun/exports.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "glyphrun/textio.hpp"

namespace glyphrun {

std::string formatFeatureCsv(const std::vector<FeatureVector>& features,
                             const std::map<std::string, ScriptId>& scripts) {
    std::string out = "docId,script,sre,lre,gln,rln,rp\n";
    for (const auto& f : features) {
        out += f.docId;
        out += ',';
        auto it = scripts.find(f.docId);
        if (it != scripts.end()) out += scriptName(it->second);
        out += ',' + formatDouble(f.sre) + ',' + formatDouble(f.lre) + ',' + formatDouble(f.gln) +
               ',' + formatDouble(f.rln) + ',' + formatDouble(f.rp) + '\n';
    }
    return out;
}

namespace {

double parseDoubleField(const std::string& field, const std::string& context) {
    try {
        return std::stod(field);
    } catch (const std::exception&) {
        throw ValidationError("invalid number '" + field + "' in " + context);
    }
}

} // namespace

FeatureCsv parseFeatureCsv(std::string_view content) {
    auto lines = splitLines(content);
    if (lines.empty()) throw ValidationError("empty feature CSV");
    if (trim(lines[0]) != "docId,script,sre,lre,gln,rln,rp")
        throw ValidationError("unexpected feature CSV header: " + lines[0]);

    FeatureCsv out;
    std::set<std::string> ids;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto fields = splitOn(lines[i], ',');
        if (fields.size() != 7)
            throw ValidationError("malformed feature row: " + lines[i]);
        FeatureVector f;
        f.docId = trim(fields[0]);
        if (!ids.insert(f.docId).second)
            throw ValidationError("duplicate docId in feature CSV: " + f.docId);
        f.sre = parseDoubleField(fields[2], "feature row " + f.docId);
        f.lre = parseDoubleField(fields[3], "feature row " + f.docId);
        f.gln = parseDoubleField(fields[4], "feature row " + f.docId);
        f.rln = parseDoubleField(fields[5], "feature row " + f.docId);
        f.rp = parseDoubleField(fields[6], "feature row " + f.docId);
        std::string scriptField = trim(fields[1]);
        if (!scriptField.empty()) {
            auto script = scriptFromName(scriptField);
            if (!script) throw ValidationError("unknown script '" + scriptField + "' in feature CSV");
            out.scripts[f.docId] = *script;
        }
        out.features.push_back(std::move(f));
    }
    if (out.features.empty()) throw ValidationError("feature CSV has no rows");
    return out;
}

std::string formatPartitionCsv(const Partition& partition) {
    std::string out = "docId,cluster,method,seed\n";
    const std::string method(methodName(partition.provenance.method));
    const std::string seed = std::to_string(partition.provenance.seed);
    for (const auto& [docId, label] : partition.assignment)
        out += docId + ',' + std::to_string(label) + ',' + method + ',' + seed + '\n';
    return out;
}

Partition parsePartitionCsv(std::string_view content) {
    auto lines = splitLines(content);
    if (lines.empty()) throw ValidationError("empty partition CSV");
    if (trim(lines[0]) != "docId,cluster,method,seed")
        throw ValidationError("unexpected partition CSV header: " + lines[0]);

    Partition p;
    bool first = true;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto fields = splitOn(lines[i], ',');
        if (fields.size() != 4) throw ValidationError("malformed partition row: " + lines[i]);
        std::string docId = trim(fields[0]);
        int label;
        try {
            label = std::stoi(fields[1]);
        } catch (const std::exception&) {
            throw ValidationError("invalid cluster label in row: " + lines[i]);
        }
        if (p.assignment.count(docId))
            throw ValidationError("duplicate docId in partition CSV: " + docId);
        p.assignment[docId] = label;
        if (first) {
            auto method = methodFromName(trim(fields[2]));
            if (!method) throw ValidationError("unknown method in partition CSV: " + fields[2]);
            p.provenance.method = *method;
            p.provenance.seed = std::stoull(trim(fields[3]));
            first = false;
        }
    }
    if (p.assignment.empty()) throw ValidationError("partition CSV has no rows");
    canonicalizeLabels(p); // enforce contiguous non-empty labels
    return p;
}

std::string formatParamRecord(const std::map<std::string, std::string>& params) {
    std::string out;
    for (const auto& [key, value] : params) out += key + "=" + value + "\n";
    return out;
}

std::vector<FeatureRange> summarizeRanges(const std::vector<FeatureVector>& features,
                                          const std::map<std::string, ScriptId>& scripts) {
    std::vector<FeatureRange> ranges;
    for (ScriptId script : kAllScripts) {
        for (FeatureId feature : kAllFeatures) {
            FeatureRange r;
            r.script = script;
            r.feature = feature;
            r.min = std::numeric_limits<double>::infinity();
            r.max = -std::numeric_limits<double>::infinity();
            bool any = false;
            for (const auto& f : features) {
                auto it = scripts.find(f.docId);
                if (it == scripts.end() || it->second != script) continue;
                double v = featureValue(f, feature);
                r.min = std::min(r.min, v);
                r.max = std::max(r.max, v);
                any = true;
            }
            if (any) ranges.push_back(r);
        }
    }
    return ranges;
}

std::string formatRangeCsv(const std::vector<FeatureRange>& ranges) {
    std::string out = "script,feature,min,max\n";
    for (const auto& r : ranges) {
        out += scriptName(r.script);
        out += ',';
        out += featureName(r.feature);
        out += ',' + formatDouble(r.min) + ',' + formatDouble(r.max) + '\n';
    }
    return out;
}

std::string renderRangePlot(FeatureId feature, const std::vector<FeatureRange>& ranges) {
    std::vector<FeatureRange> bars;
    for (const auto& r : ranges)
        if (r.feature == feature) bars.push_back(r);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& b : bars) {
        lo = std::min(lo, b.min);
        hi = std::max(hi, b.max);
    }
    if (bars.empty()) {
        lo = 0;
        hi = 1;
    }
    double span = hi - lo;
    if (span <= 0) span = 1;
    lo -= span * 0.05;
    span *= 1.1;

    const int width = 480, height = 260;
    const int plotLeft = 70, plotRight = width - 20;
    const int plotTop = 40, plotBottom = height - 40;

    const auto yOf = [&](double v) {
        return plotBottom - (v - lo) / span * (plotBottom - plotTop);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "  <title>" + std::string(featureName(feature)) + " range by script</title>\n";
    svg += "  <text x=\"" + std::to_string(width / 2) + "\" y=\"20\" text-anchor=\"middle\">" +
           std::string(featureName(feature)) + "</text>\n";
    svg += "  <line x1=\"" + std::to_string(plotLeft) + "\" y1=\"" + std::to_string(plotBottom) +
           "\" x2=\"" + std::to_string(plotRight) + "\" y2=\"" + std::to_string(plotBottom) +
           "\" stroke=\"black\"/>\n";

    const int barWidth = 40;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& b = bars[i];
        int cx = plotLeft + static_cast<int>((i + 0.5) * (plotRight - plotLeft) /
                                             std::max<std::size_t>(bars.size(), 1));
        double yTop = yOf(b.max);
        double yBot = yOf(b.min);
        svg += "  <rect x=\"" + std::to_string(cx - barWidth / 2) + "\" y=\"" +
               formatDouble(yTop) + "\" width=\"" + std::to_string(barWidth) + "\" height=\"" +
               formatDouble(std::max(yBot - yTop, 1.0)) + "\" fill=\"#4477aa\"" +
               " data-script=\"" + std::string(scriptName(b.script)) + "\"" + " data-feature=\"" +
               std::string(featureName(b.feature)) + "\"" + " data-min=\"" + formatDouble(b.min) +
               "\"" + " data-max=\"" + formatDouble(b.max) + "\"/>\n";
        svg += "  <text x=\"" + std::to_string(cx) + "\" y=\"" + std::to_string(plotBottom + 18) +
               "\" text-anchor=\"middle\">" + std::string(scriptName(b.script)) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace glyphrun
