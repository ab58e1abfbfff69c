#include "glyphrun/texture.hpp"

#include <algorithm>

namespace glyphrun {

std::string_view featureName(FeatureId id) {
    switch (id) {
    case FeatureId::Sre: return "sre";
    case FeatureId::Lre: return "lre";
    case FeatureId::Gln: return "gln";
    case FeatureId::Rln: return "rln";
    case FeatureId::Rp: return "rp";
    }
    return "?";
}

std::optional<FeatureId> featureFromName(std::string_view name) {
    for (FeatureId id : kAllFeatures)
        if (name == featureName(id)) return id;
    return std::nullopt;
}

double featureValue(const FeatureVector& v, FeatureId id) {
    switch (id) {
    case FeatureId::Sre: return v.sre;
    case FeatureId::Lre: return v.lre;
    case FeatureId::Gln: return v.gln;
    case FeatureId::Rln: return v.rln;
    case FeatureId::Rp: return v.rp;
    }
    return 0;
}

std::vector<FeatureId> defaultFeatureSubset() {
    return {FeatureId::Sre, FeatureId::Lre, FeatureId::Rp};
}

RunLengthMatrix buildRunLengthMatrix(const CodeSequence& seq) {
    if (seq.codes.empty()) throw EmptyDocumentError(seq.docId);

    // First pass: collect maximal runs. A forced break restarts the current
    // run even between equal codes.
    std::vector<std::pair<std::uint8_t, std::uint64_t>> runs;
    std::size_t nextBreak = 0;
    std::uint8_t current = seq.codes[0];
    std::uint64_t length = 0;
    for (std::size_t i = 0; i < seq.codes.size(); ++i) {
        bool forced = nextBreak < seq.runBreaks.size() && seq.runBreaks[nextBreak] == i;
        if (forced) ++nextBreak;
        if (i > 0 && (seq.codes[i] != current || forced)) {
            runs.emplace_back(current, length);
            current = seq.codes[i];
            length = 0;
        }
        ++length;
    }
    runs.emplace_back(current, length);

    RunLengthMatrix m;
    m.pixelCount = seq.codes.size();
    m.runCount = runs.size();
    for (const auto& [code, len] : runs) m.maxRunLength = std::max<std::size_t>(m.maxRunLength, len);
    for (auto& row : m.counts) row.assign(m.maxRunLength, 0);
    for (const auto& [code, len] : runs) ++m.counts[code][len - 1];
    return m;
}

DerivedRunStats deriveStats(const RunLengthMatrix& m) {
    DerivedRunStats d;
    d.runLengthRunNumberVector.assign(m.maxRunLength, 0);
    for (std::size_t i = 0; i < kGrayLevelCount; ++i) {
        d.pixelNumberMatrix[i].assign(m.maxRunLength, 0);
        for (std::size_t j = 1; j <= m.maxRunLength; ++j) {
            std::uint64_t p = m.counts[i][j - 1];
            d.pixelNumberMatrix[i][j - 1] = p * j;
            d.grayRunNumberVector[i] += p;
            d.runLengthRunNumberVector[j - 1] += p;
        }
        d.runLengthOneVector[i] = m.maxRunLength >= 1 ? m.counts[i][0] : 0;
    }
    return d;
}

FeatureVector computeFeatures(const RunLengthMatrix& m) {
    if (m.runCount < 1) throw ValidationError("run-length matrix has no runs");
    const DerivedRunStats d = deriveStats(m);
    const double nr = static_cast<double>(m.runCount);

    FeatureVector f;
    for (std::size_t j = 1; j <= m.maxRunLength; ++j) {
        const double pr = static_cast<double>(d.runLengthRunNumberVector[j - 1]);
        const double jj = static_cast<double>(j) * static_cast<double>(j);
        f.sre += pr / jj;
        f.lre += pr * jj;
        f.rln += pr * pr;
    }
    for (std::size_t i = 0; i < kGrayLevelCount; ++i) {
        const double pg = static_cast<double>(d.grayRunNumberVector[i]);
        f.gln += pg * pg;
    }
    f.sre /= nr;
    f.lre /= nr;
    f.gln /= nr;
    f.rln /= nr;
    f.rp = nr / static_cast<double>(m.pixelCount);
    return f;
}

FeatureVector documentFeatures(const CodeSequence& seq) {
    FeatureVector f = computeFeatures(buildRunLengthMatrix(seq));
    f.docId = seq.docId;
    return f;
}

std::vector<FeatureVector> featureMatrix(const std::vector<CodeSequence>& docs) {
    std::vector<FeatureVector> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) out.push_back(documentFeatures(doc));
    return out;
}

} // namespace glyphrun
