#ifndef GLYPHRUN_TEXTURE_HPP
#define GLYPHRUN_TEXTURE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "glyphrun/alphabet.hpp"

namespace glyphrun {

// Number of gray levels in the coded image; fixed by the four script types.
constexpr std::size_t kGrayLevelCount = 4;

// p(i,j): number of maximal runs of level i with length j, scanned left to
// right over the 1-D coded sequence. Rows are the four levels; columns run
// from length 1 to the longest run observed.
struct RunLengthMatrix {
    // counts[level][length-1]; rectangular, all rows sized maxRunLength.
    std::array<std::vector<std::uint64_t>, kGrayLevelCount> counts;
    std::size_t maxRunLength = 0; // N
    std::uint64_t runCount = 0;   // n_r
    std::uint64_t pixelCount = 0; // n_p

    std::uint64_t runsOf(std::size_t level, std::size_t length) const {
        return (length >= 1 && length <= maxRunLength) ? counts[level][length - 1] : 0;
    }
};

// The four structures derived from p(i,j): the pixel-number matrix
// p_p(i,j) = p(i,j)*j, the per-level run totals p_g, the per-length run
// totals p_r, and the length-one column p_o.
struct DerivedRunStats {
    std::array<std::vector<std::uint64_t>, kGrayLevelCount> pixelNumberMatrix;
    std::array<std::uint64_t, kGrayLevelCount> grayRunNumberVector{};
    std::vector<std::uint64_t> runLengthRunNumberVector;
    std::array<std::uint64_t, kGrayLevelCount> runLengthOneVector{};
};

// The five run-length texture features of one document.
struct FeatureVector {
    std::string docId;
    double sre = 0; // short run emphasis
    double lre = 0; // long run emphasis
    double gln = 0; // gray-level nonuniformity
    double rln = 0; // run-length nonuniformity
    double rp = 0;  // run percentage
};

enum class FeatureId { Sre, Lre, Gln, Rln, Rp };

constexpr std::array<FeatureId, 5> kAllFeatures = {FeatureId::Sre, FeatureId::Lre, FeatureId::Gln,
                                                   FeatureId::Rln, FeatureId::Rp};

std::string_view featureName(FeatureId id);
std::optional<FeatureId> featureFromName(std::string_view name);
double featureValue(const FeatureVector& v, FeatureId id);

// The SRE/LRE/RP combination is the separating subset; GLN and RLN overlap
// between scripts and are excluded from classification by default.
std::vector<FeatureId> defaultFeatureSubset();

RunLengthMatrix buildRunLengthMatrix(const CodeSequence& seq);

DerivedRunStats deriveStats(const RunLengthMatrix& m);

FeatureVector computeFeatures(const RunLengthMatrix& m);

// Encode-and-measure for one document.
FeatureVector documentFeatures(const CodeSequence& seq);

// Batch wrapper; order preserved, docIds carried through.
std::vector<FeatureVector> featureMatrix(const std::vector<CodeSequence>& docs);

} // namespace glyphrun

#endif
