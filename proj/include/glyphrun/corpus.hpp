#ifndef GLYPHRUN_CORPUS_HPP
#define GLYPHRUN_CORPUS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "glyphrun/alphabet.hpp"

namespace glyphrun {

enum class Split { Train, Test };

std::string_view splitName(Split s);
std::optional<Split> splitFromName(std::string_view name);

struct Document {
    std::string docId;
    ScriptId script;
    Split split;
    std::string text; // UTF-8, non-empty
};

struct Dataset {
    std::vector<Document> documents;
    // Digest over (docId, script, split, text) of every document, sorted by
    // docId; changes iff any of those change.
    std::string manifestHash;
};

std::string computeManifestHash(const std::vector<Document>& documents);

// Per-script letter distribution driving synthetic document generation.
struct ScriptModel {
    ScriptId script;
    std::vector<std::pair<char32_t, double>> letterFrequencies; // normalized, file order
    // Optional first-order transitions (row-normalized). When present,
    // sampling is Markov instead of character-wise independent; characters
    // without a row fall back to the letter frequencies.
    std::map<char32_t, std::vector<std::pair<char32_t, double>>> bigramFrequencies;
    double meanDocLength = 2000; // characters
    double stdDocLength = 500;
};

// Model file format: `script: <name>` header, then `<character><TAB><weight>`
// lines; weights are relative and normalized on load. A two-character field
// declares a bigram transition `<prev><next><TAB><weight>`; both characters
// must also appear as letter entries.
ScriptModel loadScriptModel(const std::filesystem::path& path);
ScriptModel parseScriptModel(std::string_view content, std::string sourceName);

// Corpus layout: <root>/{train,test}/{cyrillic,latin,glagolitic}/*.txt.
// docId = file stem; duplicate stems across the tree are an error.
Dataset ingestDirectory(const std::filesystem::path& root);

struct SynthesisParams {
    std::array<int, 3> trainCounts = {34, 33, 33}; // indexed by kAllScripts order
    int testPerScript = 5;
    std::uint64_t seed = 0;
    double minDocLength = 200; // clamp for the sampled normal length
};

// Samples documents character-wise from each model. Deterministic under the
// seed; each document draws from its own derived sub-seed, so regenerating
// one script leaves the others' texts unchanged.
Dataset generateSynthetic(const std::vector<ScriptModel>& models, const SynthesisParams& params);

// Pushforward of the letter distribution through the mapping table: the
// probability of each script-type code 0..3. Throws on model characters the
// table cannot classify.
std::array<double, 4> codeDistribution(const ScriptModel& model, const MappingTable& table);

// Manifest CSV: docId,script,split,chars,sha256 (chars = Unicode scalars).
std::string formatManifest(const Dataset& dataset);
// Returns docId -> script for evaluation ground truth.
std::map<std::string, ScriptId> parseTruth(std::string_view csvContent);

// Materializes the dataset into the corpus layout under root.
void writeCorpus(const Dataset& dataset, const std::filesystem::path& root);

} // namespace glyphrun

#endif
