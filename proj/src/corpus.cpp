#include "glyphrun/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "glyphrun/rng.hpp"
#include "glyphrun/sha256.hpp"
#include "glyphrun/textio.hpp"
#include "glyphrun/utf8.hpp"

namespace glyphrun {

namespace fs = std::filesystem;

std::string_view splitName(Split s) { return s == Split::Train ? "train" : "test"; }

std::optional<Split> splitFromName(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "test") return Split::Test;
    return std::nullopt;
}

std::string computeManifestHash(const std::vector<Document>& documents) {
    std::vector<const Document*> sorted;
    sorted.reserve(documents.size());
    for (const auto& d : documents) sorted.push_back(&d);
    std::sort(sorted.begin(), sorted.end(),
              [](const Document* a, const Document* b) { return a->docId < b->docId; });

    Sha256 h;
    for (const Document* d : sorted) {
        h.update(d->docId);
        h.update("\0", 1);
        h.update(scriptName(d->script));
        h.update("\0", 1);
        h.update(splitName(d->split));
        h.update("\0", 1);
        h.update(d->text);
        h.update("\0", 1);
    }
    return toHex(h.digest());
}

ScriptModel parseScriptModel(std::string_view content, std::string sourceName) {
    std::optional<ScriptId> script;
    std::vector<std::pair<char32_t, double>> freqs;
    std::map<char32_t, std::vector<std::pair<char32_t, double>>> bigrams;
    std::set<char32_t> seen;
    std::set<std::pair<char32_t, char32_t>> seenPairs;

    const auto lines = splitLines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        const std::string where = sourceName + ":" + std::to_string(i + 1);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("script:", 0) == 0) {
            auto name = trim(line.substr(7));
            script = scriptFromName(name);
            if (!script) throw ValidationError(where + ": unknown script name '" + name + "'");
            continue;
        }
        auto tab = lines[i].find('\t');
        if (tab == std::string::npos)
            throw ValidationError(where + ": malformed entry (expected <character><TAB><weight>)");
        std::string charField = trim(lines[i].substr(0, tab));
        std::string weightField = trim(lines[i].substr(tab + 1));
        if (charField.empty()) throw ValidationError(where + ": empty character field");

        double w;
        try {
            w = std::stod(weightField);
        } catch (const std::exception&) {
            throw ValidationError(where + ": invalid weight '" + weightField + "'");
        }
        if (!(w > 0) || !std::isfinite(w))
            throw ValidationError(where + ": weight must be a positive finite number");

        std::size_t pos = 0;
        char32_t first = utf8::decodeNext(charField, pos);
        if (pos == charField.size()) {
            if (!seen.insert(first).second)
                throw ValidationError(where + ": duplicate character entry");
            freqs.emplace_back(first, w);
            continue;
        }
        char32_t second = utf8::decodeNext(charField, pos);
        if (pos != charField.size())
            throw ValidationError(where + ": character field must hold one letter or one bigram");
        if (!seenPairs.insert({first, second}).second)
            throw ValidationError(where + ": duplicate bigram entry");
        bigrams[first].emplace_back(second, w);
    }

    if (!script) throw ValidationError(sourceName + ": missing required 'script:' header");
    if (freqs.empty()) throw ValidationError(sourceName + ": model has no letter entries");

    for (const auto& [prev, row] : bigrams) {
        if (!seen.count(prev))
            throw ValidationError(sourceName + ": bigram row for a character without a letter entry");
        for (const auto& [next, w] : row)
            if (!seen.count(next))
                throw ValidationError(sourceName +
                                      ": bigram successor without a letter entry");
    }

    double total = 0;
    for (auto& [cp, w] : freqs) total += w;
    for (auto& [cp, w] : freqs) w /= total;
    for (auto& [prev, row] : bigrams) {
        double rowTotal = 0;
        for (auto& [next, w] : row) rowTotal += w;
        for (auto& [next, w] : row) w /= rowTotal;
    }

    ScriptModel model;
    model.script = *script;
    model.letterFrequencies = std::move(freqs);
    model.bigramFrequencies = std::move(bigrams);
    return model;
}

ScriptModel loadScriptModel(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("script model not found: " + path.string());
    return parseScriptModel(readFile(path), path.filename().string());
}

Dataset ingestDirectory(const fs::path& root) {
    if (!fs::is_directory(root)) throw IoError("corpus root is not a directory: " + root.string());

    Dataset dataset;
    std::set<std::string> ids;

    for (Split split : {Split::Train, Split::Test}) {
        fs::path splitDir = root / std::string(splitName(split));
        if (!fs::exists(splitDir)) continue;
        if (!fs::is_directory(splitDir))
            throw ValidationError(splitDir.string() + " is not a directory");

        std::vector<fs::path> scriptDirs;
        for (const auto& entry : fs::directory_iterator(splitDir)) scriptDirs.push_back(entry.path());
        std::sort(scriptDirs.begin(), scriptDirs.end());

        for (const auto& dir : scriptDirs) {
            if (!fs::is_directory(dir))
                throw ValidationError("unexpected file in corpus tree: " + dir.string());
            auto script = scriptFromName(dir.filename().string());
            if (!script)
                throw ValidationError("unknown script directory name: " + dir.string());

            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
            std::sort(files.begin(), files.end());

            for (const auto& file : files) {
                if (!fs::is_regular_file(file) || file.extension() != ".txt") continue;
                std::string text = readFile(file);
                if (text.empty()) throw EmptyDocumentError(file.string());
                if (!utf8::isValid(text))
                    throw ValidationError("file is not valid UTF-8: " + file.string());

                Document doc;
                doc.docId = file.stem().string();
                doc.script = *script;
                doc.split = split;
                doc.text = std::move(text);
                if (!ids.insert(doc.docId).second)
                    throw ValidationError("duplicate docId in corpus: " + doc.docId);
                dataset.documents.push_back(std::move(doc));
            }
        }
    }

    if (dataset.documents.empty())
        throw ValidationError("corpus has no documents under " + root.string());
    dataset.manifestHash = computeManifestHash(dataset.documents);
    return dataset;
}

namespace {

struct CharSampler {
    std::vector<char32_t> chars;
    std::vector<double> cdf;

    explicit CharSampler(const std::vector<std::pair<char32_t, double>>& freqs) {
        double acc = 0;
        for (const auto& [cp, p] : freqs) {
            acc += p;
            chars.push_back(cp);
            cdf.push_back(acc);
        }
    }

    char32_t draw(Rng& rng) const {
        double x = rng.uniform() * cdf.back();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        return chars[std::min<std::size_t>(it - cdf.begin(), chars.size() - 1)];
    }
};

std::string sampleDocumentText(const ScriptModel& model, double minLength, std::uint64_t docSeed) {
    Rng rng(docSeed);
    double drawn = rng.normal(model.meanDocLength, model.stdDocLength);
    auto length = static_cast<std::size_t>(std::llround(std::max(drawn, minLength)));

    const CharSampler unigram(model.letterFrequencies);
    std::map<char32_t, CharSampler> rows;
    for (const auto& [prev, row] : model.bigramFrequencies) rows.emplace(prev, CharSampler(row));

    std::string text;
    text.reserve(length * 2);
    char32_t prev = 0;
    for (std::size_t i = 0; i < length; ++i) {
        auto rowIt = (i == 0) ? rows.end() : rows.find(prev);
        char32_t cp = (rowIt == rows.end()) ? unigram.draw(rng) : rowIt->second.draw(rng);
        utf8::append(text, cp);
        prev = cp;
    }
    return text;
}

std::string zeroPad(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

} // namespace

Dataset generateSynthetic(const std::vector<ScriptModel>& models, const SynthesisParams& params) {
    std::array<const ScriptModel*, 3> byScript = {nullptr, nullptr, nullptr};
    for (const auto& m : models) byScript[static_cast<std::size_t>(m.script)] = &m;
    for (std::size_t s = 0; s < kAllScripts.size(); ++s)
        if (!byScript[s])
            throw ValidationError("missing script model for " +
                                  std::string(scriptName(kAllScripts[s])));
    if (params.testPerScript < 0 || params.minDocLength < 1)
        throw ValidationError("invalid synthesis parameters");

    Dataset dataset;
    for (std::size_t s = 0; s < kAllScripts.size(); ++s) {
        const ScriptModel& model = *byScript[s];
        std::string prefix;
        for (char c : scriptName(kAllScripts[s])) prefix.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

        const std::array<std::pair<Split, int>, 2> plan = {
            std::make_pair(Split::Train, params.trainCounts[s]),
            std::make_pair(Split::Test, params.testPerScript)};
        for (const auto& [split, count] : plan) {
            for (int i = 0; i < count; ++i) {
                std::uint64_t docSeed = deriveSeed(
                    params.seed, {static_cast<std::uint64_t>(s),
                                  static_cast<std::uint64_t>(split == Split::Train ? 0 : 1),
                                  static_cast<std::uint64_t>(i)});
                Document doc;
                doc.docId = prefix + "_" + std::string(splitName(split)) + "_" + zeroPad(i, 3);
                doc.script = kAllScripts[s];
                doc.split = split;
                doc.text = sampleDocumentText(model, params.minDocLength, docSeed);
                dataset.documents.push_back(std::move(doc));
            }
        }
    }

    dataset.manifestHash = computeManifestHash(dataset.documents);
    return dataset;
}

std::array<double, 4> codeDistribution(const ScriptModel& model, const MappingTable& table) {
    std::array<double, 4> dist = {0, 0, 0, 0};
    for (const auto& [cp, p] : model.letterFrequencies) {
        auto cls = table.classify(cp);
        if (!cls)
            throw ValidationError("model character '" + utf8::encode(cp) +
                                  "' has no mapping in the " +
                                  std::string(scriptName(table.script())) + " table");
        dist[static_cast<std::size_t>(cls->code)] += p;
    }
    return dist;
}

std::string formatManifest(const Dataset& dataset) {
    std::vector<const Document*> sorted;
    for (const auto& d : dataset.documents) sorted.push_back(&d);
    std::sort(sorted.begin(), sorted.end(),
              [](const Document* a, const Document* b) { return a->docId < b->docId; });

    std::string out = "docId,script,split,chars,sha256\n";
    for (const Document* d : sorted) {
        out += d->docId;
        out += ',';
        out += scriptName(d->script);
        out += ',';
        out += splitName(d->split);
        out += ',';
        out += std::to_string(utf8::decode(d->text).size());
        out += ',';
        out += Sha256::hexDigest(d->text);
        out += '\n';
    }
    return out;
}

std::map<std::string, ScriptId> parseTruth(std::string_view csvContent) {
    auto lines = splitLines(csvContent);
    if (lines.empty()) throw ValidationError("empty truth file");

    auto header = splitOn(lines[0], ',');
    int docCol = -1, scriptCol = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name = trim(header[i]);
        if (name == "docId") docCol = static_cast<int>(i);
        if (name == "script") scriptCol = static_cast<int>(i);
    }
    if (docCol < 0 || scriptCol < 0)
        throw ValidationError("truth file needs 'docId' and 'script' columns");

    std::map<std::string, ScriptId> truth;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto fields = splitOn(lines[i], ',');
        if (static_cast<int>(fields.size()) <= std::max(docCol, scriptCol))
            throw ValidationError("malformed truth row: " + lines[i]);
        auto script = scriptFromName(trim(fields[scriptCol]));
        if (!script) throw ValidationError("unknown script in truth row: " + lines[i]);
        truth[trim(fields[docCol])] = *script;
    }
    if (truth.empty()) throw ValidationError("truth file has no rows");
    return truth;
}

void writeCorpus(const Dataset& dataset, const fs::path& root) {
    for (const auto& doc : dataset.documents) {
        fs::path dir = root / std::string(splitName(doc.split));
        std::string scriptDir;
        for (char c : scriptName(doc.script)) scriptDir.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        dir /= scriptDir;
        atomicWriteFile(dir / (doc.docId + ".txt"), doc.text);
    }
}

} // namespace glyphrun
