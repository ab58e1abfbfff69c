// glyphrun: script recognition for Cyrillic / Latin / Glagolitic text
// documents via text-line zone coding, run-length texture features and
// graph-based genetic clustering.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glyphrun/alphabet.hpp"
#include "glyphrun/corpus.hpp"
#include "glyphrun/evaluation.hpp"
#include "glyphrun/exports.hpp"
#include "glyphrun/gaicda.hpp"
#include "glyphrun/rng.hpp"
#include "glyphrun/textio.hpp"
#include "glyphrun/texture.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glyphrun;

namespace {

// ---------------------------------------------------------------------------
// option resolution: command-line > GLYPHRUN_* environment > config file
// ---------------------------------------------------------------------------

json loadConfig(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") path = argv[i + 1];
    if (path.empty())
        if (const char* env = std::getenv("GLYPHRUN_CONFIG")) path = env;
    if (path.empty()) return json::object();

    json config;
    try {
        config = json::parse(readFile(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config file " + path + ": " + e.what());
    }
    if (!config.is_object()) throw ValidationError("config file must hold a JSON object");
    return config;
}

std::string envNameFor(const std::string& flag) {
    std::string name = "GLYPHRUN_";
    for (char c : flag)
        name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return name;
}

template <typename T>
bool parseEnvValue(const std::string& text, T& out) {
    if constexpr (std::is_same_v<T, std::string>) {
        out = text;
        return true;
    } else if constexpr (std::is_same_v<T, bool>) {
        out = (text == "1" || text == "true" || text == "yes");
        return true;
    } else {
        std::istringstream in(text);
        in >> out;
        return static_cast<bool>(in) && in.eof();
    }
}

// Applies environment and config values to an option the user did not pass.
template <typename T>
void resolveOption(CLI::App* cmd, const std::string& flag, T& value, const json& config) {
    const CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
    if (opt != nullptr && opt->count() > 0) return;

    if (const char* env = std::getenv(envNameFor(flag).c_str())) {
        T parsed{};
        if (!parseEnvValue<T>(env, parsed))
            throw ValidationError("cannot parse environment variable " + envNameFor(flag));
        value = parsed;
        return;
    }
    if (config.contains(flag)) {
        try {
            value = config.at(flag).get<T>();
        } catch (const json::exception&) {
            throw ValidationError("config key '" + flag + "' has the wrong type");
        }
    }
}

// ---------------------------------------------------------------------------
// shared pipeline pieces
// ---------------------------------------------------------------------------

std::optional<Split> parseSplitFilter(const std::string& name) {
    if (name == "all") return std::nullopt;
    auto split = splitFromName(name);
    if (!split) throw ValidationError("unknown split '" + name + "' (expected train|test|all)");
    return split;
}

MappingTable& tableFor(ScriptId script, const fs::path& tablesDir,
                       std::map<ScriptId, MappingTable>& cache) {
    auto it = cache.find(script);
    if (it != cache.end()) return it->second;
    std::string file;
    for (char c : scriptName(script)) file.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    auto [inserted, ok] = cache.emplace(script, loadMappingTable(tablesDir / (file + ".tsv")));
    return inserted->second;
}

std::vector<CodeSequence> encodeDataset(const Dataset& dataset, const fs::path& tablesDir,
                                        std::optional<Split> splitFilter, bool breakAtSpace) {
    std::map<ScriptId, MappingTable> tables;
    std::vector<CodeSequence> coded;
    for (const auto& doc : dataset.documents) {
        if (splitFilter && doc.split != *splitFilter) continue;
        EncodeOptions opts;
        opts.breakRunsAtSpace = breakAtSpace;
        CodeSequence seq = encodeText(doc.text, tableFor(doc.script, tablesDir, tables), doc.docId, opts);
        seq.sourceScript = doc.script;
        coded.push_back(std::move(seq));
    }
    std::sort(coded.begin(), coded.end(),
              [](const CodeSequence& a, const CodeSequence& b) { return a.docId < b.docId; });
    if (coded.empty()) throw ValidationError("no documents matched the requested split");
    return coded;
}

struct LabeledFeatures {
    std::vector<FeatureVector> features;
    std::map<std::string, ScriptId> scripts;
};

LabeledFeatures featuresFromCoded(const std::vector<CodeSequence>& coded) {
    LabeledFeatures out;
    out.features = featureMatrix(coded);
    for (const auto& seq : coded)
        if (seq.sourceScript) out.scripts[seq.docId] = *seq.sourceScript;
    return out;
}

std::vector<FeatureId> parseFeatureSet(const std::string& list) {
    std::vector<FeatureId> subset;
    for (const auto& name : splitOn(list, ',')) {
        auto id = featureFromName(trim(name));
        if (!id) throw ValidationError("unknown feature '" + trim(name) + "'");
        subset.push_back(*id);
    }
    if (subset.empty()) throw ValidationError("empty feature set");
    return subset;
}

std::array<int, 3> parseTrainCounts(const std::string& list) {
    auto parts = splitOn(list, ',');
    if (parts.size() != 3)
        throw ValidationError("--train-counts needs three comma-separated values");
    std::array<int, 3> counts{};
    for (std::size_t i = 0; i < 3; ++i) {
        try {
            counts[i] = std::stoi(trim(parts[i]));
        } catch (const std::exception&) {
            throw ValidationError("invalid train count '" + parts[i] + "'");
        }
        if (counts[i] < 0) throw ValidationError("train counts must be non-negative");
    }
    return counts;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct EncodeArgs {
    std::string corpus, tables = "data/tables", out, split = "all";
};

int runEncode(const EncodeArgs& args) {
    Dataset dataset = ingestDirectory(args.corpus);
    auto coded = encodeDataset(dataset, args.tables, parseSplitFilter(args.split), false);
    atomicWriteFile(args.out, formatCodedDocuments(coded));
    std::cout << "encoded " << coded.size() << " documents -> " << args.out << "\n";
    return 0;
}

struct FeaturesArgs {
    std::string corpus, coded, tables = "data/tables", out, plotDir, summary, split = "all";
    bool breakRunsAtSpace = false;
};

int runFeatures(const FeaturesArgs& args) {
    if (args.corpus.empty() == args.coded.empty())
        throw ValidationError("exactly one of --corpus or --coded is required");

    LabeledFeatures lf;
    if (!args.corpus.empty()) {
        Dataset dataset = ingestDirectory(args.corpus);
        lf = featuresFromCoded(encodeDataset(dataset, args.tables, parseSplitFilter(args.split),
                                             args.breakRunsAtSpace));
    } else {
        if (args.breakRunsAtSpace)
            throw ValidationError("--break-runs-at-space needs --corpus (coded input has no word boundaries)");
        lf = featuresFromCoded(parseCodedDocuments(readFile(args.coded)));
    }

    atomicWriteFile(args.out, formatFeatureCsv(lf.features, lf.scripts));
    std::cout << "features for " << lf.features.size() << " documents -> " << args.out << "\n";

    if (!args.summary.empty() || !args.plotDir.empty()) {
        if (lf.scripts.empty())
            throw ValidationError("summary/plots need script labels (use --corpus input)");
        auto ranges = summarizeRanges(lf.features, lf.scripts);
        if (!args.summary.empty()) atomicWriteFile(args.summary, formatRangeCsv(ranges));
        if (!args.plotDir.empty()) {
            for (FeatureId id : defaultFeatureSubset()) {
                fs::path file = fs::path(args.plotDir) / (std::string(featureName(id)) + ".svg");
                atomicWriteFile(file, renderRangePlot(id, ranges));
            }
            // the plot directory carries the min/max table alongside the bars
            atomicWriteFile(fs::path(args.plotDir) / "summary.csv", formatRangeCsv(ranges));
        }
    }
    return 0;
}

struct ClassifyArgs {
    std::string features, corpus, tables = "data/tables", out, paramsOut, method = "gaicda";
    std::string featureSet = "sre,lre,rp", split = "test";
    std::uint64_t seed = 0;
    int runs = 1;
    int targetClusters = 3;
    int thresholdT = 5;
    int neighbors = 3;
    int gaPopulation = 100;
    int gaGenerations = 100;
    double gaCrossover = 0.8;
    double gaMutation = 0.2;
    double gaElitism = 0.1;
};

Partition classifyOnce(const ClassifyArgs& args, const std::vector<FeatureVector>& features,
                       const std::vector<FeatureId>& subset, std::uint64_t seed) {
    auto method = methodFromName(args.method);
    if (!method) throw ValidationError("unknown method '" + args.method + "'");

    if (*method == Method::GAICDA) {
        GaParams params;
        params.populationSize = args.gaPopulation;
        params.generations = args.gaGenerations;
        params.crossoverRate = args.gaCrossover;
        params.mutationRate = args.gaMutation;
        params.elitismFraction = args.gaElitism;
        params.targetClusters = args.targetClusters;
        params.rngSeed = seed;
        return classifyGAICDA(features, params, args.thresholdT, args.neighbors, subset);
    }

    auto normalized = normalizeFeatures(features, subset);
    return *method == Method::Hierarchical
               ? clusterHierarchical(normalized, args.targetClusters, seed)
               : clusterEM(normalized, args.targetClusters, seed);
}

int runClassify(const ClassifyArgs& args) {
    if (args.features.empty() == args.corpus.empty())
        throw ValidationError("exactly one of --features or --corpus is required");
    if (args.runs < 1) throw ValidationError("--runs must be >= 1");

    std::vector<FeatureVector> features;
    if (!args.features.empty()) {
        features = parseFeatureCsv(readFile(args.features)).features;
    } else {
        Dataset dataset = ingestDirectory(args.corpus);
        features = featuresFromCoded(
                       encodeDataset(dataset, args.tables, parseSplitFilter(args.split), false))
                       .features;
    }
    auto subset = parseFeatureSet(args.featureSet);

    std::map<std::string, std::string> record = {
        {"method", args.method},
        {"seed", std::to_string(args.seed)},
        {"runs", std::to_string(args.runs)},
        {"targetClusters", std::to_string(args.targetClusters)},
        {"thresholdT", std::to_string(args.thresholdT)},
        {"neighborCount", std::to_string(args.neighbors)},
        {"features", args.featureSet},
        {"gaPopulation", std::to_string(args.gaPopulation)},
        {"gaGenerations", std::to_string(args.gaGenerations)},
        {"gaCrossover", formatDouble(args.gaCrossover)},
        {"gaMutation", formatDouble(args.gaMutation)},
        {"gaElitism", formatDouble(args.gaElitism)},
        {"documents", std::to_string(features.size())}};

    const std::string paramsOut = args.paramsOut.empty() ? args.out + ".params" : args.paramsOut;

    if (args.runs == 1) {
        Partition partition = classifyOnce(args, features, subset, args.seed);
        atomicWriteFile(args.out, formatPartitionCsv(partition));
        atomicWriteFile(paramsOut, formatParamRecord(record));
        std::cout << "partition with " << partition.k << " clusters -> " << args.out << "\n";
        return 0;
    }

    fs::path outPath(args.out);
    fs::path stem = outPath.parent_path() / outPath.stem();
    std::string summary = "run,seed,clusters,file\n";
    for (int run = 0; run < args.runs; ++run) {
        std::uint64_t runSeed = deriveSeed(args.seed, {static_cast<std::uint64_t>(run)});
        Partition partition = classifyOnce(args, features, subset, runSeed);
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "_run%03d", run);
        fs::path file = stem;
        file += suffix;
        file += outPath.extension();
        atomicWriteFile(file, formatPartitionCsv(partition));
        summary += std::to_string(run) + ',' + std::to_string(runSeed) + ',' +
                   std::to_string(partition.k) + ',' + file.filename().string() + '\n';
    }
    fs::path aggregate = stem;
    aggregate += "_runs.csv";
    atomicWriteFile(aggregate, summary);
    atomicWriteFile(paramsOut, formatParamRecord(record));
    std::cout << args.runs << " partitions -> " << stem.string() << "_runNNN"
              << outPath.extension().string() << "\n";
    return 0;
}

struct EvaluateArgs {
    std::vector<std::string> partitions;
    std::string partitionsDir, truth, out, confusion;
};

int runEvaluate(const EvaluateArgs& args) {
    std::vector<std::string> files = args.partitions;
    if (!args.partitionsDir.empty()) {
        std::vector<fs::path> found;
        for (const auto& entry : fs::directory_iterator(args.partitionsDir)) {
            if (entry.path().extension() != ".csv") continue;
            // only partition exports; a run directory may hold other CSVs
            auto lines = splitLines(readFile(entry.path()));
            if (!lines.empty() && trim(lines[0]) == "docId,cluster,method,seed")
                found.push_back(entry.path());
        }
        std::sort(found.begin(), found.end());
        for (const auto& p : found) files.push_back(p.string());
    }
    if (files.empty()) throw ValidationError("no partition files given");

    auto truth = parseTruth(readFile(args.truth));

    std::vector<EvalReport> reports;
    for (const auto& file : files)
        reports.push_back(score(parsePartitionCsv(readFile(file)), truth));

    EvalReport report = reports.size() == 1 ? reports.front() : aggregateRuns(reports);
    atomicWriteFile(args.out, formatReport(report));
    if (reports.size() == 1) {
        const std::string confusion =
            args.confusion.empty() ? args.out + ".confusion.csv" : args.confusion;
        atomicWriteFile(confusion, formatConfusionCsv(report));
    }
    std::cout << "evaluated " << files.size() << " partition(s) -> " << args.out << "\n";
    return 0;
}

struct SynthArgs {
    std::string models = "data/models", out, trainCounts = "34,33,33";
    std::uint64_t seed = 0;
    int testPerScript = 5;
    double lenMean = 2000, lenStd = 500, lenMin = 200;
    bool force = false;
};

int runSynth(const SynthArgs& args) {
    fs::path outDir(args.out);
    if (fs::exists(outDir) && !fs::is_empty(outDir) && !args.force)
        throw ValidationError("target directory is not empty (use --force): " + args.out);

    std::vector<ScriptModel> models;
    for (ScriptId id : kAllScripts) {
        std::string file;
        for (char c : scriptName(id)) file.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        ScriptModel model = loadScriptModel(fs::path(args.models) / (file + ".tsv"));
        model.meanDocLength = args.lenMean;
        model.stdDocLength = args.lenStd;
        models.push_back(std::move(model));
    }

    SynthesisParams params;
    params.trainCounts = parseTrainCounts(args.trainCounts);
    params.testPerScript = args.testPerScript;
    params.seed = args.seed;
    params.minDocLength = args.lenMin;

    Dataset dataset = generateSynthetic(models, params);
    writeCorpus(dataset, outDir);
    atomicWriteFile(outDir / "manifest.csv", formatManifest(dataset));
    std::cout << "synthesized " << dataset.documents.size() << " documents -> " << args.out
              << " (manifest hash " << dataset.manifestHash.substr(0, 12) << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"script recognition from run-length texture of zone-coded text"};
    app.require_subcommand(1);

    EncodeArgs encodeArgs;
    FeaturesArgs featuresArgs;
    ClassifyArgs classifyArgs;
    EvaluateArgs evaluateArgs;
    SynthArgs synthArgs;

    std::string configPath; // consumed by loadConfig; registered so CLI11 accepts it
    app.add_option("--config", configPath, "JSON config file with flag defaults");

    auto* encodeCmd = app.add_subcommand("encode", "code documents into script-type digit strings");
    encodeCmd->add_option("--corpus", encodeArgs.corpus, "corpus root directory")->required();
    encodeCmd->add_option("--tables", encodeArgs.tables, "mapping table directory");
    encodeCmd->add_option("--out", encodeArgs.out, "output file")->required();
    encodeCmd->add_option("--split", encodeArgs.split, "train|test|all");

    auto* featuresCmd = app.add_subcommand("features", "compute run-length texture features");
    featuresCmd->add_option("--corpus", featuresArgs.corpus, "corpus root directory");
    featuresCmd->add_option("--coded", featuresArgs.coded, "coded-document input file");
    featuresCmd->add_option("--tables", featuresArgs.tables, "mapping table directory");
    featuresCmd->add_option("--out", featuresArgs.out, "feature CSV output")->required();
    featuresCmd->add_option("--plot", featuresArgs.plotDir, "directory for range-plot SVGs");
    featuresCmd->add_option("--summary", featuresArgs.summary, "per-script min/max CSV");
    featuresCmd->add_option("--split", featuresArgs.split, "train|test|all");
    featuresCmd->add_flag("--break-runs-at-space", featuresArgs.breakRunsAtSpace,
                          "restart runs at word boundaries");

    auto* classifyCmd = app.add_subcommand("classify", "cluster documents by script");
    classifyCmd->add_option("--features", classifyArgs.features, "feature CSV input");
    classifyCmd->add_option("--corpus", classifyArgs.corpus, "corpus root directory");
    classifyCmd->add_option("--tables", classifyArgs.tables, "mapping table directory");
    classifyCmd->add_option("--split", classifyArgs.split, "train|test|all (corpus input)");
    classifyCmd->add_option("--method", classifyArgs.method, "gaicda|hierarchical|em");
    classifyCmd->add_option("--out", classifyArgs.out, "partition CSV output")->required();
    classifyCmd->add_option("--params-out", classifyArgs.paramsOut, "parameter record output");
    classifyCmd->add_option("--seed", classifyArgs.seed, "random seed");
    classifyCmd->add_option("--runs", classifyArgs.runs, "number of seeded runs");
    classifyCmd->add_option("--target-clusters", classifyArgs.targetClusters, "final cluster count");
    classifyCmd->add_option("--threshold-t", classifyArgs.thresholdT, "ordering distance bound T");
    classifyCmd->add_option("--neighbors", classifyArgs.neighbors, "nearest neighbors per node");
    classifyCmd->add_option("--feature-set", classifyArgs.featureSet, "comma-separated features");
    classifyCmd->add_option("--ga-population", classifyArgs.gaPopulation, "GA population size");
    classifyCmd->add_option("--ga-generations", classifyArgs.gaGenerations, "GA generations");
    classifyCmd->add_option("--ga-crossover", classifyArgs.gaCrossover, "GA crossover rate");
    classifyCmd->add_option("--ga-mutation", classifyArgs.gaMutation, "GA mutation rate");
    classifyCmd->add_option("--ga-elitism", classifyArgs.gaElitism, "GA elite fraction");

    auto* evaluateCmd = app.add_subcommand("evaluate", "score partitions against ground truth");
    evaluateCmd->add_option("--partition", evaluateArgs.partitions, "partition CSV (repeatable)");
    evaluateCmd->add_option("--partitions-dir", evaluateArgs.partitionsDir,
                            "directory of partition CSVs");
    evaluateCmd->add_option("--truth", evaluateArgs.truth, "CSV with docId and script columns")
        ->required();
    evaluateCmd->add_option("--out", evaluateArgs.out, "report output")->required();
    evaluateCmd->add_option("--confusion", evaluateArgs.confusion, "confusion CSV output");

    auto* synthCmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synthCmd->add_option("--models", synthArgs.models, "script model directory");
    synthCmd->add_option("--out", synthArgs.out, "corpus output directory")->required();
    synthCmd->add_option("--seed", synthArgs.seed, "random seed");
    synthCmd->add_option("--train-counts", synthArgs.trainCounts, "per-script training counts");
    synthCmd->add_option("--test-per-script", synthArgs.testPerScript, "test documents per script");
    synthCmd->add_option("--len-mean", synthArgs.lenMean, "mean document length");
    synthCmd->add_option("--len-std", synthArgs.lenStd, "document length std deviation");
    synthCmd->add_option("--len-min", synthArgs.lenMin, "minimum document length");
    synthCmd->add_flag("--force", synthArgs.force, "write into a non-empty directory");

    for (auto* cmd : {encodeCmd, featuresCmd, classifyCmd, evaluateCmd, synthCmd})
        cmd->add_option("--config", configPath, "JSON config file with flag defaults");

    // --seed is accepted everywhere; encode/features/evaluate have no
    // randomness to feed it into
    std::uint64_t ignoredSeed = 0;
    for (auto* cmd : {encodeCmd, featuresCmd, evaluateCmd})
        cmd->add_option("--seed", ignoredSeed, "random seed (unused by this command)");

    try {
        app.parse(argc, argv);

        const json config = loadConfig(argc, argv);

        if (encodeCmd->parsed()) {
            resolveOption(encodeCmd, "tables", encodeArgs.tables, config);
            resolveOption(encodeCmd, "split", encodeArgs.split, config);
            return runEncode(encodeArgs);
        }
        if (featuresCmd->parsed()) {
            resolveOption(featuresCmd, "tables", featuresArgs.tables, config);
            resolveOption(featuresCmd, "split", featuresArgs.split, config);
            return runFeatures(featuresArgs);
        }
        if (classifyCmd->parsed()) {
            resolveOption(classifyCmd, "tables", classifyArgs.tables, config);
            resolveOption(classifyCmd, "seed", classifyArgs.seed, config);
            resolveOption(classifyCmd, "method", classifyArgs.method, config);
            resolveOption(classifyCmd, "runs", classifyArgs.runs, config);
            resolveOption(classifyCmd, "target-clusters", classifyArgs.targetClusters, config);
            resolveOption(classifyCmd, "threshold-t", classifyArgs.thresholdT, config);
            resolveOption(classifyCmd, "neighbors", classifyArgs.neighbors, config);
            resolveOption(classifyCmd, "feature-set", classifyArgs.featureSet, config);
            resolveOption(classifyCmd, "ga-population", classifyArgs.gaPopulation, config);
            resolveOption(classifyCmd, "ga-generations", classifyArgs.gaGenerations, config);
            resolveOption(classifyCmd, "ga-crossover", classifyArgs.gaCrossover, config);
            resolveOption(classifyCmd, "ga-mutation", classifyArgs.gaMutation, config);
            resolveOption(classifyCmd, "ga-elitism", classifyArgs.gaElitism, config);
            return runClassify(classifyArgs);
        }
        if (evaluateCmd->parsed()) return runEvaluate(evaluateArgs);
        if (synthCmd->parsed()) {
            resolveOption(synthCmd, "models", synthArgs.models, config);
            resolveOption(synthCmd, "seed", synthArgs.seed, config);
            resolveOption(synthCmd, "train-counts", synthArgs.trainCounts, config);
            resolveOption(synthCmd, "test-per-script", synthArgs.testPerScript, config);
            resolveOption(synthCmd, "len-mean", synthArgs.lenMean, config);
            resolveOption(synthCmd, "len-std", synthArgs.lenStd, config);
            resolveOption(synthCmd, "len-min", synthArgs.lenMin, config);
            return runSynth(synthArgs);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
