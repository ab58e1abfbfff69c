#ifndef GLYPHRUN_ALPHABET_HPP
#define GLYPHRUN_ALPHABET_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "glyphrun/errors.hpp"

namespace glyphrun {

enum class ScriptId { Cyrillic, Latin, Glagolitic };

constexpr std::array<ScriptId, 3> kAllScripts = {ScriptId::Cyrillic, ScriptId::Latin,
                                                 ScriptId::Glagolitic};

std::string_view scriptName(ScriptId id);
std::optional<ScriptId> scriptFromName(std::string_view name); // case-insensitive

// The four text-line zone categories a letter can occupy: short letters sit
// in the middle zone only, ascenders add the upper zone, descenders the lower
// zone, and full letters span all three.
enum class ZoneKind : std::uint8_t { Short = 0, Ascender = 1, Descender = 2, Full = 3 };

struct ScriptClass {
    ZoneKind kind;
    int code;      // 0..3, equals the enum value of kind
    int grayLevel; // 0..255, distinct per class and monotone in code

    friend bool operator==(const ScriptClass&, const ScriptClass&) = default;
};

// The fixed class quadruple. Gray levels are equidistant so the four codes
// stay visually distinguishable; any injective assignment produces the same
// run statistics.
constexpr std::array<int, 4> kGrayLevels = {0, 85, 170, 255};

ScriptClass scriptClassFor(ZoneKind kind);
ScriptClass scriptClassForCode(int code);

// How lookup keys are folded before consulting the table. Declared in the
// table file itself ("fold: lower" / "fold: none") so uppercase-specific
// tables remain possible.
enum class CaseFolding { Lower, None };

char32_t foldLower(char32_t cp); // simple lowercase fold for Latin/Cyrillic/Glagolitic

class MappingTable {
public:
    MappingTable(ScriptId script, CaseFolding folding, std::string version,
                 std::unordered_map<char32_t, ScriptClass> entries);

    ScriptId script() const { return script_; }
    CaseFolding folding() const { return folding_; }
    const std::string& version() const { return version_; }
    const std::unordered_map<char32_t, ScriptClass>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    // Case-folds (per the declared rule) and looks the character up;
    // nullopt means "no mapping", which is a value, not an error.
    std::optional<ScriptClass> classify(char32_t ch) const;

    // Non-fatal load diagnostics (characters outside the declared script block).
    const std::vector<std::string>& warnings() const { return warnings_; }
    void addWarning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    ScriptId script_;
    CaseFolding folding_;
    std::string version_;
    std::unordered_map<char32_t, ScriptClass> entries_;
    std::vector<std::string> warnings_;
};

// True if cp belongs to one of the Unicode blocks this script's letters
// live in (used to sanity-check table entries).
bool inScriptBlock(ScriptId script, char32_t cp);

struct TableLoadOptions {
    // When true, a table entry outside the declared script's block is a hard
    // error instead of a warning.
    bool strictBlocks = false;
};

// Table file format: UTF-8 text; `script: <name>` header required; optional
// `fold: lower|none`; `#` comments; entry lines `<character><TAB><S|A|D|F>`.
MappingTable loadMappingTable(const std::filesystem::path& path, TableLoadOptions opts = {});
MappingTable parseMappingTable(std::string_view content, std::string sourceName,
                               TableLoadOptions opts = {});

std::optional<ScriptClass> classifyLetter(char32_t ch, const MappingTable& table);

// A document reduced to its ordered script-type codes: the 1-D four-level
// texture the run-length analysis consumes.
struct CodeSequence {
    std::string docId;
    std::vector<std::uint8_t> codes; // each in 0..3
    std::optional<ScriptId> sourceScript;
    std::size_t skippedCount = 0;

    // Positions in `codes` where a run is forced to restart (set when
    // encoding breaks runs at whitespace). A break at index i separates
    // codes[i-1] and codes[i]. Empty in the default continuous mode.
    std::vector<std::size_t> runBreaks;
};

struct EncodeOptions {
    // Record a run boundary wherever the source text had whitespace between
    // mapped letters. Off by default: the coding treats the document as one
    // continuous sequence.
    bool breakRunsAtSpace = false;
};

// Walks the text in reading order, coding every mapped character and counting
// the rest into skippedCount. Throws EmptyDocumentError when nothing maps.
CodeSequence encodeText(std::string_view utf8Text, const MappingTable& table, std::string docId,
                        EncodeOptions opts = {});

// Element-wise code -> gray level.
std::vector<std::uint8_t> toGrayImage(const CodeSequence& seq);

// Inverse quantization: gray level -> code. Throws ValidationError on a
// pixel value that is not one of the four levels.
std::vector<std::uint8_t> codesFromGray(const std::vector<std::uint8_t>& pixels);

// Coded-document export: one `<docId><TAB><digit string>` line per document.
std::string formatCodedDocuments(const std::vector<CodeSequence>& docs);
std::vector<CodeSequence> parseCodedDocuments(std::string_view content);

} // namespace glyphrun

#endif
