#include "glyphrun/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "glyphrun/textio.hpp"
#include "glyphrun/utf8.hpp"

namespace glyphrun {

std::string_view scriptName(ScriptId id) {
    switch (id) {
    case ScriptId::Cyrillic: return "Cyrillic";
    case ScriptId::Latin: return "Latin";
    case ScriptId::Glagolitic: return "Glagolitic";
    }
    return "?";
}

std::optional<ScriptId> scriptFromName(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "cyrillic") return ScriptId::Cyrillic;
    if (lower == "latin") return ScriptId::Latin;
    if (lower == "glagolitic") return ScriptId::Glagolitic;
    return std::nullopt;
}

ScriptClass scriptClassFor(ZoneKind kind) {
    int code = static_cast<int>(kind);
    return ScriptClass{kind, code, kGrayLevels[static_cast<std::size_t>(code)]};
}

ScriptClass scriptClassForCode(int code) {
    if (code < 0 || code > 3) throw ValidationError("script-type code out of range: " + std::to_string(code));
    return scriptClassFor(static_cast<ZoneKind>(code));
}

char32_t foldLower(char32_t cp) {
    // ASCII
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    // Latin-1 letters (except the sharp-s / division-sign gaps)
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    // Latin Extended-A: pairs alternate even/odd
    if (cp >= 0x0100 && cp <= 0x0177 && (cp % 2) == 0) return cp + 1;
    if (cp >= 0x0179 && cp <= 0x017E && (cp % 2) == 1) return cp + 1;
    // Cyrillic
    if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
    if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;
    // Glagolitic
    if (cp >= 0x2C00 && cp <= 0x2C2F) return cp + 0x30;
    return cp;
}

MappingTable::MappingTable(ScriptId script, CaseFolding folding, std::string version,
                           std::unordered_map<char32_t, ScriptClass> entries)
    : script_(script), folding_(folding), version_(std::move(version)), entries_(std::move(entries)) {}

std::optional<ScriptClass> MappingTable::classify(char32_t ch) const {
    char32_t key = (folding_ == CaseFolding::Lower) ? foldLower(ch) : ch;
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

bool inScriptBlock(ScriptId script, char32_t cp) {
    switch (script) {
    case ScriptId::Latin:
        // Basic Latin letters plus the Latin-1 / Extended-A letters used by
        // Slavic orthographies.
        return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
               (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) ||
               (cp >= 0x0100 && cp <= 0x017F);
    case ScriptId::Cyrillic:
        return cp >= 0x0400 && cp <= 0x04FF;
    case ScriptId::Glagolitic:
        return cp >= 0x2C00 && cp <= 0x2C5F;
    }
    return false;
}

namespace {

std::optional<ZoneKind> zoneFromLetter(std::string_view s) {
    if (s == "S") return ZoneKind::Short;
    if (s == "A") return ZoneKind::Ascender;
    if (s == "D") return ZoneKind::Descender;
    if (s == "F") return ZoneKind::Full;
    return std::nullopt;
}

} // namespace

MappingTable parseMappingTable(std::string_view content, std::string sourceName,
                               TableLoadOptions opts) {
    std::optional<ScriptId> script;
    CaseFolding folding = CaseFolding::Lower;
    std::string version = "1";
    std::unordered_map<char32_t, ScriptClass> entries;
    std::vector<std::string> warnings;

    const auto lines = splitLines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& raw = lines[i];
        std::string line = trim(raw);
        const std::string where = sourceName + ":" + std::to_string(i + 1);
        if (line.empty() || line[0] == '#') continue;

        if (line.rfind("script:", 0) == 0) {
            auto name = trim(line.substr(7));
            script = scriptFromName(name);
            if (!script) throw ValidationError(where + ": unknown script name '" + name + "'");
            continue;
        }
        if (line.rfind("fold:", 0) == 0) {
            auto mode = trim(line.substr(5));
            if (mode == "lower") folding = CaseFolding::Lower;
            else if (mode == "none") folding = CaseFolding::None;
            else throw ValidationError(where + ": unknown fold mode '" + mode + "'");
            continue;
        }
        if (line.rfind("version:", 0) == 0) {
            version = trim(line.substr(8));
            continue;
        }

        auto tab = raw.find('\t');
        if (tab == std::string::npos)
            throw ValidationError(where + ": malformed entry (expected <character><TAB><class>)");
        std::string charField = trim(raw.substr(0, tab));
        std::string classField = trim(raw.substr(tab + 1));

        std::size_t pos = 0;
        if (charField.empty()) throw ValidationError(where + ": empty character field");
        char32_t cp = utf8::decodeNext(charField, pos);
        if (pos != charField.size())
            throw ValidationError(where + ": character field must hold exactly one character");

        auto zone = zoneFromLetter(classField);
        if (!zone)
            throw ValidationError(where + ": unknown class letter '" + classField +
                                  "' (expected S, A, D or F)");

        if (!script)
            throw ValidationError(where + ": entry before the required 'script:' header");

        if (!inScriptBlock(*script, cp)) {
            std::string msg = where + ": character U+" + [&] {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
                return std::string(buf);
            }() + " is outside the " + std::string(scriptName(*script)) + " block";
            if (opts.strictBlocks) throw ValidationError(msg);
            warnings.push_back(msg);
        }

        char32_t key = (folding == CaseFolding::Lower) ? foldLower(cp) : cp;
        auto [it, inserted] = entries.emplace(key, scriptClassFor(*zone));
        if (!inserted)
            throw ValidationError(where + ": duplicate entry for character '" + charField + "'");
    }

    if (!script) throw ValidationError(sourceName + ": missing required 'script:' header");
    if (entries.empty()) throw ValidationError(sourceName + ": table has no entries");

    MappingTable table(*script, folding, std::move(version), std::move(entries));
    for (auto& w : warnings) table.addWarning(std::move(w));
    return table;
}

MappingTable loadMappingTable(const std::filesystem::path& path, TableLoadOptions opts) {
    if (!std::filesystem::exists(path)) throw IoError("mapping table not found: " + path.string());
    return parseMappingTable(readFile(path), path.filename().string(), opts);
}

std::optional<ScriptClass> classifyLetter(char32_t ch, const MappingTable& table) {
    return table.classify(ch);
}

namespace {

bool isWhitespace(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
           cp == U'\v' || cp == 0x00A0;
}

} // namespace

CodeSequence encodeText(std::string_view utf8Text, const MappingTable& table, std::string docId,
                        EncodeOptions opts) {
    CodeSequence seq;
    seq.docId = std::move(docId);

    bool breakPending = false;
    std::size_t pos = 0;
    while (pos < utf8Text.size()) {
        char32_t cp = utf8::decodeNext(utf8Text, pos);
        auto cls = table.classify(cp);
        if (!cls) {
            ++seq.skippedCount;
            if (opts.breakRunsAtSpace && isWhitespace(cp) && !seq.codes.empty()) breakPending = true;
            continue;
        }
        if (breakPending) {
            seq.runBreaks.push_back(seq.codes.size());
            breakPending = false;
        }
        seq.codes.push_back(static_cast<std::uint8_t>(cls->code));
    }

    if (seq.codes.empty()) throw EmptyDocumentError(seq.docId);
    return seq;
}

std::vector<std::uint8_t> toGrayImage(const CodeSequence& seq) {
    std::vector<std::uint8_t> pixels;
    pixels.reserve(seq.codes.size());
    for (std::uint8_t code : seq.codes)
        pixels.push_back(static_cast<std::uint8_t>(kGrayLevels[code]));
    return pixels;
}

std::vector<std::uint8_t> codesFromGray(const std::vector<std::uint8_t>& pixels) {
    std::vector<std::uint8_t> codes;
    codes.reserve(pixels.size());
    for (std::uint8_t px : pixels) {
        auto it = std::find(kGrayLevels.begin(), kGrayLevels.end(), int(px));
        if (it == kGrayLevels.end())
            throw ValidationError("pixel value " + std::to_string(int(px)) +
                                  " is not one of the four gray levels");
        codes.push_back(static_cast<std::uint8_t>(it - kGrayLevels.begin()));
    }
    return codes;
}

std::string formatCodedDocuments(const std::vector<CodeSequence>& docs) {
    std::string out;
    for (const auto& doc : docs) {
        out += doc.docId;
        out += '\t';
        for (std::uint8_t code : doc.codes) out += static_cast<char>('0' + code);
        out += '\n';
    }
    return out;
}

std::vector<CodeSequence> parseCodedDocuments(std::string_view content) {
    std::vector<CodeSequence> docs;
    for (const auto& line : splitLines(content)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ValidationError("malformed coded-document line: " + line);
        CodeSequence seq;
        seq.docId = line.substr(0, tab);
        for (std::size_t i = tab + 1; i < line.size(); ++i) {
            char c = line[i];
            if (c < '0' || c > '3')
                throw ValidationError("invalid code digit in document " + seq.docId);
            seq.codes.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        if (seq.codes.empty()) throw EmptyDocumentError(seq.docId);
        docs.push_back(std::move(seq));
    }
    return docs;
}

} // namespace glyphrun
