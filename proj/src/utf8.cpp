#include "glyphrun/utf8.hpp"

namespace glyphrun::utf8 {

namespace {

[[noreturn]] void fail(std::size_t pos) {
    throw ValidationError("invalid UTF-8 at byte offset " + std::to_string(pos));
}

} // namespace

char32_t decodeNext(std::string_view text, std::size_t& pos) {
    const std::size_t start = pos;
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };

    unsigned char lead = byte(pos);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }

    int extra;
    char32_t cp;
    if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
    } else {
        fail(start);
    }

    if (pos + extra >= text.size()) fail(start);
    for (int i = 1; i <= extra; ++i) {
        unsigned char c = byte(pos + i);
        if ((c & 0xC0) != 0x80) fail(start);
        cp = (cp << 6) | (c & 0x3F);
    }
    pos += 1 + extra;

    static constexpr char32_t kMinForLen[4] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLen[extra]) fail(start);          // overlong
    if (cp >= 0xD800 && cp <= 0xDFFF) fail(start);    // surrogate
    if (cp > 0x10FFFF) fail(start);
    return cp;
}

std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) out.push_back(decodeNext(text, pos));
    return out;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(char32_t cp) {
    std::string out;
    append(out, cp);
    return out;
}

bool isValid(std::string_view text) {
    std::size_t pos = 0;
    try {
        while (pos < text.size()) decodeNext(text, pos);
    } catch (const ValidationError&) {
        return false;
    }
    return true;
}

} // namespace glyphrun::utf8
