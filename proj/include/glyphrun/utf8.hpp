#ifndef GLYPHRUN_UTF8_HPP
#define GLYPHRUN_UTF8_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "glyphrun/errors.hpp"

namespace glyphrun::utf8 {

// Decodes the scalar starting at text[pos]; advances pos past it.
// Throws ValidationError on malformed input (also rejects overlong forms
// and surrogates).
char32_t decodeNext(std::string_view text, std::size_t& pos);

std::vector<char32_t> decode(std::string_view text);

void append(std::string& out, char32_t cp);

std::string encode(char32_t cp);

bool isValid(std::string_view text);

} // namespace glyphrun::utf8

#endif
