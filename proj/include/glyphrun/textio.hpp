#ifndef GLYPHRUN_TEXTIO_HPP
#define GLYPHRUN_TEXTIO_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace glyphrun {

std::string readFile(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a partially written file.
void atomicWriteFile(const std::filesystem::path& path, std::string_view content);

// Shortest decimal round-trip representation ("%.17g").
std::string formatDouble(double value);

std::vector<std::string> splitLines(std::string_view text);

std::vector<std::string> splitOn(std::string_view line, char sep);

std::string trim(std::string_view s);

} // namespace glyphrun

#endif
