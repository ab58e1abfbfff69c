#ifndef GLYPHRUN_SHA256_HPP
#define GLYPHRUN_SHA256_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace glyphrun {

// Incremental SHA-256 (FIPS 180-4). Used for manifest digests and the
// determinism checks; no external crypto dependency is available here.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> digest();

    static std::string hexDigest(std::string_view data);

private:
    void processBlock(const std::uint8_t* block);

    std::uint32_t h_[8];
    std::uint8_t buffer_[64];
    std::size_t bufferLen_ = 0;
    std::uint64_t totalLen_ = 0;
};

std::string toHex(const std::array<std::uint8_t, 32>& bytes);

} // namespace glyphrun

#endif
