#ifndef MAVENS_DIGEST_HPP
#define MAVENS_DIGEST_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace mavens {

/// SHA-256 digest as a lowercase hex string.
std::string sha256_hex(std::string_view data);

/// Digest of a file's contents; throws FormatError if the file cannot be read.
std::string sha256_file_hex(const std::string& path);

}  // namespace mavens

#endif
