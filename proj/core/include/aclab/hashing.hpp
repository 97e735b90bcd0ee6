#ifndef ACLAB_HASHING_HPP
#define ACLAB_HASHING_HPP

#include <string>
#include <string_view>

namespace aclab {

std::string sha256_hex(std::string_view bytes);

// Git-style blob hash: sha256 over "blob <size>\0" + bytes. Used to pin
// input files and config snapshots inside run manifests.
std::string content_hash(std::string_view bytes);
std::string file_content_hash(const std::string& path);

}  // namespace aclab

#endif
