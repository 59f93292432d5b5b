#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "harmonize/error.hpp"
#include "harmonize/io.hpp"

namespace harmonize::io {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    throw Error(Errc::StorageFailure, fmt::format("{}: is a directory", path.string()));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::StorageFailure, fmt::format("{}: cannot open for reading", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::StorageFailure, fmt::format("{}: read failed", path.string()));
  return buf.str();
}

void write_text_file(const fs::path& path, std::string_view bytes) {
  // Write to a sibling temp file and rename so readers never see a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::StorageFailure, fmt::format("{}: cannot open for writing", path.string()));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(Errc::StorageFailure, fmt::format("{}: write failed", path.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::StorageFailure, fmt::format("{}: cannot replace file", path.string()));
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::StorageFailure, "SHA-256 digest failed");
  }
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

}  // namespace harmonize::io
