#include "tiltci/cache.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace tiltci {

namespace {

constexpr char kMagic[8] = {'T', 'C', 'I', 'C', 'O', 'L', '0', '1'};

std::optional<std::filesystem::path> cache_path(const std::string& key) {
  const char* dir = std::getenv("TILTCI_CACHE_DIR");
  if (!dir || !*dir) return std::nullopt;
  return std::filesystem::path(dir) / (key + ".cols");
}

}  // namespace

std::optional<std::vector<double>> cache_load(const std::string& key, std::size_t columns, std::size_t rows) {
  auto path = cache_path(key);
  if (!path) return std::nullopt;
  std::ifstream in(*path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint64_t dims[2];
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || !std::equal(magic, magic + 8, kMagic) || dims[0] != columns || dims[1] != rows) return std::nullopt;
  std::vector<double> data(columns * rows);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) return std::nullopt;
  return data;
}

void cache_store(const std::string& key, std::size_t columns, std::size_t rows, const std::vector<double>& data) {
  auto path = cache_path(key);
  if (!path || data.size() != columns * rows) return;
  std::error_code ec;
  std::filesystem::create_directories(path->parent_path(), ec);
  auto tmp = *path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    std::uint64_t dims[2] = {columns, rows};
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!out) return;
  }
  std::filesystem::rename(tmp, *path, ec);
}

}  // namespace tiltci
