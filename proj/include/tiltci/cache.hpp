#pragma once

// Columnar on-disk cache for per-element CDF columns. Enabled by setting
// TILTCI_CACHE_DIR; any read problem is treated as a miss.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tiltci {

std::optional<std::vector<double>> cache_load(const std::string& key, std::size_t columns, std::size_t rows);
void cache_store(const std::string& key, std::size_t columns, std::size_t rows, const std::vector<double>& data);

}  // namespace tiltci
