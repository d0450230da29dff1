#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eandt/ndt_map.hpp"

namespace eandt {

// Serialized cell footprint in bytes (kept in sync with the map format).
inline constexpr std::size_t kCellRecordBytes = 1 + 4 + 3 * 8 + 6 * 8;

std::vector<std::uint8_t> serialize_map(const NdtMap& map);
NdtMap deserialize_map(const std::vector<std::uint8_t>& bytes);

void save_map(const NdtMap& map, const std::string& path);
NdtMap load_map(const std::string& path);

}  // namespace eandt
