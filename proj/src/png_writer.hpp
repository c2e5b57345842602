#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iepinn::detail {

// Minimal RGB8 PNG encoder (zlib-deflated, filter type 0).
void write_png(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& rgb);

}  // namespace iepinn::detail
