#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "palim/image.hpp"

namespace palim {

/// Decodes PGM (P5/P2), PPM (P6, luminance-converted) and, when built with
/// libpng, 8-bit PNG. Throws Error{format} on anything else.
GrayImage decode_image(std::span<const std::uint8_t> bytes);

GrayImage load_image(const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255).
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

void save_pgm(const std::filesystem::path& path, const GrayImage& img);

/// ITU-R BT.601 luma, rounded to nearest.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

bool png_supported();

}  // namespace palim
