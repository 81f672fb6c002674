#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csalsa/types.hpp"

namespace csalsa {

/// Raw binary PGM (P5) contents. maxval <= 255 stores one byte per sample,
/// larger values two bytes (big endian).
struct PgmImage {
    Shape shape;
    int maxval = 65535;
    std::vector<std::uint16_t> pixels;
};

PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const PgmImage& image);

/// Maps [lo, hi] linearly onto [0, maxval], clipping outside values.
PgmImage quantize(const ImageGrid& image, double lo, double hi, int maxval = 65535);
/// Pixel values scaled to [0, scale]: p * scale / maxval.
ImageGrid to_image(const PgmImage& image, double scale = 255.0);

/// Raw PBM (P4). A set bit (black) marks a true entry.
Mask read_pbm(const std::string& path);
void write_pbm(const std::string& path, const Mask& mask);

}  // namespace csalsa
