#pragma once

#include "dynct/image.hpp"
#include "dynct/projector.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dynct {

/// Malformed raster/config file; byte_offset points at the offending
/// position.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, size_t byte_offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset(byte_offset) {}
    size_t byte_offset;
};

/// "GR64" raster: 16-byte header (magic "GR64", u32 LE rows, u32 LE cols,
/// u32 reserved = 0), then row-major float64 little-endian payload.
/// Round trips are bit exact.
void save_gr64(const std::string& path, const std::vector<double>& values, uint32_t rows,
               uint32_t cols);
std::vector<double> load_gr64(const std::string& path, uint32_t& rows, uint32_t& cols);

void save_image_gr64(const std::string& path, const ImageGrid& img);
ImageGrid load_image_gr64(const std::string& path);

/// Flow fields are stored as two rasters: prefix + ".vx.gr64" / ".vy.gr64".
void save_flow_gr64(const std::string& prefix, const FlowField& flow);
FlowField load_flow_gr64(const std::string& prefix);

/// Sinogram raster (rows = angles, cols = detectors) plus a flat
/// key=value sidecar (same path with ".meta" appended) carrying the
/// protocol and scan index.
void save_sinogram(const std::string& path, const Sinogram& sino);
Sinogram load_sinogram(const std::string& path);

/// 8-bit PGM (P5, maxval 255) preview; [min, max] maps linearly onto
/// [0, 255], a constant image maps to all zeros.
void save_pgm(const std::string& path, const ImageGrid& img);

std::map<std::string, std::string> read_kv_file(const std::string& path);
void write_kv_file(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries);

uint64_t fnv1a64_file(const std::string& path);

/// Fixed-precision decimal with 6 significant digits, for CSV reports.
std::string format_sig6(double v);

} // namespace dynct
