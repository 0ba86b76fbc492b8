#pragma once

#include <string>
#include <vector>

#include "mvdc/camera.hpp"
#include "mvdc/image.hpp"

namespace mvdc {

// Binary 8-bit netpbm. Readers accept '#' header comments and report
// malformed input as ParseError with the byte offset; writers emit a fixed
// comment-free header so write -> read round-trips bit-exactly.
Grid8 read_pgm(const std::string& path);
Grid8 parse_pgm(const std::string& bytes);
void write_pgm(const std::string& path, const Grid8& img);
std::string serialize_pgm(const Grid8& img);

TextureImage read_ppm(const std::string& path);
TextureImage parse_ppm(const std::string& bytes);
void write_ppm(const std::string& path, const TextureImage& img);
std::string serialize_ppm(const TextureImage& img);

// Plain-text camera list. Per camera: id line, three A rows, three R rows,
// one t row, one "z_min z_max" line; '#' starts a comment. The writer emits
// 17 significant digits so parse -> serialize preserves every double.
std::vector<CameraParams> read_cameras(const std::string& path);
std::vector<CameraParams> parse_cameras(const std::string& text);
void write_cameras(const std::string& path,
                   const std::vector<CameraParams>& cams);
std::string serialize_cameras(const std::vector<CameraParams>& cams);

std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::string& bytes);

}  // namespace mvdc
