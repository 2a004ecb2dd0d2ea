#ifndef RUSTICO_IMAGE_IO_HPP
#define RUSTICO_IMAGE_IO_HPP

#include <string>

#include "rustico/image.hpp"
#include "rustico/metrics.hpp"

namespace rustico {

/// How color inputs collapse to a single plane. Green is the usual choice for
/// fundus photographs; luminance is Rec. 601.
enum class Channel { luminance, green };

Channel channel_from_string(const std::string& name);
std::string to_string(Channel c);

/// Reads 8/16-bit grayscale or RGB(A) PNG and PGM/PPM (P2/P3/P5/P6), returns
/// intensities normalized to [0, 1]. Format picked by file signature.
GrayImage load_image(const std::string& path, Channel channel = Channel::luminance);

/// Same loaders; any pixel with positive intensity is foreground.
BinaryMask load_mask(const std::string& path);

/// 8-bit grayscale PNG. Values are scaled by the global maximum when it
/// exceeds zero, so response maps are always written full-range.
void write_png_scaled(const GrayImage& img, const std::string& path);

/// 8-bit grayscale PNG of values already in [0, 1] (clamped, not rescaled).
void write_png_unit(const GrayImage& img, const std::string& path);

/// Binary mask as 0/255 PNG.
void write_png_mask(const BinaryMask& mask, const std::string& path);

/// 16-bit binary PGM (P5, maxval 65535) of values in [0, 1] — the
/// quantization used for evaluation-grade response maps.
void write_pgm16(const GrayImage& img, const std::string& path);

} // namespace rustico

#endif
