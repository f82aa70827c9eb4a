#pragma once

#include <string>

#include "uwdiff/image.hpp"

namespace uwdiff {

// Loads a PNG (8-bit gray or RGB, non-interlaced) or binary PPM (P6,
// maxval 255), sniffing the format from the file's magic bytes. Returns a
// Display01 image with samples v / 255.
//
// Errors are distinguished: missing file, unsupported format (bad magic,
// palette/alpha/16-bit/interlaced PNG, non-255 maxval PPM), and truncated or
// corrupt payloads each throw std::runtime_error with a distinct message.
Image load_image(const std::string& path);

// Saves a Display01 image, choosing the container by extension (.png or
// .ppm). Samples are quantized with round(v * 255); out-of-range samples
// are rejected. Gray images write 1-channel PNGs; PPM requires 3 channels.
void save_image(const Image& img, const std::string& path);

}  // namespace uwdiff
