#pragma once

#include "uwdiff/image.hpp"

namespace uwdiff {

// sRGB (Display01, 3 channels) -> CIELab under D65. Channels of the result
// are (L, a, b) with L in [0, 100]; the LatentSigned tag marks the samples
// as unbounded, not display values.
Image rgb_to_lab(const Image& img);

}  // namespace uwdiff
