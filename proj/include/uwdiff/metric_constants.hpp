#pragma once

// Every coefficient and sub-measure parameter of the no-reference metrics
// lives here: published constant sets for UCIQE/UIQM vary across sources,
// so divergences stay a one-line change.
namespace uwdiff::metric_constants {

// uciqe = c1 * sigma_chroma + c2 * luma_contrast + c3 * mean_saturation
inline constexpr double kUciqeChromaStd = 0.4680;
inline constexpr double kUciqeLumaContrast = 0.2745;
inline constexpr double kUciqeSaturation = 0.2576;

// uiqm = c1 * uicm + c2 * uism + c3 * uiconm
inline constexpr double kUiqmColorfulness = 0.0282;
inline constexpr double kUiqmSharpness = 0.2953;
inline constexpr double kUiqmContrast = 3.5753;

// UICM = m1 * sqrt(mu_rg^2 + mu_yb^2) + m2 * sqrt(var_rg + var_yb)
inline constexpr double kUicmMeanCoeff = -0.0268;
inline constexpr double kUicmVarCoeff = 0.1586;
inline constexpr double kUicmTrimAlpha = 0.1;  // trimmed both sides

// Grayscale weights for combining per-channel edge maps in UISM.
inline constexpr double kUismLumaR = 0.299;
inline constexpr double kUismLumaG = 0.587;
inline constexpr double kUismLumaB = 0.114;

// Block statistics (EME / logAMEE). Partial edge blocks are dropped.
inline constexpr int kBlockSize = 8;
inline constexpr double kLogEps = 1e-7;
inline constexpr double kPlipGamma = 1026.0 / 1025.0;

}  // namespace uwdiff::metric_constants
