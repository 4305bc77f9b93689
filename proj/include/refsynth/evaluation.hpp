#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "refsynth/image.hpp"

namespace refsynth {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) over all channels, for images with values in [0,1].
double psnr(const Image &a, const Image &b);
/// Same on raw double samples; float images cannot hold an exact 0.1 step.
double psnr(std::span<const double> a, std::span<const double> b);

enum class SsimWindow {
    Gaussian11,  // 11x11, sigma 1.5
    Uniform8,    // 8x8 box
};

/// SSIM constants. Images are converted to Rec. 601 luma before comparison; the dynamic range
/// is 1, so C1 = (k1)^2 and C2 = (k2)^2.
struct SsimOptions {
    SsimWindow window = SsimWindow::Gaussian11;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Mean of the local SSIM map over all window positions fully inside the image. Throws when the
/// image is smaller than the window.
double ssim(const Image &a, const Image &b, const SsimOptions &options = {});

struct BaselineParams {
    double blend_weight = 1.0;
    double gaussian_sigma = 2.0;  // pixels; <= 0 disables blurring
    double reflection_scale = 1.0;
};

/// Normalized 1-D gaussian taps of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable gaussian blur with clamp-to-edge borders.
Image gaussian_blur(const Image &img, double sigma);

/// Image-space reflection synthesis: clip(T + blend_weight * reflection_scale * blur(R), 0, 1).
Image baseline_blend(const Image &transmission, const Image &reflection, const BaselineParams &params);

struct DefocusProfile {
    int patches_x = 0;
    int patches_y = 0;
    std::vector<double> sharpness;  // mean squared luma gradient per patch, row-major
    double dispersion = 0;          // coefficient of variation of `sharpness`; 0 when the mean is 0
};

/// Per-patch gradient energy over non-overlapping patch x patch tiles.
DefocusProfile defocus_variance_profile(const Image &img, int patch);

struct ImageScore {
    std::string name;
    double psnr = 0;
    double ssim = 0;
};

struct MetricReport {
    std::vector<ImageScore> images;
    double mean_psnr = 0;  // infinite entries are excluded from the mean
    double mean_ssim = 0;
    double max_psnr = 0;
    double max_ssim = 0;
    SsimOptions ssim_options;
};

/// Scores every image in `pred_dir` against the file with the same name in `gt_dir`. EXR images
/// are clipped to [0,1]; PNG images are read as 8-bit values / 255.
MetricReport evaluate_directories(const std::filesystem::path &pred_dir, const std::filesystem::path &gt_dir,
                                  const SsimOptions &options = {});

}  // namespace refsynth
