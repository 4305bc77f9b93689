#include "refsynth/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "refsynth/io.hpp"

namespace refsynth {

namespace {

template <typename T>
double psnr_impl(std::span<const T> a, std::span<const T> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("psnr: image shapes differ");
    if (a.empty())
        throw std::invalid_argument("psnr: empty image");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(a.size());
    if (mse == 0.0)
        return kPsnrIdentical;
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace

double psnr(const Image &a, const Image &b)
{
    if (!a.same_shape(b))
        throw std::invalid_argument("psnr: image shapes differ");
    return psnr_impl<float>(a.data(), b.data());
}

double psnr(std::span<const double> a, std::span<const double> b)
{
    return psnr_impl(a, b);
}

namespace {

std::vector<double> ssim_window(SsimWindow window, int &size)
{
    if (window == SsimWindow::Uniform8) {
        size = 8;
        return std::vector<double>(64, 1.0 / 64.0);
    }
    size = 11;
    std::vector<double> w(121);
    double total = 0.0;
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x) {
            const double dx = x - 5, dy = y - 5;
            w[static_cast<std::size_t>(y * 11 + x)] = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
            total += w[static_cast<std::size_t>(y * 11 + x)];
        }
    for (auto &v : w)
        v /= total;
    return w;
}

}  // namespace

double ssim(const Image &a, const Image &b, const SsimOptions &options)
{
    if (!a.same_shape(b))
        throw std::invalid_argument("ssim: image shapes differ");
    int size = 0;
    const std::vector<double> window = ssim_window(options.window, size);
    if (a.width() < size || a.height() < size)
        throw std::invalid_argument("ssim: image is smaller than the window");
    const Image ga = to_grayscale(a);
    const Image gb = to_grayscale(b);
    const double c1 = options.k1 * options.k1;
    const double c2 = options.k2 * options.k2;

    double total = 0.0;
    long count = 0;
    for (int y0 = 0; y0 + size <= ga.height(); ++y0) {
        for (int x0 = 0; x0 + size <= ga.width(); ++x0) {
            double mu_a = 0, mu_b = 0;
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) {
                    const double w = window[static_cast<std::size_t>(y * size + x)];
                    mu_a += w * ga.at(x0 + x, y0 + y);
                    mu_b += w * gb.at(x0 + x, y0 + y);
                }
            double var_a = 0, var_b = 0, cov = 0;
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) {
                    const double w = window[static_cast<std::size_t>(y * size + x)];
                    const double da = ga.at(x0 + x, y0 + y) - mu_a;
                    const double db = gb.at(x0 + x, y0 + y) - mu_b;
                    var_a += w * da * da;
                    var_b += w * db * db;
                    cov += w * da * db;
                }
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

std::vector<double> gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0))
        return {1.0};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[static_cast<std::size_t>(i + radius)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        total += k[static_cast<std::size_t>(i + radius)];
    }
    for (auto &v : k)
        v /= total;
    return k;
}

Image gaussian_blur(const Image &img, double sigma)
{
    const std::vector<double> k = gaussian_kernel(sigma);
    if (k.size() == 1)
        return img;
    const int radius = static_cast<int>(k.size() / 2);
    const int w = img.width(), h = img.height(), ch = img.channels();
    Image tmp(w, h, ch), out(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                double s = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    s += k[static_cast<std::size_t>(i + radius)] * img.at(std::clamp(x + i, 0, w - 1), y, c);
                tmp.at(x, y, c) = static_cast<float>(s);
            }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                double s = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    s += k[static_cast<std::size_t>(i + radius)] * tmp.at(x, std::clamp(y + i, 0, h - 1), c);
                out.at(x, y, c) = static_cast<float>(s);
            }
    return out;
}

Image baseline_blend(const Image &transmission, const Image &reflection, const BaselineParams &params)
{
    if (!transmission.same_shape(reflection))
        throw std::invalid_argument("baseline_blend: image shapes differ");
    const Image blurred = gaussian_blur(reflection, params.gaussian_sigma);
    const double gain = params.blend_weight * params.reflection_scale;
    Image out(transmission.width(), transmission.height(), transmission.channels());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(
            std::clamp(transmission.data()[i] + gain * blurred.data()[i], 0.0, 1.0));
    return out;
}

DefocusProfile defocus_variance_profile(const Image &img, int patch)
{
    if (patch < 2 || img.width() < patch || img.height() < patch)
        throw std::invalid_argument("defocus_variance_profile: image must be larger than the patch");
    const Image g = to_grayscale(img);
    DefocusProfile profile;
    profile.patches_x = g.width() / patch;
    profile.patches_y = g.height() / patch;
    for (int py = 0; py < profile.patches_y; ++py) {
        for (int px = 0; px < profile.patches_x; ++px) {
            double energy = 0.0;
            int n = 0;
            for (int y = py * patch; y < (py + 1) * patch - 1; ++y)
                for (int x = px * patch; x < (px + 1) * patch - 1; ++x) {
                    const double gx = g.at(x + 1, y) - g.at(x, y);
                    const double gy = g.at(x, y + 1) - g.at(x, y);
                    energy += gx * gx + gy * gy;
                    ++n;
                }
            profile.sharpness.push_back(energy / n);
        }
    }
    double mean = 0.0;
    for (double s : profile.sharpness)
        mean += s;
    mean /= static_cast<double>(profile.sharpness.size());
    if (mean <= 0.0) {
        profile.dispersion = 0.0;
        return profile;
    }
    double var = 0.0;
    for (double s : profile.sharpness)
        var += (s - mean) * (s - mean);
    var /= static_cast<double>(profile.sharpness.size());
    profile.dispersion = std::sqrt(var) / mean;
    return profile;
}

namespace {

Image load_for_metrics(const std::filesystem::path &path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    Image img = ext == ".exr" ? read_exr(path) : read_png(path);
    for (auto &v : img.data())
        v = std::clamp(v, 0.0f, 1.0f);
    return img;
}

}  // namespace

MetricReport evaluate_directories(const std::filesystem::path &pred_dir, const std::filesystem::path &gt_dir,
                                  const SsimOptions &options)
{
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(pred_dir)) {
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (entry.is_regular_file() && (ext == ".exr" || ext == ".png"))
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("evaluate: no images in " + pred_dir.string());

    MetricReport report;
    report.ssim_options = options;
    report.max_psnr = -std::numeric_limits<double>::infinity();
    report.max_ssim = -std::numeric_limits<double>::infinity();
    double psnr_sum = 0.0;
    int finite = 0;
    for (const auto &pred_path : files) {
        const auto gt_path = gt_dir / pred_path.filename();
        if (!std::filesystem::exists(gt_path))
            throw std::runtime_error("evaluate: missing ground truth " + gt_path.string());
        const Image pred = load_for_metrics(pred_path);
        const Image gt = load_for_metrics(gt_path);
        ImageScore score{pred_path.filename().string(), psnr(pred, gt), ssim(pred, gt, options)};
        if (std::isfinite(score.psnr)) {
            psnr_sum += score.psnr;
            ++finite;
        }
        report.mean_ssim += score.ssim;
        report.max_psnr = std::max(report.max_psnr, score.psnr);
        report.max_ssim = std::max(report.max_ssim, score.ssim);
        report.images.push_back(std::move(score));
    }
    report.mean_psnr = finite > 0 ? psnr_sum / finite : kPsnrIdentical;
    report.mean_ssim /= static_cast<double>(report.images.size());
    return report;
}

}  // namespace refsynth
