#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "refsynth/vec3.hpp"

namespace refsynth {

/// Interleaved float raster, row-major with row 0 at the top.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, float fill = 0.0f)
        : width_(width), height_(height), channels_(channels),
          pixels_(static_cast<std::size_t>(width) * height * channels, fill)
    {
        if (width < 0 || height < 0 || channels <= 0)
            throw std::invalid_argument("Image: invalid dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t size() const { return pixels_.size(); }
    bool empty() const { return pixels_.empty(); }

    float &at(int x, int y, int c = 0) { return pixels_[index(x, y, c)]; }
    float at(int x, int y, int c = 0) const { return pixels_[index(x, y, c)]; }

    Color rgb(int x, int y) const
    {
        if (channels_ == 1) {
            const double v = at(x, y);
            return Color(v);
        }
        return {at(x, y, 0), at(x, y, 1), at(x, y, 2)};
    }
    void set_rgb(int x, int y, const Color &c)
    {
        at(x, y, 0) = static_cast<float>(c.r);
        at(x, y, 1) = static_cast<float>(c.g);
        at(x, y, 2) = static_cast<float>(c.b);
    }

    std::vector<float> &data() { return pixels_; }
    const std::vector<float> &data() const { return pixels_; }

    bool same_shape(const Image &o) const
    {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }

    friend bool operator==(const Image &, const Image &) = default;

private:
    std::size_t index(int x, int y, int c) const
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> pixels_;
};

/// Rec. 601 luma weights (0.299, 0.587, 0.114); single-channel images pass through.
Image to_grayscale(const Image &img);

double mean_value(const Image &img);

/// sRGB transfer functions on [0,1].
double srgb_to_linear(double v);
double linear_to_srgb(double v);

}  // namespace refsynth
