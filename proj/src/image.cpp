#include "refsynth/image.hpp"

#include <cmath>

namespace refsynth {

Image to_grayscale(const Image &img)
{
    if (img.channels() == 1)
        return img;
    if (img.channels() < 3)
        throw std::invalid_argument("to_grayscale: expected 1 or 3+ channels");
    Image out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.at(x, y) = static_cast<float>(0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                                              0.114 * img.at(x, y, 2));
    return out;
}

double mean_value(const Image &img)
{
    if (img.empty())
        return 0.0;
    double sum = 0.0;
    for (float v : img.data())
        sum += v;
    return sum / static_cast<double>(img.size());
}

double srgb_to_linear(double v)
{
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v)
{
    v = std::clamp(v, 0.0, 1.0);
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

}  // namespace refsynth
