#include "refsynth/io.hpp"

#include <png.h>

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace refsynth {

namespace {

static_assert(std::endian::native == std::endian::little, "EXR codec assumes a little-endian host");

constexpr std::uint32_t kExrMagic = 20000630;
constexpr int kExrHalf = 1;
constexpr int kExrFloat = 2;

class ByteWriter {
public:
    template <typename T>
    void put(T v)
    {
        const auto *p = reinterpret_cast<const char *>(&v);
        bytes_.append(p, sizeof(T));
    }
    void put_cstring(const std::string &s)
    {
        bytes_.append(s);
        bytes_.push_back('\0');
    }
    void attribute(const std::string &name, const std::string &type, const std::string &value)
    {
        put_cstring(name);
        put_cstring(type);
        put<std::int32_t>(static_cast<std::int32_t>(value.size()));
        bytes_.append(value);
    }
    std::string &bytes() { return bytes_; }

private:
    std::string bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::string bytes) : bytes_(std::move(bytes)) {}

    template <typename T>
    T get()
    {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_cstring()
    {
        const auto end = bytes_.find('\0', pos_);
        if (end == std::string::npos)
            throw std::runtime_error("read_exr: truncated header");
        std::string s = bytes_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return s;
    }
    std::string get_bytes(std::size_t n)
    {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void seek(std::size_t pos)
    {
        if (pos > bytes_.size())
            throw std::runtime_error("read_exr: offset out of range");
        pos_ = pos;
    }
    std::size_t position() const { return pos_; }

private:
    void need(std::size_t n) const
    {
        if (pos_ + n > bytes_.size())
            throw std::runtime_error("read_exr: truncated file");
    }

    std::string bytes_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename T>
std::string pod_bytes(const T &v)
{
    return std::string(reinterpret_cast<const char *>(&v), sizeof(T));
}

float half_to_float(std::uint16_t h)
{
    const std::uint32_t sign = (h & 0x8000u) << 16;
    const std::uint32_t exponent = (h >> 10) & 0x1fu;
    const std::uint32_t mantissa = h & 0x3ffu;
    if (exponent == 0) {
        const float m = std::ldexp(static_cast<float>(mantissa), -24);
        return sign ? -m : m;
    }
    std::uint32_t bits;
    if (exponent == 31)
        bits = sign | 0x7f800000u | (mantissa << 13);
    else
        bits = sign | ((exponent + 112) << 23) | (mantissa << 13);
    return std::bit_cast<float>(bits);
}

}  // namespace

void write_exr(const std::filesystem::path &path, const Image &img)
{
    if (img.channels() != 1 && img.channels() != 3)
        throw std::invalid_argument("write_exr: expected 1 or 3 channels");
    const int w = img.width();
    const int h = img.height();
    // Channels are stored in alphabetical order.
    std::vector<std::pair<std::string, int>> channels;
    if (img.channels() == 3)
        channels = {{"B", 2}, {"G", 1}, {"R", 0}};
    else
        channels = {{"Y", 0}};

    ByteWriter out;
    out.put<std::uint32_t>(kExrMagic);
    out.put<std::uint32_t>(2);

    std::string chlist;
    for (const auto &[name, _] : channels) {
        chlist += name;
        chlist.push_back('\0');
        chlist += pod_bytes<std::int32_t>(kExrFloat);
        chlist += std::string(4, '\0');  // pLinear + reserved
        chlist += pod_bytes<std::int32_t>(1);
        chlist += pod_bytes<std::int32_t>(1);
    }
    chlist.push_back('\0');
    const std::array<std::int32_t, 4> window = {0, 0, w - 1, h - 1};
    std::string box;
    for (auto v : window)
        box += pod_bytes(v);

    out.attribute("channels", "chlist", chlist);
    out.attribute("compression", "compression", std::string(1, '\0'));
    out.attribute("dataWindow", "box2i", box);
    out.attribute("displayWindow", "box2i", box);
    out.attribute("lineOrder", "lineOrder", std::string(1, '\0'));
    out.attribute("pixelAspectRatio", "float", pod_bytes(1.0f));
    out.attribute("screenWindowCenter", "v2f", pod_bytes(0.0f) + pod_bytes(0.0f));
    out.attribute("screenWindowWidth", "float", pod_bytes(1.0f));
    out.bytes().push_back('\0');

    const std::size_t line_bytes = static_cast<std::size_t>(w) * channels.size() * sizeof(float);
    const std::size_t table_start = out.bytes().size();
    const std::size_t first_line = table_start + static_cast<std::size_t>(h) * sizeof(std::uint64_t);
    for (int y = 0; y < h; ++y)
        out.put<std::uint64_t>(first_line + static_cast<std::size_t>(y) * (line_bytes + 8));
    for (int y = 0; y < h; ++y) {
        out.put<std::int32_t>(y);
        out.put<std::int32_t>(static_cast<std::int32_t>(line_bytes));
        for (const auto &[_, c] : channels)
            for (int x = 0; x < w; ++x)
                out.put<float>(img.at(x, y, c));
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw std::runtime_error("write_exr: cannot open " + path.string());
    file.write(out.bytes().data(), static_cast<std::streamsize>(out.bytes().size()));
    if (!file)
        throw std::runtime_error("write_exr: write failed for " + path.string());
}

Image read_exr(const std::filesystem::path &path)
{
    ByteReader in(read_file(path));
    if (in.get<std::uint32_t>() != kExrMagic)
        throw std::runtime_error("read_exr: not an OpenEXR file: " + path.string());
    const std::uint32_t version = in.get<std::uint32_t>();
    if ((version & 0xffu) != 2 || (version & 0x200u))
        throw std::runtime_error("read_exr: only single-part scanline files are supported");

    struct Channel {
        std::string name;
        int type;
    };
    std::vector<Channel> channels;
    std::array<std::int32_t, 4> window{};
    int compression = -1;
    while (true) {
        const std::string name = in.get_cstring();
        if (name.empty())
            break;
        const std::string type = in.get_cstring();
        const auto size = in.get<std::int32_t>();
        ByteReader value(in.get_bytes(static_cast<std::size_t>(size)));
        if (name == "channels") {
            while (true) {
                const std::string ch = value.get_cstring();
                if (ch.empty())
                    break;
                const int pixel_type = value.get<std::int32_t>();
                value.get_bytes(4);
                const int xs = value.get<std::int32_t>();
                const int ys = value.get<std::int32_t>();
                if (xs != 1 || ys != 1)
                    throw std::runtime_error("read_exr: subsampled channels are not supported");
                channels.push_back({ch, pixel_type});
            }
        } else if (name == "compression") {
            compression = value.get<std::uint8_t>();
        } else if (name == "dataWindow") {
            for (auto &v : window)
                v = value.get<std::int32_t>();
        }
    }
    if (compression != 0)
        throw std::runtime_error("read_exr: only uncompressed files are supported");
    for (const auto &c : channels)
        if (c.type != kExrFloat && c.type != kExrHalf)
            throw std::runtime_error("read_exr: unsupported channel type");
    const int w = window[2] - window[0] + 1;
    const int h = window[3] - window[1] + 1;
    if (w <= 0 || h <= 0 || channels.empty())
        throw std::runtime_error("read_exr: empty image");

    auto find = [&](const std::string &n) {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i].name == n)
                return static_cast<int>(i);
        return -1;
    };
    std::vector<int> source;
    if (find("R") >= 0 && find("G") >= 0 && find("B") >= 0)
        source = {find("R"), find("G"), find("B")};
    else if (find("Y") >= 0)
        source = {find("Y")};
    else if (find("Z") >= 0)
        source = {find("Z")};
    else if (find("R") >= 0)
        source = {find("R")};
    else
        source = {0};

    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(h));
    for (auto &o : offsets)
        o = in.get<std::uint64_t>();

    Image img(w, h, static_cast<int>(source.size()));
    std::vector<std::vector<float>> line(channels.size(), std::vector<float>(static_cast<std::size_t>(w)));
    for (int i = 0; i < h; ++i) {
        in.seek(offsets[static_cast<std::size_t>(i)]);
        const int y = in.get<std::int32_t>() - window[1];
        in.get<std::int32_t>();
        if (y < 0 || y >= h)
            throw std::runtime_error("read_exr: scanline out of range");
        for (std::size_t c = 0; c < channels.size(); ++c)
            for (int x = 0; x < w; ++x)
                line[c][static_cast<std::size_t>(x)] = channels[c].type == kExrFloat
                                                           ? in.get<float>()
                                                           : half_to_float(in.get<std::uint16_t>());
        for (std::size_t c = 0; c < source.size(); ++c)
            for (int x = 0; x < w; ++x)
                img.at(x, y, static_cast<int>(c)) = line[static_cast<std::size_t>(source[c])][static_cast<std::size_t>(x)];
    }
    return img;
}

namespace {

struct PngFile {
    std::FILE *fp = nullptr;
    ~PngFile()
    {
        if (fp)
            std::fclose(fp);
    }
};

Image decode_png(const std::filesystem::path &path, bool normalize_values)
{
    PngFile file{std::fopen(path.c_str(), "rb")};
    if (!file.fp)
        throw std::runtime_error("read_png: cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("read_png: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: decode error in " + path.string());
    }
    png_init_io(png, file.fp);
    png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_SWAP_ENDIAN,
                 nullptr);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int src_channels = png_get_channels(png, info);
    png_bytepp rows = png_get_rows(png, info);

    const int channels = src_channels >= 3 ? 3 : 1;
    const double max_value = depth == 16 ? 65535.0 : 255.0;
    Image img(w, h, channels);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                const std::size_t idx = static_cast<std::size_t>(x) * src_channels + c;
                double v;
                if (depth == 16) {
                    std::uint16_t s;
                    std::memcpy(&s, rows[y] + idx * 2, 2);
                    v = s;
                } else {
                    v = rows[y][idx];
                }
                img.at(x, y, c) = static_cast<float>(normalize_values ? v / max_value : v);
            }
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void encode_png(const std::filesystem::path &path, int w, int h, int channels, int bit_depth,
                const std::vector<std::uint8_t> &data)
{
    PngFile file{std::fopen(path.c_str(), "wb")};
    if (!file.fp)
        throw std::runtime_error("write_png: cannot open " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("write_png: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: encode error for " + path.string());
    }
    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(w) * channels * (bit_depth / 8);
    for (int y = 0; y < h; ++y)
        png_write_row(png, const_cast<png_bytep>(data.data() + static_cast<std::size_t>(y) * stride));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Image read_png(const std::filesystem::path &path)
{
    return decode_png(path, true);
}

Image read_png_raw(const std::filesystem::path &path)
{
    return decode_png(path, false);
}

void write_png8(const std::filesystem::path &path, const Image &img)
{
    if (img.channels() != 1 && img.channels() != 3)
        throw std::invalid_argument("write_png8: expected 1 or 3 channels");
    std::vector<std::uint8_t> data(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(static_cast<double>(img.data()[i]), 0.0, 1.0) * 255.0));
    encode_png(path, img.width(), img.height(), img.channels(), 8, data);
}

void write_png16_gray(const std::filesystem::path &path, const Image &img)
{
    if (img.channels() != 1)
        throw std::invalid_argument("write_png16_gray: expected 1 channel");
    std::vector<std::uint8_t> data(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const auto v = static_cast<std::uint16_t>(std::lround(std::clamp(static_cast<double>(img.data()[i]), 0.0, 65535.0)));
        data[2 * i] = static_cast<std::uint8_t>(v >> 8);  // PNG is big-endian
        data[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    encode_png(path, img.width(), img.height(), 1, 16, data);
}

Image load_srgb_color(const std::filesystem::path &path)
{
    Image raw = read_png(path);
    Image rgb(raw.width(), raw.height(), 3);
    for (int y = 0; y < raw.height(); ++y)
        for (int x = 0; x < raw.width(); ++x)
            for (int c = 0; c < 3; ++c)
                rgb.at(x, y, c) = static_cast<float>(srgb_to_linear(raw.at(x, y, raw.channels() == 3 ? c : 0)));
    return rgb;
}

Image load_depth(const std::filesystem::path &path, double png_scale)
{
    auto ext = path.extension().string();
    for (auto &ch : ext)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    Image depth;
    if (ext == ".exr") {
        depth = read_exr(path);
    } else if (ext == ".png") {
        depth = read_png_raw(path);
        for (auto &v : depth.data())
            v = static_cast<float>(v * png_scale);
    } else {
        throw std::invalid_argument("load_depth: unsupported depth format " + ext);
    }
    if (depth.channels() != 1) {
        Image single(depth.width(), depth.height(), 1);
        for (int y = 0; y < depth.height(); ++y)
            for (int x = 0; x < depth.width(); ++x)
                single.at(x, y) = depth.at(x, y, 0);
        depth = std::move(single);
    }
    return depth;
}

DepthImage load_depth_image(const std::filesystem::path &rgb, const std::filesystem::path &depth,
                            double png_depth_scale, double hfov_deg)
{
    DepthImage img{load_srgb_color(rgb), load_depth(depth, png_depth_scale), hfov_deg};
    img.validate();
    return img;
}

std::string sha256_bytes(const std::string &bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || !EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) ||
        !EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) ||
        !EVP_DigestFinal_ex(ctx.get(), md.data(), &len))
        throw std::runtime_error("sha256: digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[md[i] >> 4]);
        hex.push_back(kHex[md[i] & 0xf]);
    }
    return hex;
}

std::string sha256_file(const std::filesystem::path &path)
{
    return sha256_bytes(read_file(path));
}

}  // namespace refsynth
