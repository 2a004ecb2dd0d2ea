#include "rustico/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include <png.h>

#include "rustico/errors.hpp"

namespace rustico {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

double collapse_rgb(double r, double g, double b, Channel channel) {
    if (channel == Channel::green)
        return g;
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

GrayImage load_png(const std::string& path, Channel channel) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp)
        throw IoError("cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> pixels;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG decode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    // normalize to 8- or 16-bit gray or RGB
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    const int depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    pixels.resize(rowbytes * h);
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        row_ptrs[y] = pixels.data() + y * rowbytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    const double scale = depth == 16 ? 65535.0 : 255.0;
    for (png_uint_32 y = 0; y < h; ++y) {
        const png_byte* row = pixels.data() + y * rowbytes;
        for (png_uint_32 x = 0; x < w; ++x) {
            double v;
            if (channels == 1) {
                v = depth == 16 ? (row[2 * x] << 8 | row[2 * x + 1]) : row[x];
            } else {
                double r, g, b;
                if (depth == 16) {
                    const png_byte* p = row + 6 * x;
                    r = (p[0] << 8) | p[1];
                    g = (p[2] << 8) | p[3];
                    b = (p[4] << 8) | p[5];
                } else {
                    const png_byte* p = row + 3 * x;
                    r = p[0];
                    g = p[1];
                    b = p[2];
                }
                v = collapse_rgb(r, g, b, channel);
            }
            img.at(static_cast<int>(x), static_cast<int>(y)) = v / scale;
        }
    }
    return img;
}

// --- Netpbm ---------------------------------------------------------------

int pnm_next_value(std::istream& in, const std::string& path) {
    // skips whitespace and '#' comments
    for (;;) {
        const int c = in.peek();
        if (c == EOF)
            throw IoError("truncated PNM header: " + path);
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    in >> value;
    if (!in)
        throw IoError("bad PNM header: " + path);
    return value;
}

GrayImage load_pnm(const std::string& path, Channel channel) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] < '2' || magic[1] > '6') || magic[1] == '4')
        throw IoError("unsupported PNM type: " + path);
    const bool ascii = magic[1] == '2' || magic[1] == '3';
    const bool color = magic[1] == '3' || magic[1] == '6';

    const int w = pnm_next_value(in, path);
    const int h = pnm_next_value(in, path);
    const int maxval = pnm_next_value(in, path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw IoError("bad PNM dimensions: " + path);

    const int samples_per_pixel = color ? 3 : 1;
    const std::size_t n_samples = static_cast<std::size_t>(w) * h * samples_per_pixel;
    std::vector<double> samples(n_samples);

    if (ascii) {
        for (std::size_t i = 0; i < n_samples; ++i)
            samples[i] = pnm_next_value(in, path);
    } else {
        in.get(); // single whitespace after maxval
        const int bytes_per_sample = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(n_samples * bytes_per_sample);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!in)
            throw IoError("truncated PNM data: " + path);
        for (std::size_t i = 0; i < n_samples; ++i) {
            samples[i] = bytes_per_sample == 2
                             ? static_cast<double>(raw[2 * i] << 8 | raw[2 * i + 1])
                             : static_cast<double>(raw[i]);
        }
    }

    GrayImage img(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) {
        double v;
        if (color)
            v = collapse_rgb(samples[3 * i], samples[3 * i + 1], samples[3 * i + 2], channel);
        else
            v = samples[i];
        img.data[i] = v / maxval;
    }
    return img;
}

bool has_png_signature(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {0};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in && !png_sig_cmp(sig, 0, 8);
}

void write_png_bytes(const std::string& path, int w, int h,
                     const std::vector<unsigned char>& gray8) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw IoError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < h; ++y)
        png_write_row(png, const_cast<png_bytep>(gray8.data() + static_cast<std::size_t>(y) * w));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

Channel channel_from_string(const std::string& name) {
    if (name == "green")
        return Channel::green;
    if (name == "luminance")
        return Channel::luminance;
    throw std::invalid_argument("unknown channel: " + name);
}

std::string to_string(Channel c) {
    return c == Channel::green ? "green" : "luminance";
}

GrayImage load_image(const std::string& path, Channel channel) {
    if (has_png_signature(path))
        return load_png(path, channel);
    return load_pnm(path, channel);
}

BinaryMask load_mask(const std::string& path) {
    const GrayImage img = load_image(path, Channel::luminance);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        mask.bits[i] = img.data[i] > 0.0 ? 1 : 0;
    return mask;
}

void write_png_scaled(const GrayImage& img, const std::string& path) {
    double mx = 0.0;
    for (double v : img.data)
        mx = std::max(mx, v);
    std::vector<unsigned char> gray8(img.size(), 0);
    if (mx > 0.0)
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double v = std::clamp(img.data[i] / mx, 0.0, 1.0);
            gray8[i] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
    write_png_bytes(path, img.width, img.height, gray8);
}

void write_png_unit(const GrayImage& img, const std::string& path) {
    std::vector<unsigned char> gray8(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        gray8[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    write_png_bytes(path, img.width, img.height, gray8);
}

void write_png_mask(const BinaryMask& mask, const std::string& path) {
    std::vector<unsigned char> gray8(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        gray8[i] = mask.bits[i] ? 255 : 0;
    write_png_bytes(path, mask.width, mask.height, gray8);
}

void write_pgm16(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<unsigned char> raw(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        const unsigned u = static_cast<unsigned>(std::lround(v * 65535.0));
        raw[2 * i] = static_cast<unsigned char>(u >> 8);
        raw[2 * i + 1] = static_cast<unsigned char>(u & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw IoError("write failed: " + path);
}

} // namespace rustico
