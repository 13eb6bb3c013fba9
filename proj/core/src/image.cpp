#include <gcrep/image.hpp>

#include <gcrep/error.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace gcrep {

ImageMatrix ImageMatrix::from_flat(const Vector& values, Shape shape) {
  if (values.size() != shape.size())
    throw InvalidArgument("ImageMatrix::from_flat: size does not match shape");
  return ImageMatrix(RowMatrix(as_matrix(values, shape)));
}

ImageMatrix& ImageMatrix::clamp() {
  pixels_ = pixels_.cwiseMax(0.0).cwiseMin(1.0);
  return *this;
}

namespace {

class PgmReader {
 public:
  PgmReader(std::vector<unsigned char> bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  // Header tokens are separated by whitespace; '#' starts a comment line.
  std::string token() {
    skip_space();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#')
      tok.push_back(static_cast<char>(bytes_[pos_++]));
    if (tok.empty()) fail("unexpected end of header");
    return tok;
  }

  long number(const char* what) {
    const std::string tok = token();
    if (!std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
      fail(std::string("malformed ") + what + " '" + tok + "'");
    try {
      return std::stol(tok);
    } catch (const std::exception&) {
      fail(std::string("malformed ") + what + " '" + tok + "'");
    }
  }

  // Exactly one whitespace byte separates the header from a binary raster.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("truncated header");
    ++pos_;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  unsigned char byte() { return bytes_[pos_++]; }

  [[noreturn]] void fail(const std::string& why) const {
    throw IoError("load_pgm: " + name_ + ": " + why);
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::vector<unsigned char> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

ImageMatrix load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_pgm: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  PgmReader rd(std::move(bytes), path.string());

  const std::string magic = rd.token();
  if (magic != "P5" && magic != "P2") rd.fail("unsupported format '" + magic + "'");
  const long width = rd.number("width");
  const long height = rd.number("height");
  const long maxval = rd.number("maxval");
  if (width <= 0 || height <= 0) rd.fail("non-positive dimensions");
  if (maxval <= 0 || maxval > 65535) rd.fail("maxval out of range");

  ImageMatrix img(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P5") {
    rd.end_of_header();
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (rd.remaining() < static_cast<std::size_t>(width * height) * bytes_per)
      rd.fail("truncated raster");
    for (long r = 0; r < height; ++r)
      for (long c = 0; c < width; ++c) {
        unsigned v = rd.byte();
        if (bytes_per == 2) v = (v << 8) | rd.byte();
        if (v > static_cast<unsigned>(maxval)) rd.fail("sample exceeds maxval");
        img(r, c) = v * scale;
      }
  } else {
    for (long r = 0; r < height; ++r)
      for (long c = 0; c < width; ++c) {
        long v = 0;
        try {
          v = rd.number("sample");
        } catch (const IoError&) {
          rd.fail("truncated or malformed raster");
        }
        if (v > maxval) rd.fail("sample exceeds maxval");
        img(r, c) = static_cast<double>(v) * scale;
      }
  }
  return img;
}

void save_pgm(const ImageMatrix& img, const std::filesystem::path& path, int maxval) {
  if (maxval != 255 && maxval != 65535)
    throw InvalidArgument("save_pgm: maxval must be 255 or 65535");
  std::string out = "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) +
                    "\n" + std::to_string(maxval) + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(img.size()) * (maxval > 255 ? 2 : 1));
  for (Eigen::Index r = 0; r < img.rows(); ++r)
    for (Eigen::Index c = 0; c < img.cols(); ++c) {
      const double v = std::clamp(img(r, c), 0.0, 1.0);
      const auto q = static_cast<unsigned>(std::lround(v * maxval));
      if (maxval > 255) out.push_back(static_cast<char>((q >> 8) & 0xFF));
      out.push_back(static_cast<char>(q & 0xFF));
    }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("save_pgm: cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("save_pgm: write failed for " + path.string());
}

ImageMatrix resize_bilinear(const ImageMatrix& img, Shape target) {
  if (target.rows <= 0 || target.cols <= 0)
    throw InvalidArgument("resize_bilinear: target shape must be positive");
  if (img.size() == 0) throw InvalidArgument("resize_bilinear: empty source image");
  const Eigen::Index sr = img.rows();
  const Eigen::Index sc = img.cols();
  ImageMatrix out(target.rows, target.cols);
  const double fy = static_cast<double>(sr) / static_cast<double>(target.rows);
  const double fx = static_cast<double>(sc) / static_cast<double>(target.cols);
  for (Eigen::Index r = 0; r < target.rows; ++r) {
    const double y = std::clamp((static_cast<double>(r) + 0.5) * fy - 0.5, 0.0,
                                static_cast<double>(sr - 1));
    const auto y0 = static_cast<Eigen::Index>(std::floor(y));
    const Eigen::Index y1 = std::min(y0 + 1, sr - 1);
    const double ty = y - static_cast<double>(y0);
    for (Eigen::Index c = 0; c < target.cols; ++c) {
      const double x = std::clamp((static_cast<double>(c) + 0.5) * fx - 0.5, 0.0,
                                  static_cast<double>(sc - 1));
      const auto x0 = static_cast<Eigen::Index>(std::floor(x));
      const Eigen::Index x1 = std::min(x0 + 1, sc - 1);
      const double tx = x - static_cast<double>(x0);
      const double top = (1.0 - tx) * img(y0, x0) + tx * img(y0, x1);
      const double bottom = (1.0 - tx) * img(y1, x0) + tx * img(y1, x1);
      out(r, c) = (1.0 - ty) * top + ty * bottom;
    }
  }
  return out;
}

}  // namespace gcrep
