#include "roadnet/score_maps.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#ifdef ROADNET_HAVE_PNG
#include <png.h>
#endif

#include "roadnet/error.hpp"

namespace roadnet {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'G', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> b{static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                       static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void check_grid(const Grid& g, const char* name, int w, int h) {
  if (g.width != w || g.height != h || g.values.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw ValidationError(std::string(name) + " map is " + std::to_string(g.width) + "x" + std::to_string(g.height) +
                          ", expected " + std::to_string(w) + "x" + std::to_string(h));
  }
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const float v = g.values[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ValidationError(std::string(name) + " map value " + std::to_string(v) + " at pixel (" +
                            std::to_string(i % static_cast<std::size_t>(w)) + ", " +
                            std::to_string(i / static_cast<std::size_t>(w)) + ") is outside [0, 1]");
    }
  }
}

Grid read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(c);
    }
    return t;
  };
  if (token() != "P5") throw ParseError(path.string() + ": only binary PGM (P5) is supported", 1, 0);
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw ParseError(path.string() + ": bad PGM header", 1);
  }
  if (w <= 0 || h <= 0 || maxval != 255) throw ParseError(path.string() + ": PGM must be 8-bit with positive size", 1);
  Grid g(w, h);
  std::vector<unsigned char> raw(g.values.size());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw ParseError(path.string() + ": truncated PGM data");
  for (std::size_t i = 0; i < raw.size(); ++i) g.values[i] = static_cast<float>(raw[i]) / 255.0f;
  return g;
}

#ifdef ROADNET_HAVE_PNG
Grid read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw ParseError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ParseError(path.string() + ": " + image.message);
  }
  Grid g(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = static_cast<float>(raw[i]) / 255.0f;
  return g;
}
#endif

}  // namespace

Grid::Grid(int w, int h, float fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ValidationError("grid dimensions must be positive");
  values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

ScoreMaps::ScoreMaps(int width, int height) : keypoint(width, height), sampling(width, height), road(width, height) {}

void ScoreMaps::validate() const {
  const int w = keypoint.width, h = keypoint.height;
  if (w <= 0 || h <= 0) throw ValidationError("score maps are empty");
  check_grid(keypoint, "keypoint", w, h);
  check_grid(sampling, "sampling", w, h);
  check_grid(road, "road", w, h);
}

void write_score_maps(const std::filesystem::path& path, const ScoreMaps& maps) {
  maps.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(maps.height()));
  put_u32(out, static_cast<std::uint32_t>(maps.width()));
  put_u32(out, 3);
  for (const Grid* g : {&maps.keypoint, &maps.sampling, &maps.road}) {
    for (float v : g->values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw Error("failed writing " + path.string());
}

ScoreMaps read_score_maps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::array<unsigned char, 16> header{};
  in.read(reinterpret_cast<char*>(header.data()), 16);
  if (in.gcount() != 16) throw ParseError(path.string() + ": truncated header", {}, static_cast<std::size_t>(in.gcount()));
  if (std::memcmp(header.data(), kMagic.data(), 4) != 0) throw ParseError(path.string() + ": bad magic, expected RGF1", {}, 0);
  const std::uint32_t h = get_u32(header.data() + 4);
  const std::uint32_t w = get_u32(header.data() + 8);
  const std::uint32_t c = get_u32(header.data() + 12);
  if (c != 3) throw ParseError(path.string() + ": expected 3 channels, got " + std::to_string(c), {}, 12);
  if (h == 0 || w == 0 || h > (1u << 16) || w > (1u << 16))
    throw ParseError(path.string() + ": implausible dimensions " + std::to_string(w) + "x" + std::to_string(h), {}, 4);

  ScoreMaps maps(static_cast<int>(w), static_cast<int>(h));
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  std::vector<unsigned char> buf(plane * 4);
  std::size_t offset = 16;
  for (Grid* g : {&maps.keypoint, &maps.sampling, &maps.road}) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw ParseError(path.string() + ": truncated channel data", {}, offset + static_cast<std::size_t>(in.gcount()));
    for (std::size_t i = 0; i < plane; ++i) g->values[i] = std::bit_cast<float>(get_u32(buf.data() + 4 * i));
    offset += buf.size();
  }
  maps.validate();
  return maps;
}

Grid read_gray_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") {
#ifdef ROADNET_HAVE_PNG
    return read_png(path);
#else
    throw Error("PNG support not compiled in; convert " + path.string() + " to PGM");
#endif
  }
  return read_pgm(path);
}

ScoreMaps read_score_map_images(const std::filesystem::path& keypoint, const std::filesystem::path& sampling,
                                const std::filesystem::path& road) {
  ScoreMaps maps;
  maps.keypoint = read_gray_image(keypoint);
  maps.sampling = read_gray_image(sampling);
  maps.road = read_gray_image(road);
  maps.validate();
  return maps;
}

void write_pgm(const std::filesystem::path& path, const Grid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
  for (float v : grid.values) {
    const long q = std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f);
    out.put(static_cast<char>(static_cast<unsigned char>(q)));
  }
}

}  // namespace roadnet
