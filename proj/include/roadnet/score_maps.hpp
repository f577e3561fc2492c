#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace roadnet {

/// Row-major H x W grid of 32-bit scores.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  Grid() = default;
  Grid(int w, int h, float fill = 0.0f);

  float at(int x, int y) const { return values[idx(x, y)]; }
  float& at(int x, int y) { return values[idx(x, y)]; }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
};

/// Co-registered keypoint, sampling-point and road-surface probability maps.
struct ScoreMaps {
  Grid keypoint;
  Grid sampling;
  Grid road;

  ScoreMaps() = default;
  ScoreMaps(int width, int height);

  int width() const noexcept { return keypoint.width; }
  int height() const noexcept { return keypoint.height; }

  /// Throws ValidationError on mismatched dimensions or values outside [0, 1].
  void validate() const;

  friend bool operator==(const ScoreMaps&, const ScoreMaps&) = default;
};

/// Binary tensor file: "RGF1", u32 height, u32 width, u32 channels (= 3),
/// then little-endian float32 planes in channel order keypoint, sampling, road.
void write_score_maps(const std::filesystem::path& path, const ScoreMaps& maps);
ScoreMaps read_score_maps(const std::filesystem::path& path);

/// Three single-channel 8-bit images (binary PGM, or PNG when built with
/// libpng); pixel values are divided by 255.
ScoreMaps read_score_map_images(const std::filesystem::path& keypoint,
                                const std::filesystem::path& sampling,
                                const std::filesystem::path& road);
Grid read_gray_image(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Grid& grid);

}  // namespace roadnet
