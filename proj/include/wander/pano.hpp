#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "wander/geometry.hpp"
#include "wander/spatial_index.hpp"

namespace wander {

/// Row-major, interleaved channels.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels),
        data_(static_cast<std::size_t>(width) * height * channels, fill) {
    if (width < 0 || height < 0 || channels < 1) throw std::invalid_argument("bad image shape");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& operator()(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  bool operator==(const Image& o) const { return same_shape(o) && data_ == o.data_; }

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using DepthImage = Image<double>;          // meters, +inf where nothing was hit
using LabelImage = Image<std::uint16_t>;   // 0 where nothing was hit
using RgbImage = Image<std::uint8_t>;      // 3 channels

inline constexpr double kNoHitDepth = std::numeric_limits<double>::infinity();

enum class Sampling { nearest, bilinear };

/// Labels and depth must not blend; 8-bit color is interpolated.
template <typename T>
constexpr Sampling default_sampling() {
  return std::is_same_v<T, std::uint8_t> ? Sampling::bilinear : Sampling::nearest;
}

// ---------------------------------------------------------------------------
// Cubemap

enum class Face { up = 0, left, front, right, rear, down };
inline constexpr std::array<Face, 6> kFaces{Face::up, Face::left, Face::front, Face::right, Face::rear, Face::down};
const char* face_name(Face f);

template <typename T>
struct CubemapFaceSet {
  std::array<Image<T>, 6> faces;

  Image<T>& operator[](Face f) { return faces[static_cast<std::size_t>(f)]; }
  const Image<T>& operator[](Face f) const { return faces[static_cast<std::size_t>(f)]; }
  int face_size() const { return faces[0].width(); }
};

/// Camera frame with roll fixed to zero.
struct CameraBasis {
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

CameraBasis camera_basis(const UnitVec3& direction);

/// Local (forward, right, up) direction through the center of face pixel
/// (px, py); integer arguments are pixel indices.
Vec3 face_pixel_direction(Face face, double px, double py, int face_size);

struct FaceCoord {
  Face face;
  double a;  // [-1, 1] along the face's horizontal axis
  double b;  // [-1, 1] along the face's downward axis
};

/// Unique face for a local direction; ties go front > right > rear > left > up > down.
FaceCoord direction_to_face(const Vec3& local);

// ---------------------------------------------------------------------------
// Equirectangular frame: row 0 at +90 latitude, column 0 at -180 longitude,
// longitude increasing to the right, longitude 0 straight ahead.

struct LatLon {
  double lat_deg;
  double lon_deg;
};

/// Pixel index coordinates: the center of pixel (col, row) is at integer
/// (col, row), its edges at +-0.5.
LatLon equirect_pixel_to_latlon(double col, double row, int width, int height);
Eigen::Vector2d latlon_to_equirect_pixel(const LatLon& ll, int width, int height);
Vec3 latlon_to_local(const LatLon& ll);
LatLon local_to_latlon(const Vec3& local);

template <typename T>
CubemapFaceSet<T> equirect_to_cube(const Image<T>& frame, int face_size,
                                   Sampling sampling = default_sampling<T>());

template <typename T>
Image<T> cube_to_equirect(const CubemapFaceSet<T>& faces, int out_height,
                          Sampling sampling = default_sampling<T>());

// ---------------------------------------------------------------------------
// Rendering

struct RenderedFaces {
  CubemapFaceSet<double> depth;
  CubemapFaceSet<std::uint16_t> semantic;
};

/// One ray per face pixel; depth is the Euclidean hit distance.
RenderedFaces render_faces(const SpatialIndex& index, const Pose& pose, int face_size);

// ---------------------------------------------------------------------------
// Frame-list conventions

/// 0, stride, 2*stride, ... plus the last index.
std::vector<int> subsample_indices(int count, int stride = 5);

/// round(i * (input - 1) / (target - 1)) for i in [0, target). Throws LengthMismatch.
std::vector<int> align_indices(int input, int target);

template <typename T>
std::vector<T> pick(const std::vector<T>& items, const std::vector<int>& indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(items.at(static_cast<std::size_t>(i)));
  return out;
}

template <typename T>
std::vector<T> subsample_frames(const std::vector<T>& frames, int stride = 5) {
  return pick(frames, subsample_indices(static_cast<int>(frames.size()), stride));
}

template <typename T>
std::vector<T> align_frame_count(const std::vector<T>& frames, int target) {
  return pick(frames, align_indices(static_cast<int>(frames.size()), target));
}

/// Depth in 16-bit millimeters; 65535 marks no hit.
inline constexpr std::uint16_t kDepthSentinelMm = 65535;
Image<std::uint16_t> depth_to_mm(const DepthImage& depth);
DepthImage mm_to_depth(const Image<std::uint16_t>& mm);

}  // namespace wander
