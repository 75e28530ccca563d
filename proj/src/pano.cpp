#include "wander/pano.hpp"

#include <algorithm>
#include <cmath>

#include "wander/errors.hpp"

namespace wander {

namespace {

struct FaceAxes {
  Vec3 center;
  Vec3 h;  // pixel x
  Vec3 v;  // pixel y (image down)
};

// Local frame: x forward, y right, z up.
const std::array<FaceAxes, 6>& face_axes() {
  static const std::array<FaceAxes, 6> axes{{
      {Vec3(0, 0, 1), Vec3(0, 1, 0), Vec3(1, 0, 0)},     // up
      {Vec3(0, -1, 0), Vec3(1, 0, 0), Vec3(0, 0, -1)},   // left
      {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, -1)},    // front
      {Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, 0, -1)},   // right
      {Vec3(-1, 0, 0), Vec3(0, -1, 0), Vec3(0, 0, -1)},  // rear
      {Vec3(0, 0, -1), Vec3(0, 1, 0), Vec3(-1, 0, 0)},   // down
  }};
  return axes;
}

const FaceAxes& axes_of(Face f) { return face_axes()[static_cast<std::size_t>(f)]; }

template <typename T>
T from_real(double v) {
  if constexpr (std::is_integral_v<T>) {
    const double lo = static_cast<double>(std::numeric_limits<T>::min());
    const double hi = static_cast<double>(std::numeric_limits<T>::max());
    return static_cast<T>(std::clamp(std::round(v), lo, hi));
  } else {
    return static_cast<T>(v);
  }
}

template <typename T>
void sample_face(const Image<T>& img, double a, double b, Sampling sampling, T* out) {
  const int n = img.width();
  if (sampling == Sampling::nearest) {
    const int x = std::clamp(static_cast<int>(std::floor((a + 1.0) * 0.5 * n)), 0, n - 1);
    const int y = std::clamp(static_cast<int>(std::floor((b + 1.0) * 0.5 * n)), 0, n - 1);
    for (int c = 0; c < img.channels(); ++c) out[c] = img(x, y, c);
    return;
  }
  const double fx = std::clamp((a + 1.0) * 0.5 * n - 0.5, 0.0, n - 1.0);
  const double fy = std::clamp((b + 1.0) * 0.5 * n - 0.5, 0.0, n - 1.0);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const int x1 = std::min(x0 + 1, n - 1), y1 = std::min(y0 + 1, n - 1);
  const double tx = fx - x0, ty = fy - y0;
  for (int c = 0; c < img.channels(); ++c) {
    const double top = (1 - tx) * static_cast<double>(img(x0, y0, c)) + tx * static_cast<double>(img(x1, y0, c));
    const double bot = (1 - tx) * static_cast<double>(img(x0, y1, c)) + tx * static_cast<double>(img(x1, y1, c));
    out[c] = from_real<T>((1 - ty) * top + ty * bot);
  }
}

template <typename T>
void sample_equirect(const Image<T>& img, const LatLon& ll, Sampling sampling, T* out) {
  const int w = img.width(), h = img.height();
  const double u = (ll.lon_deg + 180.0) / 360.0 * w;
  const double v = (90.0 - ll.lat_deg) / 180.0 * h;
  auto wrap = [w](int x) { return ((x % w) + w) % w; };
  if (sampling == Sampling::nearest) {
    const int x = wrap(static_cast<int>(std::floor(u)));
    const int y = std::clamp(static_cast<int>(std::floor(v)), 0, h - 1);
    for (int c = 0; c < img.channels(); ++c) out[c] = img(x, y, c);
    return;
  }
  const double fx = u - 0.5;
  const double fy = std::clamp(v - 0.5, 0.0, h - 1.0);
  const int xf = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(fy);
  const int y1 = std::min(y0 + 1, h - 1);
  const int x0 = wrap(xf), x1 = wrap(xf + 1);
  const double tx = fx - xf, ty = fy - y0;
  for (int c = 0; c < img.channels(); ++c) {
    const double top = (1 - tx) * static_cast<double>(img(x0, y0, c)) + tx * static_cast<double>(img(x1, y0, c));
    const double bot = (1 - tx) * static_cast<double>(img(x0, y1, c)) + tx * static_cast<double>(img(x1, y1, c));
    out[c] = from_real<T>((1 - ty) * top + ty * bot);
  }
}

}  // namespace

const char* face_name(Face f) {
  switch (f) {
    case Face::up: return "up";
    case Face::left: return "left";
    case Face::front: return "front";
    case Face::right: return "right";
    case Face::rear: return "rear";
    case Face::down: return "down";
  }
  return "?";
}

CameraBasis camera_basis(const UnitVec3& direction) {
  const YawPitch yp = dir_to_pitch_yaw(direction);
  CameraBasis b;
  b.forward = pitch_yaw_to_dir(yp.yaw_deg, yp.pitch_deg).vec();
  b.up = pitch_yaw_to_dir(yp.yaw_deg, yp.pitch_deg + 90.0).vec();
  b.right = b.forward.cross(b.up);
  return b;
}

Vec3 face_pixel_direction(Face face, double px, double py, int face_size) {
  const FaceAxes& ax = axes_of(face);
  const double a = 2.0 * (px + 0.5) / face_size - 1.0;
  const double b = 2.0 * (py + 0.5) / face_size - 1.0;
  return ax.center + a * ax.h + b * ax.v;
}

FaceCoord direction_to_face(const Vec3& d) {
  // Candidates in priority order; a later face wins only if strictly larger.
  const std::array<std::pair<Face, double>, 6> cand{{{Face::front, d.x()},
                                                     {Face::right, d.y()},
                                                     {Face::rear, -d.x()},
                                                     {Face::left, -d.y()},
                                                     {Face::up, d.z()},
                                                     {Face::down, -d.z()}}};
  std::size_t best = 0;
  for (std::size_t k = 1; k < cand.size(); ++k) {
    if (cand[k].second > cand[best].second) best = k;
  }
  const Face f = cand[best].first;
  const double t = cand[best].second;
  const FaceAxes& ax = axes_of(f);
  return {f, d.dot(ax.h) / t, d.dot(ax.v) / t};
}

LatLon equirect_pixel_to_latlon(double col, double row, int width, int height) {
  return {90.0 - (row + 0.5) * 180.0 / height, -180.0 + (col + 0.5) * 360.0 / width};
}

Eigen::Vector2d latlon_to_equirect_pixel(const LatLon& ll, int width, int height) {
  return {(ll.lon_deg + 180.0) / 360.0 * width - 0.5, (90.0 - ll.lat_deg) / 180.0 * height - 0.5};
}

Vec3 latlon_to_local(const LatLon& ll) {
  const double lat = deg2rad(ll.lat_deg), lon = deg2rad(ll.lon_deg);
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

LatLon local_to_latlon(const Vec3& d) {
  return {rad2deg(std::atan2(d.z(), std::hypot(d.x(), d.y()))), rad2deg(std::atan2(d.y(), d.x()))};
}

template <typename T>
CubemapFaceSet<T> equirect_to_cube(const Image<T>& frame, int face_size, Sampling sampling) {
  if (frame.width() != 2 * frame.height() || frame.height() < 1) {
    throw DimensionMismatch("equirect frame must be 2H x H");
  }
  if (face_size < 1) throw std::invalid_argument("face size must be positive");
  CubemapFaceSet<T> out;
  for (Face f : kFaces) {
    Image<T> img(face_size, face_size, frame.channels());
    for (int y = 0; y < face_size; ++y) {
      for (int x = 0; x < face_size; ++x) {
        const LatLon ll = local_to_latlon(face_pixel_direction(f, x, y, face_size));
        sample_equirect(frame, ll, sampling, &img(x, y));
      }
    }
    out[f] = std::move(img);
  }
  return out;
}

template <typename T>
Image<T> cube_to_equirect(const CubemapFaceSet<T>& faces, int out_height, Sampling sampling) {
  const int n = faces.face_size();
  for (const auto& img : faces.faces) {
    if (img.width() != n || img.height() != n || img.channels() != faces.faces[0].channels() || n < 1) {
      throw DimensionMismatch("cubemap faces must be equal squares");
    }
  }
  if (out_height < 1) throw std::invalid_argument("output height must be positive");
  const int w = 2 * out_height;
  Image<T> out(w, out_height, faces.faces[0].channels());
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < w; ++x) {
      const FaceCoord fc = direction_to_face(latlon_to_local(equirect_pixel_to_latlon(x, y, w, out_height)));
      sample_face(faces[fc.face], fc.a, fc.b, sampling, &out(x, y));
    }
  }
  return out;
}

#define WANDER_INSTANTIATE(T)                                                                  \
  template CubemapFaceSet<T> equirect_to_cube<T>(const Image<T>&, int, Sampling);             \
  template Image<T> cube_to_equirect<T>(const CubemapFaceSet<T>&, int, Sampling);
WANDER_INSTANTIATE(double)
WANDER_INSTANTIATE(float)
WANDER_INSTANTIATE(std::uint8_t)
WANDER_INSTANTIATE(std::uint16_t)
#undef WANDER_INSTANTIATE

RenderedFaces render_faces(const SpatialIndex& index, const Pose& pose, int face_size) {
  if (face_size < 1) throw std::invalid_argument("face size must be positive");
  const CameraBasis cam = camera_basis(pose.direction);
  RenderedFaces out;
  for (Face f : kFaces) {
    DepthImage depth(face_size, face_size, 1, kNoHitDepth);
    LabelImage label(face_size, face_size, 1, 0);
    for (int y = 0; y < face_size; ++y) {
      for (int x = 0; x < face_size; ++x) {
        const Vec3 l = face_pixel_direction(f, x, y, face_size);
        const Vec3 dir = (l.x() * cam.forward + l.y() * cam.right + l.z() * cam.up).normalized();
        if (const auto hit = index.raycast(pose.position, dir)) {
          depth(x, y) = hit->t;
          label(x, y) = static_cast<std::uint16_t>(hit->label);
        }
      }
    }
    out.depth[f] = std::move(depth);
    out.semantic[f] = std::move(label);
  }
  return out;
}

std::vector<int> subsample_indices(int count, int stride) {
  if (count < 1) throw EmptySet("no frames to subsample");
  if (stride < 1) throw std::invalid_argument("stride must be positive");
  std::vector<int> out;
  for (int i = 0; i < count; i += stride) out.push_back(i);
  if (out.back() != count - 1) out.push_back(count - 1);
  return out;
}

std::vector<int> align_indices(int input, int target) {
  if (input < 1 || target < 1 || target > input) {
    throw LengthMismatch("cannot align " + std::to_string(input) + " frames to " + std::to_string(target));
  }
  std::vector<int> out;
  if (target == input) {
    for (int i = 0; i < target; ++i) out.push_back(i);
    return out;
  }
  if (target == 1) throw LengthMismatch("a single frame cannot keep both endpoints");
  // Round half up in integers: floor((2 i (in-1) + (t-1)) / (2 (t-1))).
  const long long span = input - 1, steps = target - 1;
  for (long long i = 0; i < target; ++i) out.push_back(static_cast<int>((2 * i * span + steps) / (2 * steps)));
  return out;
}

Image<std::uint16_t> depth_to_mm(const DepthImage& depth) {
  Image<std::uint16_t> out(depth.width(), depth.height(), depth.channels());
  for (std::size_t i = 0; i < depth.data().size(); ++i) {
    const double d = depth.data()[i];
    if (!std::isfinite(d)) {
      out.data()[i] = kDepthSentinelMm;
    } else {
      out.data()[i] = static_cast<std::uint16_t>(std::clamp(std::llround(d * 1000.0), 0LL,
                                                            static_cast<long long>(kDepthSentinelMm) - 1));
    }
  }
  return out;
}

DepthImage mm_to_depth(const Image<std::uint16_t>& mm) {
  DepthImage out(mm.width(), mm.height(), mm.channels());
  for (std::size_t i = 0; i < mm.data().size(); ++i) {
    const std::uint16_t v = mm.data()[i];
    out.data()[i] = v == kDepthSentinelMm ? kNoHitDepth : v / 1000.0;
  }
  return out;
}

}  // namespace wander
