#include "wander/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "wander/errors.hpp"

namespace wander {

double correctness(std::span<const int> scores) {
  if (scores.empty()) throw EmptySet("no judge scores");
  long long sum = 0;
  for (int s : scores) {
    if (s < 1 || s > 5) throw ValidationError("judge score " + std::to_string(s) + " outside 1..5");
    sum += s - 1;
  }
  // 100 / 4 = 25 per point, exact in binary.
  return 25.0 * static_cast<double>(sum) / static_cast<double>(scores.size());
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const int r = size / 2;
  for (int i = 0; i < size; ++i) k[static_cast<std::size_t>(i)] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
  const double total = std::accumulate(k.begin(), k.end(), 0.0);
  for (double& v : k) v /= total;
  return k;
}

// Horizontal pass wraps, vertical pass clamps.
std::vector<double> blur(const std::vector<double>& src, int w, int h, const std::vector<double>& k) {
  const int r = static_cast<int>(k.size()) / 2;
  std::vector<double> tmp(src.size()), out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int xx = ((x + i) % w + w) % w;
        s += k[static_cast<std::size_t>(i + r)] * src[static_cast<std::size_t>(y * w + xx)];
      }
      tmp[static_cast<std::size_t>(y * w + x)] = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        s += k[static_cast<std::size_t>(i + r)] * tmp[static_cast<std::size_t>(yy * w + x)];
      }
      out[static_cast<std::size_t>(y * w + x)] = s;
    }
  }
  return out;
}

}  // namespace

template <typename T>
Image<double> ssim_map(const Image<T>& a, const Image<T>& b, double dynamic_range, const SsimParams& params) {
  if (!a.same_shape(b)) throw DimensionMismatch("SSIM inputs differ in shape");
  if (a.empty()) throw DimensionMismatch("SSIM of empty images");
  if (params.window < 1 || params.window % 2 == 0) throw std::invalid_argument("SSIM window must be odd");
  const int w = a.width(), h = a.height(), nc = a.channels();
  const auto kernel = gaussian_kernel(params.window, params.sigma);
  const double c1 = (params.k1 * dynamic_range) * (params.k1 * dynamic_range);
  const double c2 = (params.k2 * dynamic_range) * (params.k2 * dynamic_range);
  const std::size_t n = static_cast<std::size_t>(w) * h;

  Image<double> out(w, h, 1, 0.0);
  for (int c = 0; c < nc; ++c) {
    std::vector<double> va(n), vb(n), aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      va[i] = static_cast<double>(a.data()[i * nc + c]);
      vb[i] = static_cast<double>(b.data()[i * nc + c]);
      aa[i] = va[i] * va[i];
      bb[i] = vb[i] * vb[i];
      ab[i] = va[i] * vb[i];
    }
    const auto mu_a = blur(va, w, h, kernel);
    const auto mu_b = blur(vb, w, h, kernel);
    const auto e_aa = blur(aa, w, h, kernel);
    const auto e_bb = blur(bb, w, h, kernel);
    const auto e_ab = blur(ab, w, h, kernel);
    for (std::size_t i = 0; i < n; ++i) {
      const double mab = mu_a[i] * mu_b[i];
      const double maa = mu_a[i] * mu_a[i];
      const double mbb = mu_b[i] * mu_b[i];
      const double var_a = e_aa[i] - maa;
      const double var_b = e_bb[i] - mbb;
      const double cov = e_ab[i] - mab;
      const double num = (2.0 * mab + c1) * (2.0 * cov + c2);
      const double den = (maa + mbb + c1) * (var_a + var_b + c2);
      out.data()[i] += num / den;
    }
  }
  if (nc > 1) {
    for (double& v : out.data()) v /= nc;
  }
  return out;
}

template <typename T>
double spherical_ssim(const Image<T>& a, const Image<T>& b, double dynamic_range, const SsimParams& params) {
  if (a.width() != 2 * a.height()) throw DimensionMismatch("spherical SSIM needs 2H x H frames");
  const Image<double> map = ssim_map(a, b, dynamic_range, params);
  const int w = map.width(), h = map.height();
  std::vector<double> weighted(static_cast<std::size_t>(h));
  std::vector<double> weights(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    const double lat = deg2rad(90.0 - (y + 0.5) * 180.0 / h);
    const double wy = std::cos(lat);
    const std::span<const double> row(map.data().data() + static_cast<std::size_t>(y) * w, static_cast<std::size_t>(w));
    weighted[static_cast<std::size_t>(y)] = wy * pairwise_sum(row);
    weights[static_cast<std::size_t>(y)] = wy * w;
  }
  return pairwise_sum(weighted) / pairwise_sum(weights);
}

#define WANDER_INSTANTIATE(T)                                                                       \
  template Image<double> ssim_map<T>(const Image<T>&, const Image<T>&, double, const SsimParams&); \
  template double spherical_ssim<T>(const Image<T>&, const Image<T>&, double, const SsimParams&);
WANDER_INSTANTIATE(double)
WANDER_INSTANTIATE(float)
WANDER_INSTANTIATE(std::uint8_t)
WANDER_INSTANTIATE(std::uint16_t)
#undef WANDER_INSTANTIATE

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("spearman inputs differ in length");
  if (x.size() < 2) throw LengthMismatch("spearman needs at least 2 points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(rx) / n;
  const double my = pairwise_sum(ry) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("spearman of a constant sequence");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw EmptySet("no values");
  MeanStd out;
  out.count = values.size();
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  std::vector<double> sq;
  sq.reserve(values.size());
  for (double v : values) sq.push_back((v - out.mean) * (v - out.mean));
  out.std = std::sqrt(pairwise_sum(sq) / n);
  return out;
}

MeanStd trajectory_stats(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw EmptySet("no trajectories");
  std::vector<double> lengths;
  lengths.reserve(trajectories.size());
  for (const auto& t : trajectories) lengths.push_back(t.total_length);
  return mean_std(lengths);
}

namespace {

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"item", "FVD", "End-FID", "S-SSIM", "LPIPS", "QA"};
  return cols;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_metric_report(const std::vector<std::string>& comments, const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << "\n";
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : rows) {
    out << r.item << "," << cell(r.fvd) << "," << cell(r.end_fid) << "," << cell(r.s_ssim) << "," << cell(r.lpips)
        << "," << cell(r.qa) << "\n";
  }
  return out.str();
}

std::vector<MetricRow> parse_metric_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<MetricRow> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (header.empty()) {
      header = fields;
      if (header.empty() || header[0] != "item") throw ParseError("metric CSV must start with an item column");
      for (const auto& h : header) {
        if (std::find(report_columns().begin(), report_columns().end(), h) == report_columns().end()) {
          throw ParseError("unknown metric column '" + h + "'");
        }
      }
      continue;
    }
    if (fields.size() != header.size()) throw ParseError("metric CSV line " + std::to_string(line_no) + ": wrong field count");
    MetricRow row;
    row.item = fields[0];
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i].empty()) continue;
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') {
        throw ParseError("metric CSV line " + std::to_string(line_no) + ": bad number '" + fields[i] + "'");
      }
      const std::string& h = header[i];
      if (h == "FVD") row.fvd = v;
      else if (h == "End-FID") row.end_fid = v;
      else if (h == "S-SSIM") row.s_ssim = v;
      else if (h == "LPIPS") row.lpips = v;
      else if (h == "QA") row.qa = v;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wander
