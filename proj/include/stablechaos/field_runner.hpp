#pragma once

// Grid evaluation of solution fields with deterministic CSV output and an
// optional heatmap rendering.  Output bytes depend only on the configuration,
// never on the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablechaos/chaos_expansion.hpp"
#include "stablechaos/detail/numeric.hpp"
#include "stablechaos/detail/parallel.hpp"
#include "stablechaos/detail/png.hpp"
#include "stablechaos/noise_field.hpp"
#include "stablechaos/run_config.hpp"

namespace stablechaos {

struct FieldResult {
  std::vector<double> ts;      // time grid, ascending from 0
  std::vector<double> xs;      // space grid along the first coordinate
  std::vector<double> values;  // row-major, ts outer
  double value(int ti, int xi) const {
    return values[static_cast<std::size_t>(ti) * xs.size() + static_cast<std::size_t>(xi)];
  }
};

// Samples one cloud and evaluates the configured solution on the
// [0, horizon] x [x_min, x_max] grid.  For dim >= 2 the grid runs along the
// first coordinate with the remaining coordinates pinned to zero.
inline FieldResult run_field(const RunConfig& cfg, int threads = 0) {
  const Kernel k = cfg.kernel();
  const WeightFn w = cfg.weight();
  const AtomCloud cloud(cfg.stable_params(), w, cfg.seed, cfg.atoms);

  FieldResult out;
  out.ts.resize(static_cast<std::size_t>(cfg.t_points));
  out.xs.resize(static_cast<std::size_t>(cfg.x_points));
  for (int i = 0; i < cfg.t_points; ++i)
    out.ts[static_cast<std::size_t>(i)] =
        cfg.horizon * static_cast<double>(i) / static_cast<double>(cfg.t_points - 1);
  for (int j = 0; j < cfg.x_points; ++j)
    out.xs[static_cast<std::size_t>(j)] =
        cfg.x_min + (cfg.x_max - cfg.x_min) * static_cast<double>(j) /
                        static_cast<double>(cfg.x_points - 1);

  const std::size_t n_nodes = out.ts.size() * out.xs.size();
  out.values.assign(n_nodes, 0.0);

  const bool multiplicative = cfg.mode == SolutionMode::multiplicative;
  ChainWeights chain;
  if (multiplicative) chain = ChainWeights(cloud, k, cfg.max_order);

  detail::parallel_for(n_nodes, threads, [&](std::size_t node) {
    const std::size_t ti = node / out.xs.size();
    const std::size_t xi = node % out.xs.size();
    std::vector<double> x(static_cast<std::size_t>(cfg.dim), 0.0);
    x[0] = out.xs[xi];
    out.values[node] = multiplicative ? chain.eval(out.ts[ti], x)
                                      : additive_solution(cloud, k, out.ts[ti], x);
  });
  return out;
}

// CSV schema: header "t,x,u", rows in row-major order with t outermost.
inline void write_field_csv(std::ostream& os, const FieldResult& field) {
  os << "t,x,u\n";
  std::string line;
  for (std::size_t ti = 0; ti < field.ts.size(); ++ti) {
    for (std::size_t xi = 0; xi < field.xs.size(); ++xi) {
      line.clear();
      detail::append_double(line, field.ts[ti]);
      line += ',';
      detail::append_double(line, field.xs[xi]);
      line += ',';
      detail::append_double(line, field.values[ti * field.xs.size() + xi]);
      line += '\n';
      os << line;
    }
  }
}

inline std::string field_csv_string(const FieldResult& field) {
  std::ostringstream os;
  write_field_csv(os, field);
  return os.str();
}

// Diverging blue-white-red heatmap centered at u = 1, scaled by a robust
// (99th percentile) deviation so single spikes do not wash the image out.
// Row 0 is the latest time; x runs left to right.
inline std::vector<unsigned char> field_heatmap_rgb(const FieldResult& field) {
  std::vector<double> dev(field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i) dev[i] = std::abs(field.values[i] - 1.0);
  std::vector<double> sorted(dev);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t q = sorted.empty() ? 0 : (sorted.size() * 99) / 100;
  double scale = sorted.empty() ? 0.0 : sorted[std::min(q, sorted.size() - 1)];
  if (!(scale > 0.0)) scale = 1.0;

  const std::size_t width = field.xs.size();
  const std::size_t height = field.ts.size();
  std::vector<unsigned char> rgb(width * height * 3);
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t ti = height - 1 - row;  // time increases upward
    for (std::size_t xi = 0; xi < width; ++xi) {
      const double u = field.values[ti * width + xi];
      double s = (u - 1.0) / scale;
      s = std::clamp(s, -1.0, 1.0);
      unsigned char r, g, b;
      if (s < 0.0) {  // toward blue
        const double f = -s;
        r = static_cast<unsigned char>(std::lround(255.0 * (1.0 - f)));
        g = static_cast<unsigned char>(std::lround(255.0 * (1.0 - 0.75 * f)));
        b = 255;
      } else {  // toward red
        const double f = s;
        r = 255;
        g = static_cast<unsigned char>(std::lround(255.0 * (1.0 - 0.75 * f)));
        b = static_cast<unsigned char>(std::lround(255.0 * (1.0 - f)));
      }
      const std::size_t at = (row * width + xi) * 3;
      rgb[at] = r;
      rgb[at + 1] = g;
      rgb[at + 2] = b;
    }
  }
  return rgb;
}

inline std::vector<unsigned char> field_png_bytes(const FieldResult& field) {
  return detail::encode_png_rgb8(static_cast<std::uint32_t>(field.xs.size()),
                                 static_cast<std::uint32_t>(field.ts.size()),
                                 field_heatmap_rgb(field));
}

inline void write_binary_file(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace stablechaos
