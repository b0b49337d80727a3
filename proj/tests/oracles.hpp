#pragma once

// Straightforward reference implementations used to check the library.
// They follow the textbook formulas directly and share no code with src/.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  if (dx == 0 || dy == 0) return std::nullopt;
  return num / (std::sqrt(dx) * std::sqrt(dy));
}

// Rank of x[i] = (#less) + (#equal + 1) / 2, counted pairwise.
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) ++less;
      if (x[j] == x[i]) ++equal;
    }
    r[i] = less + (equal + 1) / 2.0;
  }
  return r;
}

inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

// Tau-b over all pairs.
inline std::optional<double> kendall(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) {
        ++tie_x;
      } else if (b == 0) {
        ++tie_y;
      } else if ((a > 0) == (b > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom = std::sqrt((concordant + discordant + tie_x) * (concordant + discordant + tie_y));
  if (denom == 0) return std::nullopt;
  return (concordant - discordant) / denom;
}

inline double mae(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

// Tier and bin membership spelled out as ranges.
inline int coarse(int s) {
  if (s >= 9) return 3;
  if (s >= 7) return 2;
  if (s >= 4) return 1;
  return 0;
}

inline int fine(int s) {
  const std::vector<std::vector<int>> bins = {{0}, {1, 2}, {3, 4}, {5}, {6}, {7, 8}, {9, 10}};
  for (std::size_t b = 0; b < bins.size(); ++b) {
    for (int v : bins[b]) {
      if (v == s) return static_cast<int>(b);
    }
  }
  return -1;
}

inline double composite(int format, double analysis, double strategy, double resp, double div,
                        double wf = 0.1, double wt = 0.3, double wr = 0.3, double wd = 0.3) {
  const double think = 0.5 * (analysis / 10.0) + 0.5 * (strategy / 10.0);
  return wf * format + wt * think + wr * (resp / 10.0) + wd * (div / 10.0);
}

inline std::vector<double> advantages(const std::vector<double>& r) {
  const double m = mean(r);
  double var = 0;
  for (double x : r) var += (x - m) * (x - m);
  const double sd = std::sqrt(var / static_cast<double>(r.size()));
  std::vector<double> out;
  for (double x : r) out.push_back(sd == 0 ? 0.0 : (x - m) / (sd + 1e-8));
  return out;
}

inline double clipped(double ratio, double a, double eps) {
  double c = ratio;
  if (c < 1 - eps) c = 1 - eps;
  if (c > 1 + eps) c = 1 + eps;
  const double u = ratio * a, v = c * a;
  return u < v ? u : v;
}

inline double k3(double delta) { return std::exp(delta) - delta - 1; }

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * double(b[i]);
    na += double(a[i]) * double(a[i]);
    nb += double(b[i]) * double(b[i]);
  }
  if (na == 0 || nb == 0) return 0;
  return dot / std::sqrt(na * nb);
}

}  // namespace oracle
