#include "rebuttal/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "rebuttal/errors.hpp"

namespace rebuttal {

std::string_view to_string(CoarseTier tier) {
  switch (tier) {
    case CoarseTier::kUnconvincing: return "Unconvincing";
    case CoarseTier::kAcceptable: return "Acceptable";
    case CoarseTier::kGood: return "Good";
    case CoarseTier::kExcellent: return "Excellent";
  }
  return "Unknown";
}

namespace {
void check_score(int score) {
  if (score < 0 || score > 10) {
    throw Error(ErrorKind::kOutOfRange, "score " + std::to_string(score) + " outside 0..10");
  }
}
}  // namespace

CoarseTier coarse_tier(int score) {
  check_score(score);
  if (score <= 3) return CoarseTier::kUnconvincing;
  if (score <= 6) return CoarseTier::kAcceptable;
  if (score <= 8) return CoarseTier::kGood;
  return CoarseTier::kExcellent;
}

int fine_bin(int score) {
  check_score(score);
  static constexpr int kBins[11] = {0, 1, 1, 2, 2, 3, 4, 5, 5, 6, 6};
  return kBins[score];
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = x.size();
  if (n != y.size() || n == 0) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

namespace {

// Pairs tied within runs of equal keys: sum of t(t-1)/2.
template <class Eq>
long long tied_pairs(std::size_t n, Eq&& same_as_prev) {
  long long total = 0;
  long long run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (same_as_prev(i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

// Merge sort counting inversions (strictly greater before smaller).
long long count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                      std::size_t hi) {
  if (hi - lo < 2) return 0;
  const auto mid = lo + (hi - lo) / 2;
  long long swaps = count_swaps(v, buf, lo, mid) + count_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<long long>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

}  // namespace

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const auto n = x.size();
  if (n != y.size() || n < 2) return std::nullopt;
  std::vector<std::pair<double, double>> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = {x[i], y[i]};
  std::sort(p.begin(), p.end());

  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  const long long tx = tied_pairs(n, [&](std::size_t i) { return p[i].first == p[i - 1].first; });
  const long long txy = tied_pairs(n, [&](std::size_t i) { return p[i] == p[i - 1]; });

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = p[i].second;
  const long long swaps = count_swaps(ys, buf, 0, n);
  const long long ty = tied_pairs(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });

  const double denom = std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
  if (denom == 0.0) return std::nullopt;
  const double numer = static_cast<double>(n0 - tx - ty + txy - 2 * swaps);
  return std::clamp(numer / denom, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

DimensionAgreement agreement_metrics(std::span<const int> human, std::span<const int> model,
                                     std::string dimension) {
  if (human.size() != model.size() || human.empty()) {
    throw Error(ErrorKind::kLengthMismatch, "agreement needs two equal, non-empty score lists (" +
                                                std::to_string(human.size()) + " vs " +
                                                std::to_string(model.size()) + ")");
  }
  DimensionAgreement d;
  d.dimension = std::move(dimension);
  d.n = human.size();
  std::vector<double> h(human.begin(), human.end());
  std::vector<double> m(model.begin(), model.end());
  std::size_t coarse = 0, fine = 0;
  double abs_sum = 0;
  for (std::size_t i = 0; i < d.n; ++i) {
    abs_sum += std::abs(h[i] - m[i]);
    coarse += coarse_tier(human[i]) == coarse_tier(model[i]);
    fine += fine_bin(human[i]) == fine_bin(model[i]);
  }
  d.mae = abs_sum / d.n;
  d.coarse_acc = static_cast<double>(coarse) / d.n;
  d.fine_acc = static_cast<double>(fine) / d.n;
  d.pearson = pearson(h, m);
  d.spearman = spearman(h, m);
  d.kendall = kendall_tau_b(h, m);
  return d;
}

std::optional<double> AgreementReport::average() const {
  double sum = 0;
  int count = 0;
  for (const auto& d : dimensions) {
    for (const auto& v : {d.pearson, d.spearman, std::optional<double>(d.fine_acc)}) {
      if (v) {
        sum += *v;
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

namespace {
json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string cell(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}
}  // namespace

json to_json(const DimensionAgreement& d) {
  return json{{"dimension", d.dimension},   {"n", d.n},
              {"mae", d.mae},               {"pearson", opt(d.pearson)},
              {"spearman", opt(d.spearman)}, {"kendall", opt(d.kendall)},
              {"coarse_acc", d.coarse_acc}, {"fine_acc", d.fine_acc}};
}

json to_json(const AgreementReport& report) {
  json dims = json::array();
  for (const auto& d : report.dimensions) dims.push_back(to_json(d));
  json out{{"n", report.n}, {"dimensions", dims}, {"average", opt(report.average())}};
  out["notes"] = json::array(
      {"fine bins are {0},{1,2},{3,4},{5},{6},{7,8},{9,10}; the {0} bin is an assumption"});
  if (report.zero_bin_used) out["notes"].push_back("at least one score fell in the {0} bin");
  return out;
}

std::string render_table(const AgreementReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %7s %7s %7s %7s %7s %7s\n", "Dimension", "e", "r",
                "beta", "tau", "c", "f");
  out += line;
  for (const auto& d : report.dimensions) {
    std::snprintf(line, sizeof line, "%-18s %7s %7s %7s %7s %7s %7s\n", d.dimension.c_str(),
                  cell(d.mae).c_str(), cell(d.pearson).c_str(), cell(d.spearman).c_str(),
                  cell(d.kendall).c_str(), cell(d.coarse_acc).c_str(), cell(d.fine_acc).c_str());
    out += line;
  }
  out += "\n";
  std::string header = "            ";
  std::string values = "            ";
  for (const auto& d : report.dimensions) {
    const auto name = d.dimension.substr(0, 23);
    std::snprintf(line, sizeof line, "| %-23s ", name.c_str());
    header += line;
    std::snprintf(line, sizeof line, "| %7s %7s %7s ", cell(d.pearson).c_str(),
                  cell(d.spearman).c_str(), cell(d.fine_acc).c_str());
    values += line;
  }
  header += "| Avg\n";
  values += "| " + cell(report.average()) + "\n";
  out += header + values;
  std::snprintf(line, sizeof line, "n = %zu%s\n", report.n,
                report.zero_bin_used ? "; some scores fell in the {0} fine bin" : "");
  out += line;
  return out;
}

AgreementReport build_agreement_report(const std::vector<DimensionScores>& dims) {
  if (dims.empty()) throw Error(ErrorKind::kLengthMismatch, "no dimensions to compare");
  AgreementReport report;
  report.n = dims.front().human.size();
  for (const auto& d : dims) {
    if (d.human.size() != report.n) {
      throw Error(ErrorKind::kLengthMismatch,
                  "dimension " + d.dimension + " has " + std::to_string(d.human.size()) +
                      " items, expected " + std::to_string(report.n));
    }
    report.dimensions.push_back(agreement_metrics(d.human, d.model, d.dimension));
    for (const auto* v : {&d.human, &d.model}) {
      if (std::find(v->begin(), v->end(), 0) != v->end()) report.zero_bin_used = true;
    }
  }
  return report;
}

std::vector<DimensionScores> dimension_scores_from_json(const json& doc) {
  std::vector<DimensionScores> out;
  try {
    for (const auto& d : doc.at("dimensions")) {
      out.push_back({d.at("dimension").get<std::string>(), d.at("human").get<std::vector<int>>(),
                     d.at("model").get<std::vector<int>>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("bad agreement input: ") + e.what());
  }
  return out;
}

}  // namespace rebuttal
