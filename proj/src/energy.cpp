#include "geoscout/energy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace geoscout {

namespace {

// Running mean over sorted values: exact for constant columns and
// independent of input order.
double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m += (v[i] - m) / static_cast<double>(i + 1);
  return m;
}

double parse_double(std::string_view s, std::size_t line, const char* field) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  if (a == std::string_view::npos) throw SchemaError(line, std::string("empty ") + field);
  s = s.substr(a, b - a + 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError(line, std::string("cannot parse ") + field + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

GapStats energy_gap(const std::vector<EnergyRecord>& records, double bin_width) {
  if (records.size() < 2) throw EmptyInput("energy gap needs at least 2 pairs");
  if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be > 0");
  std::vector<double> f, cf;
  std::size_t separated = 0;
  for (const auto& r : records) {
    if (!std::isfinite(r.nll_factual) || !std::isfinite(r.nll_counterfactual) || r.nll_factual < 0.0 ||
        r.nll_counterfactual < 0.0)
      throw InvalidArgument("pair '" + r.pair_id + "' has a negative or non-finite NLL");
    f.push_back(r.nll_factual);
    cf.push_back(r.nll_counterfactual);
    if (r.nll_counterfactual > r.nll_factual) ++separated;
  }
  GapStats g;
  g.pairs = records.size();
  g.mean_factual = sorted_mean(f);
  g.mean_counterfactual = sorted_mean(cf);
  g.gap = g.mean_counterfactual - g.mean_factual;
  g.separation_rate = static_cast<double>(separated) / static_cast<double>(records.size());
  g.bin_width = bin_width;

  const double lo_v = std::min(*std::min_element(f.begin(), f.end()), *std::min_element(cf.begin(), cf.end()));
  const double hi_v = std::max(*std::max_element(f.begin(), f.end()), *std::max_element(cf.begin(), cf.end()));
  const double lo = std::floor(lo_v / bin_width) * bin_width;
  const auto bins = static_cast<std::size_t>(std::floor((hi_v - lo) / bin_width)) + 1;
  g.histogram.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    g.histogram[i] = {lo + static_cast<double>(i) * bin_width, lo + static_cast<double>(i + 1) * bin_width, 0, 0};
  auto bin_of = [&](double x) {
    const double b = std::floor((x - lo) / bin_width);
    return std::min(static_cast<std::size_t>(std::max(b, 0.0)), bins - 1);
  };
  for (double x : f) ++g.histogram[bin_of(x)].factual;
  for (double x : cf) ++g.histogram[bin_of(x)].counterfactual;
  return g;
}

std::vector<EnergyRecord> parse_energy_csv(std::istream& in) {
  std::vector<EnergyRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header) {
      if (line != "pair_id,nll_factual,nll_counterfactual")
        throw SchemaError(lineno, "expected header 'pair_id,nll_factual,nll_counterfactual'");
      header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw SchemaError(lineno, "expected 3 comma-separated fields");
    const std::string_view sv(line);
    out.push_back({line.substr(0, c1), parse_double(sv.substr(c1 + 1, c2 - c1 - 1), lineno, "nll_factual"),
                   parse_double(sv.substr(c2 + 1), lineno, "nll_counterfactual")});
  }
  if (!header) throw SchemaError(lineno + 1, "missing header");
  return out;
}

std::vector<EnergyRecord> read_energy_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_energy_csv(in);
}

Json gap_to_json(const GapStats& g) {
  Json j;
  j["pairs"] = g.pairs;
  j["mean_factual"] = g.mean_factual;
  j["mean_counterfactual"] = g.mean_counterfactual;
  j["gap"] = g.gap;
  j["separation_rate"] = g.separation_rate;
  j["bin_width"] = g.bin_width;
  return j;
}

std::string histogram_csv(const GapStats& g) {
  std::string out = "bin_lo,bin_hi,factual,counterfactual\n";
  char buf[128];
  for (const auto& b : g.histogram) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%lld,%lld\n", b.lo, b.hi, static_cast<long long>(b.factual),
                  static_cast<long long>(b.counterfactual));
    out += buf;
  }
  return out;
}

}  // namespace geoscout
