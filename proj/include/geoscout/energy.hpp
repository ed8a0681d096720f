#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geoscout/dataset.hpp"

namespace geoscout {

// Negative log-likelihoods (nats) of the factual and counterfactual
// description of the same image.
struct EnergyRecord {
  std::string pair_id;
  double nll_factual = 0.0;
  double nll_counterfactual = 0.0;
};

struct HistogramBin {
  double lo;
  double hi;
  std::int64_t factual;
  std::int64_t counterfactual;
};

struct GapStats {
  std::size_t pairs = 0;
  double mean_factual = 0.0;
  double mean_counterfactual = 0.0;
  double gap = 0.0;              // mean_counterfactual - mean_factual
  double separation_rate = 0.0;  // fraction with nll_cf > nll_fact
  double bin_width = 0.05;
  std::vector<HistogramBin> histogram;
};

// Input order does not affect any output bit.
GapStats energy_gap(const std::vector<EnergyRecord>& records, double bin_width = 0.05);

// CSV with header pair_id,nll_factual,nll_counterfactual.
std::vector<EnergyRecord> read_energy_csv(const std::filesystem::path& path);
std::vector<EnergyRecord> parse_energy_csv(std::istream& in);

Json gap_to_json(const GapStats& g);
std::string histogram_csv(const GapStats& g);

}  // namespace geoscout
