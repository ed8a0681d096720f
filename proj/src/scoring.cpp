#include "geoscout/scoring.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include "geoscout/batch.hpp"

namespace geoscout {

std::vector<Response> parse_responses(std::istream& in) {
  std::vector<Response> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = Json::parse(line);
      out.push_back({j.at("id").get<std::string>(), j.at("output").get<std::string>()});
    } catch (const Json::exception& e) {
      throw SchemaError(lineno, e.what());
    }
  }
  return out;
}

std::vector<Response> read_responses(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open responses '" + path.string() + "'");
  return parse_responses(in);
}

namespace {

void accumulate(ComponentMeans& m, const RewardBreakdown& r) {
  ++m.count;
  m.r_acc += r.r_acc;
  m.r_fmt += r.r_fmt;
  m.r_reason += r.r_reason;
  m.r_total += r.r_total;
}

void finish(ComponentMeans& m) {
  if (m.count == 0) return;
  const double n = static_cast<double>(m.count);
  m.r_acc /= n;
  m.r_fmt /= n;
  m.r_reason /= n;
  m.r_total /= n;
}

Json means_json(const ComponentMeans& m) {
  return Json{{"count", m.count}, {"r_acc", m.r_acc}, {"r_fmt", m.r_fmt}, {"r_reason", m.r_reason}, {"r_total", m.r_total}};
}

}  // namespace

ScoreReport score_responses(const Manifest& manifest, const std::vector<Response>& responses,
                            const RewardConfig& cfg, MissingPolicy missing, const AnswerExtractor& extractor) {
  cfg.validate();
  std::unordered_map<std::string, std::size_t> case_index;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) case_index.emplace(manifest.records[i].id, i);

  std::vector<const Response*> by_case(manifest.records.size(), nullptr);
  for (const auto& r : responses) {
    auto it = case_index.find(r.id);
    if (it == case_index.end()) throw UnknownId("response id '" + r.id + "' is not in the manifest");
    if (by_case[it->second]) throw DuplicateId("response id '" + r.id + "' appears more than once");
    by_case[it->second] = &r;
  }

  std::vector<RewardItem> items;
  std::vector<std::size_t> item_case;
  ScoreReport rep;
  rep.rows.reserve(manifest.records.size());
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const TaskInstance& t = manifest.records[i];
    CaseRow row{t.id, t.kind, t.modality, t.mode, by_case[i] == nullptr, {}};
    if (row.missing) {
      if (missing == MissingPolicy::Error) throw MissingResponse("no response for '" + t.id + "'");
      ++rep.missing;
    } else {
      std::string text = extractor ? extractor(by_case[i]->output, t) : by_case[i]->output;
      items.push_back({t.ground_truth, t.mode, std::move(text)});
      item_case.push_back(i);
    }
    rep.rows.push_back(std::move(row));
  }
  if (rep.missing > 0)
    std::cerr << "warning: " << rep.missing << " case(s) have no response and score 0\n";

  const auto scored = score_batch(items, cfg);
  for (std::size_t k = 0; k < scored.size(); ++k) rep.rows[item_case[k]].reward = scored[k];

  std::int64_t parse_fail = 0;
  for (const auto& row : rep.rows) {
    accumulate(rep.components[static_cast<std::size_t>(row.kind)], row.reward);
    accumulate(rep.cells[std::string(to_string(row.modality)) + "/" + std::string(to_string(row.kind))], row.reward);
    if (!row.reward.parse_ok) ++parse_fail;
  }
  double sum = 0.0;
  int present = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    finish(rep.components[k]);
    if (rep.components[k].count > 0) {
      rep.per_task[k] = rep.components[k].r_acc * 100.0;
      sum += *rep.per_task[k];
      ++present;
    }
  }
  for (auto& [name, m] : rep.cells) finish(m);
  rep.avg = present ? sum / present : 0.0;
  rep.parse_fail_rate = rep.rows.empty() ? 0.0 : static_cast<double>(parse_fail) / static_cast<double>(rep.rows.size());
  return rep;
}

Json report_to_json(const ScoreReport& r) {
  Json j;
  Json per_task = Json::object();
  Json components = Json::object();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto name = std::string(to_string(kTaskKinds[k]));
    per_task[name] = r.per_task[k] ? Json(*r.per_task[k]) : Json(nullptr);
    components[name] = means_json(r.components[k]);
  }
  j["per_task"] = per_task;
  j["avg"] = r.avg;
  j["parse_fail_rate"] = r.parse_fail_rate;
  Json cells = Json::object();
  for (const auto& [name, m] : r.cells) cells[name] = means_json(m);
  j["cells"] = cells;
  j["components"] = components;
  j["cases"] = r.rows.size();
  j["missing"] = r.missing;
  return j;
}

std::string report_cases_csv(const ScoreReport& r) {
  std::string out = "id,task,modality,mode,r_acc,r_fmt,r_reason,r_total,parse_ok,missing\n";
  char buf[160];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%d,%d\n", row.reward.r_acc, row.reward.r_fmt,
                  row.reward.r_reason, row.reward.r_total, row.reward.parse_ok ? 1 : 0, row.missing ? 1 : 0);
    out += row.id + "," + std::string(to_string(row.kind)) + "," + std::string(to_string(row.modality)) + "," +
           std::string(to_string(row.mode)) + buf;
  }
  return out;
}

std::string report_headline(const ScoreReport& r) {
  std::string out;
  char buf[32];
  for (std::size_t k = 0; k < 3; ++k) {
    if (k) out += ' ';
    out += std::string(to_string(kTaskKinds[k])) + "=";
    if (r.per_task[k]) {
      std::snprintf(buf, sizeof buf, "%.1f", *r.per_task[k]);
      out += buf;
    } else {
      out += "n/a";
    }
  }
  std::snprintf(buf, sizeof buf, " avg=%.1f", r.avg);
  return out + buf;
}

}  // namespace geoscout
