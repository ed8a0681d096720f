#include "geoscout/service.hpp"

#include <chrono>

#include "httplib.h"

namespace geoscout {

std::string_view engine_version() { return GEOSCOUT_VERSION; }

RequestRejected::RequestRejected(int status, std::vector<FieldError> errors)
    : Error("RequestRejected: " + (errors.empty() ? std::string("invalid request")
                                                  : errors.front().path + ": " + errors.front().message)),
      status_(status),
      errors_(std::move(errors)) {}

namespace {

std::string item_path(std::size_t i, std::string_view field = {}) {
  std::string p = "items[" + std::to_string(i) + "]";
  if (!field.empty()) p += "." + std::string(field);
  return p;
}

// Validates and converts one item; appends to errs on failure.
std::optional<RewardItem> parse_item(const Json& j, std::size_t i, std::vector<FieldError>& errs) {
  if (!j.is_object()) {
    errs.push_back({item_path(i), "expected an object"});
    return std::nullopt;
  }
  const std::size_t before = errs.size();
  auto need_string = [&](const char* key) -> const std::string* {
    auto it = j.find(key);
    if (it == j.end()) {
      errs.push_back({item_path(i, key), "missing"});
      return nullptr;
    }
    if (!it->is_string()) {
      errs.push_back({item_path(i, key), "expected a string"});
      return nullptr;
    }
    return it->get_ptr<const std::string*>();
  };
  const std::string* task = need_string("task");
  const std::string* output = need_string("output");
  std::optional<TaskKind> kind;
  if (task) {
    try {
      kind = parse_task_kind(*task);
    } catch (const Error&) {
      errs.push_back({item_path(i, "task"), "unknown task '" + *task + "'"});
    }
  }
  Mode mode = Mode::Direct;
  if (auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) {
      errs.push_back({item_path(i, "mode"), "expected a string"});
    } else {
      try {
        mode = parse_mode(it->get<std::string>());
      } catch (const Error&) {
        errs.push_back({item_path(i, "mode"), "unknown mode '" + it->get<std::string>() + "'"});
      }
    }
  }
  std::optional<GroundTruth> gt;
  auto gt_it = j.find("ground_truth");
  if (gt_it == j.end() || !gt_it->is_object()) {
    errs.push_back({item_path(i, "ground_truth"), gt_it == j.end() ? "missing" : "expected an object"});
  } else if (kind) {
    try {
      gt = truth_from_json(*kind, *gt_it);
    } catch (const std::exception& e) {
      errs.push_back({item_path(i, "ground_truth"), e.what()});
    }
  }
  if (errs.size() != before || !gt || !output) return std::nullopt;
  return RewardItem{std::move(*gt), mode, *output};
}

double number_field(const Json& cfg, const char* key, double fallback, std::vector<FieldError>& errs) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  if (!it->is_number()) {
    errs.push_back({std::string("config.") + key, "expected a number"});
    return fallback;
  }
  return it->get<double>();
}

HttpReply error_reply(int status, const std::vector<FieldError>& errs) {
  Json body;
  body["error"] = status == 413 ? "batch too large" : "invalid request";
  Json list = Json::array();
  for (const auto& e : errs) list.push_back(Json{{"path", e.path}, {"message", e.message}});
  body["errors"] = list;
  return {status, body.dump()};
}

}  // namespace

RewardRequest parse_reward_request(std::string_view body, const ServiceConfig& cfg) {
  Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) throw RequestRejected(400, {{"$", "malformed JSON"}});
  if (!j.is_object()) throw RequestRejected(400, {{"$", "expected an object"}});
  auto items = j.find("items");
  if (items == j.end()) throw RequestRejected(400, {{"items", "missing"}});
  if (!items->is_array()) throw RequestRejected(400, {{"items", "expected an array"}});
  if (items->size() > cfg.max_batch)
    throw RequestRejected(413, {{"items", std::to_string(items->size()) + " items exceed the limit of " +
                                              std::to_string(cfg.max_batch)}});

  std::vector<FieldError> errs;
  RewardRequest req;
  req.cfg = cfg.reward;
  if (auto c = j.find("config"); c != j.end() && !c->is_null()) {
    if (!c->is_object()) {
      errs.push_back({"config", "expected an object"});
    } else {
      req.cfg.tau = number_field(*c, "tau", req.cfg.tau, errs);
      req.cfg.scale_mix = number_field(*c, "scale_mix", req.cfg.scale_mix, errs);
      try {
        req.cfg.validate();
      } catch (const Error& e) {
        errs.push_back({"config", e.what()});
      }
    }
  }
  req.items.reserve(items->size());
  for (std::size_t i = 0; i < items->size(); ++i)
    if (auto it = parse_item((*items)[i], i, errs)) req.items.push_back(std::move(*it));
  if (!errs.empty()) throw RequestRejected(400, std::move(errs));
  return req;
}

Json breakdown_to_json(const RewardBreakdown& r) {
  Json j;
  j["r_acc"] = r.r_acc;
  j["r_fmt"] = r.r_fmt;
  j["r_reason"] = r.r_reason;
  j["r_total"] = r.r_total;
  j["parse_ok"] = r.parse_ok;
  Json sub = Json::object();
  for (const auto& [k, v] : r.sub_components) sub[k] = v;
  j["sub_components"] = sub;
  return j;
}

Json item_to_json(const RewardItem& item) {
  return Json{{"task", to_string(kind_of(item.truth))},
              {"mode", to_string(item.mode)},
              {"ground_truth", truth_to_json(item.truth)},
              {"output", item.output}};
}

HttpReply handle_reward(std::string_view body, const ServiceConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RewardRequest req;
  try {
    req = parse_reward_request(body, cfg);
  } catch (const RequestRejected& e) {
    return error_reply(e.status(), e.errors());
  }
  const auto rewards = score_batch(req.items, req.cfg);
  Json out;
  Json list = Json::array();
  for (const auto& r : rewards) list.push_back(breakdown_to_json(r));
  out["rewards"] = std::move(list);
  out["version"] = engine_version();
  out["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return {200, out.dump()};
}

HttpReply handle_health() { return {200, Json{{"status", "ok"}, {"version", engine_version()}}.dump()}; }

RewardServer::RewardServer(ServiceConfig cfg) : cfg_(std::move(cfg)), server_(std::make_unique<httplib::Server>()) {
  cfg_.reward.validate();
  if (cfg_.max_batch == 0) throw InvalidArgument("max batch must be positive");
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->Post("/v1/reward", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_reward(req.body, cfg_));
  });
  server_->Get("/v1/health", [send](const httplib::Request&, httplib::Response& res) { send(res, handle_health()); });
}

RewardServer::~RewardServer() { stop(); }

int RewardServer::bind() {
  if (cfg_.port == 0)
    port_ = server_->bind_to_any_port(cfg_.host);
  else
    port_ = server_->bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1;
  if (port_ < 0) throw IoError("cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
  return port_;
}

void RewardServer::listen() {
  if (port_ < 0) throw InvalidArgument("listen() before bind()");
  server_->listen_after_bind();
}

void RewardServer::stop() {
  if (server_) server_->stop();
}

}  // namespace geoscout
