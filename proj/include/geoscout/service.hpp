#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "geoscout/batch.hpp"
#include "geoscout/dataset.hpp"
#include "geoscout/rewards.hpp"

namespace httplib {
class Server;
}

namespace geoscout {

std::string_view engine_version();

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_batch = 1024;
  RewardConfig reward;
};

struct HttpReply {
  int status = 200;
  std::string body;
};

// Where a request item failed validation, e.g. "items[3].ground_truth.grid".
struct FieldError {
  std::string path;
  std::string message;
};

struct RewardRequest {
  std::vector<RewardItem> items;
  RewardConfig cfg;
};

// Throws RequestRejected carrying every field error it found.
class RequestRejected : public Error {
 public:
  RequestRejected(int status, std::vector<FieldError> errors);
  int status() const { return status_; }
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  int status_;
  std::vector<FieldError> errors_;
};

RewardRequest parse_reward_request(std::string_view body, const ServiceConfig& cfg);
Json breakdown_to_json(const RewardBreakdown& r);
Json item_to_json(const RewardItem& item);

// Transport-independent handlers; the HTTP server is a thin shim over these.
HttpReply handle_reward(std::string_view body, const ServiceConfig& cfg);
HttpReply handle_health();

class RewardServer {
 public:
  explicit RewardServer(ServiceConfig cfg);
  ~RewardServer();
  RewardServer(const RewardServer&) = delete;
  RewardServer& operator=(const RewardServer&) = delete;

  // Binds cfg.port, or an ephemeral port when it is 0. Returns the bound port.
  int bind();
  // Blocks until stop(). bind() must have succeeded.
  void listen();
  void stop();
  int port() const { return port_; }

 private:
  ServiceConfig cfg_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
};

}  // namespace geoscout
