#pragma once

// HTTP clients for the victim and masked-LM services.
//
//   POST /predict      {"premise","hypothesis"}  -> {"label","probs":{...}}
//   POST /mlm/fill     {"text","k"}              -> {"fillers":[{"word","pos","prob"}]}
//   POST /mlm/logprob  {"text","position"}       -> {"logprob"}

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "natlog/adapters.hpp"
#include "natlog/error.hpp"

namespace natlog {

struct HttpOptions {
  int retries = 3;
  int backoff_ms = 100;
  int timeout_s = 30;
  int max_in_flight = 4;
};

struct AdapterConfig {
  std::string victim_url;
  std::string lm_url;
  HttpOptions http;

  /// Reads {"victim_url","lm_url","retries","backoff_ms","timeout_s",
  /// "max_in_flight"}; absent keys keep their current values.
  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open adapter config " + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      victim_url = j.value("victim_url", victim_url);
      lm_url = j.value("lm_url", lm_url);
      http.retries = j.value("retries", http.retries);
      http.backoff_ms = j.value("backoff_ms", http.backoff_ms);
      http.timeout_s = j.value("timeout_s", http.timeout_s);
      http.max_in_flight = j.value("max_in_flight", http.max_in_flight);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ": " + e.what());
    }
    if (http.retries < 1 || http.max_in_flight < 1 || http.timeout_s < 1 || http.backoff_ms < 0)
      throw InputError(path + ": retries, timeout_s and max_in_flight must be positive");
  }

  /// NLA_VICTIM_URL and NLA_LM_URL override the file.
  void merge_env() {
    if (const char* v = std::getenv("NLA_VICTIM_URL"); v && *v) victim_url = v;
    if (const char* v = std::getenv("NLA_LM_URL"); v && *v) lm_url = v;
  }
};

namespace detail {

/// POSTs JSON with bounded concurrency and retries on transport failures
/// and 5xx responses.
class JsonEndpoint {
 public:
  JsonEndpoint(std::string base_url, HttpOptions opts)
      : opts_(opts), slots_(opts.max_in_flight) {
    if (opts_.retries < 1) throw InputError("http: retries must be at least 1");
    auto scheme = base_url.find("://");
    if (scheme == std::string::npos) throw InputError("http: URL needs a scheme: " + base_url);
    auto slash = base_url.find('/', scheme + 3);
    origin_ = base_url.substr(0, slash);
    if (slash != std::string::npos) prefix_ = base_url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  nlohmann::json post(const std::string& path, const nlohmann::json& body) {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{slots_};

    std::string last_error;
    for (int attempt = 0; attempt < opts_.retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(opts_.backoff_ms << (attempt - 1)));
      ++attempts_;
      httplib::Client cli(origin_);
      cli.set_connection_timeout(opts_.timeout_s);
      cli.set_read_timeout(opts_.timeout_s);
      cli.set_write_timeout(opts_.timeout_s);
      auto res = cli.Post(prefix_ + path, body.dump(), "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw ProtocolError(origin_ + prefix_ + path + ": HTTP " + std::to_string(res->status) + ": " + res->body);
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(origin_ + prefix_ + path + ": response is not JSON: " + e.what());
      }
    }
    throw AdapterError(origin_ + prefix_ + path + ": failed after " + std::to_string(opts_.retries) +
                       " attempts: " + last_error);
  }

  /// Total HTTP attempts made, retries included.
  long attempts() const { return attempts_.load(); }

 private:
  HttpOptions opts_;
  std::string origin_;
  std::string prefix_;
  std::counting_semaphore<> slots_;
  std::atomic<long> attempts_{0};
};

}  // namespace detail

class HttpVictim final : public VictimAdapter {
 public:
  explicit HttpVictim(std::string base_url, HttpOptions opts = {}) : ep_(std::move(base_url), opts) {}

  VictimPrediction predict(std::string_view premise, std::string_view hypothesis) override {
    auto j = ep_.post("/predict", {{"premise", premise}, {"hypothesis", hypothesis}});
    return prediction_from_json(j);
  }

  bool concurrent_safe() const override { return true; }
  long attempts() const { return ep_.attempts(); }

 private:
  detail::JsonEndpoint ep_;
};

class HttpLm final : public LmAdapter {
 public:
  explicit HttpLm(std::string base_url, HttpOptions opts = {}) : ep_(std::move(base_url), opts) {}

  MlmResponse fill(std::string_view text, int k) override {
    require_single_mask(text);
    if (k <= 0) return {};
    auto r = fill_from_json(ep_.post("/mlm/fill", {{"text", text}, {"k", k}}));
    if (r.fillers.size() > static_cast<std::size_t>(k)) r.fillers.resize(static_cast<std::size_t>(k));
    return r;
  }

  double token_logprob(std::string_view text, std::size_t position) override {
    const auto n = text::split_ws(text).size();
    if (position >= n)
      throw InputError("token_logprob: position " + std::to_string(position) + " out of range for " +
                       std::to_string(n) + " words");
    return logprob_from_json(ep_.post("/mlm/logprob", {{"text", text}, {"position", position}}));
  }

  bool concurrent_safe() const override { return true; }
  long attempts() const { return ep_.attempts(); }

 private:
  detail::JsonEndpoint ep_;
};

}  // namespace natlog
