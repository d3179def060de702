// Copyright 2025 The ctmcts Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctmcts/http_client.h"

#include <thread>

#include "ctmcts/error.h"
#include "httplib.h"

namespace ctmcts {

JsonHttpClient::JsonHttpClient(HttpClientConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ContractError("HTTP client needs a base URL");
  if (config_.max_attempts < 1) config_.max_attempts = 1;
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  host_ = url.substr(0, path_begin);
  if (path_begin != std::string::npos) prefix_ = url.substr(path_begin);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

nlohmann::json JsonHttpClient::post(const std::string& path,
                                    const nlohmann::json& body) const {
  const std::string payload = body.dump();
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((timeout.count() - static_cast<double>(secs)) * 1e6);
  std::chrono::milliseconds backoff = config_.initial_backoff;
  std::string last_error;

  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    httplib::Client cli(host_);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    auto res = cli.Post(prefix_ + path, payload, "application/json");
    if (!res) {
      last_error = "POST " + path + " failed: " + httplib::to_string(res.error());
    } else if (res->status >= 500) {
      last_error = "POST " + path + " returned HTTP " + std::to_string(res->status);
    } else if (res->status >= 400) {
      throw ProtocolError("POST " + path + " returned HTTP " + std::to_string(res->status) +
                          ": " + res->body);
    } else {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError("POST " + path + " returned a non-JSON body");
      }
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError(last_error, config_.max_attempts);
}

}  // namespace ctmcts
