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

#pragma once

#include <chrono>
#include <string>

#include "json.hpp"

namespace ctmcts {

struct HttpClientConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080" (an optional path prefix is kept)
  double timeout_seconds = 30.0;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
};

// Minimal JSON-over-HTTP client. Transport failures and 5xx replies are
// retried with exponential backoff; the final failure surfaces as
// TransportError. 4xx replies and non-JSON bodies raise ProtocolError.
// Each call opens its own connection, so one client may be shared by threads.
class JsonHttpClient {
 public:
  explicit JsonHttpClient(HttpClientConfig config);

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  const HttpClientConfig& config() const { return config_; }

 private:
  HttpClientConfig config_;
  std::string host_;  // scheme://host[:port]
  std::string prefix_;
};

}  // namespace ctmcts
