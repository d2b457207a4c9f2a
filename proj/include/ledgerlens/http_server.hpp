/*
 * Copyright 2026 The LedgerLens Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <memory>
#include <string>

#include <ledgerlens/service.hpp>

namespace ledgerlens::service {

/// Serves a Service over HTTP/1.1. The adapter only translates requests; all
/// routing and error mapping lives in Service::handle.
class HttpServer {
public:
    explicit HttpServer(Service &service);
    ~HttpServer();
    HttpServer(const HttpServer &) = delete;
    HttpServer &operator=(const HttpServer &) = delete;

    /// Binds host:port (port 0 picks a free one) and returns the bound port.
    /// Throws error{bind_failure}.
    int bind(const std::string &host, int port);
    /// Blocks until stop().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Splits "host:port"; throws error{invalid_argument}.
std::pair<std::string, int> parse_bind_address(const std::string &text);

}  // namespace ledgerlens::service
