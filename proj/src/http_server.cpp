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
#include <ledgerlens/http_server.hpp>

#include <charconv>

#include <httplib.h>

namespace ledgerlens::service {

struct HttpServer::Impl {
    explicit Impl(Service &s) : service(s) {}

    Service &service;
    httplib::Server server;
};

namespace {

Request translate(const httplib::Request &req)
{
    Request out{.method = req.method, .path = req.path};
    for (const auto &[key, value] : req.params)
        out.query.try_emplace(key, value);
    if (req.is_multipart_form_data()) {
        // the dump is the first uploaded file
        for (const auto &[name, file] : req.files) {
            if (!file.filename.empty() || req.files.size() == 1) {
                out.body = file.content;
                break;
            }
        }
    } else {
        out.body = req.body;
    }
    return out;
}

}  // namespace

HttpServer::HttpServer(Service &service) : impl_(std::make_unique<Impl>(service))
{
    const auto handler = [this](const httplib::Request &req, httplib::Response &res) {
        const auto response = impl_->service.handle(translate(req));
        res.status = response.status;
        res.set_header("X-Snapshot-Id", std::to_string(response.snapshot_id));
        res.set_content(response.body, "application/json");
    };
    auto &s = impl_->server;
    s.Get(".*", handler);
    s.Post(".*", handler);
    s.Put(".*", handler);
    s.Delete(".*", handler);
    s.Patch(".*", handler);
    // SO_REUSEADDR only: httplib's default SO_REUSEPORT would let a second
    // server share a port that is already taken
    s.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string &host, int port)
{
    auto &s = impl_->server;
    if (port == 0) {
        const int bound = s.bind_to_any_port(host);
        if (bound <= 0)
            throw error(errc::bind_failure, "cannot bind " + host + ":0");
        return bound;
    }
    if (!s.bind_to_port(host, port))
        throw error(errc::bind_failure, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::run()
{
    impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    impl_->server.stop();
}

std::pair<std::string, int> parse_bind_address(const std::string &text)
{
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw error(errc::invalid_argument, "bind address must be host:port, got '" + text + "'");
    int port = 0;
    const auto *begin = text.data() + colon + 1;
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, port);
    if (ec != std::errc{} || ptr != end || port < 0 || port > 65535)
        throw error(errc::invalid_argument, "bad port in '" + text + "'");
    auto host = text.substr(0, colon);
    if (host.size() > 2 && host.front() == '[' && host.back() == ']')
        host = host.substr(1, host.size() - 2);
    return {host, port};
}

}  // namespace ledgerlens::service
