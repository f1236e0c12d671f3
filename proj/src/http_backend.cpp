/*
 * Copyright (C) 2026 The opdyn authors
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
#include "opdyn/backends.hpp"
#include "opdyn/errors.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>
#include <thread>

namespace opdyn
{

namespace
{

using json = nlohmann::json;

constexpr std::string_view kChatPath = "/chat/completions";

// Splits "https://host:port/v1" into ("https://host:port", "/v1/chat/completions").
std::pair<std::string, std::string> split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("backend.base_url must start with http:// or https://, got '" + url + "'");
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw ConfigError("backend.base_url: unsupported scheme '" + scheme + "'");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https")
        throw ConfigError("backend.base_url: built without TLS support");
#endif
    const auto path_start = url.find('/', scheme_end + 3);
    std::string origin    = url.substr(0, path_start);
    std::string path      = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!path.empty() && path.back() == '/')
        path.pop_back();
    if (path.size() < kChatPath.size() || path.compare(path.size() - kChatPath.size(), kChatPath.size(), kChatPath) != 0)
        path += kChatPath;
    return {origin, path};
}

} // namespace

void HttpEndpointConfig::apply_environment()
{
    if (base_url.empty())
        if (const char* v = std::getenv("OPDYN_BASE_URL"))
            base_url = v;
    if (api_key.empty())
        if (const char* v = std::getenv("OPDYN_API_KEY"))
            api_key = v;
}

std::string build_chat_payload(const CompletionRequest& req)
{
    json body = {{"model", req.model_id},
                 {"messages",
                  json::array({{{"role", "system"}, {"content", req.system_prompt}},
                               {{"role", "user"}, {"content", req.user_prompt}}})},
                 {"temperature", req.temperature}};
    if (req.max_tokens)
        body["max_tokens"] = *req.max_tokens;
    return body.dump();
}

std::string parse_chat_response(const std::string& body)
{
    try {
        const auto j       = json::parse(body);
        const auto& choice = j.at("choices").at(0);
        auto text          = choice.at("message").at("content").get<std::string>();
        if (text.empty())
            throw ProtocolError("endpoint returned an empty completion");
        return text;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed chat completion response: ") + e.what());
    }
}

HttpChatBackend::HttpChatBackend(HttpEndpointConfig config)
    : m_config(std::move(config))
{
    m_config.apply_environment();
    if (m_config.base_url.empty())
        throw ConfigError("backend.base_url is not set (config or OPDYN_BASE_URL)");
    if (m_config.retries < 0)
        throw ConfigError("backend.retries must be >= 0");
    std::tie(m_origin, m_path) = split_url(m_config.base_url);
}

CompletionResult HttpChatBackend::complete(const CompletionRequest& req)
{
    req.validate();
    const auto payload = build_chat_payload(req);
    httplib::Headers headers;
    if (!m_config.api_key.empty())
        headers.emplace("Authorization", "Bearer " + m_config.api_key);

    httplib::Client client(m_origin);
    const auto timeout = static_cast<time_t>(m_config.timeout.count());
    client.set_connection_timeout(timeout, 0);
    client.set_read_timeout(timeout, 0);
    client.set_write_timeout(timeout, 0);

    const auto started = std::chrono::steady_clock::now();
    std::string last_error;
    const int max_attempts = m_config.retries + 1;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        auto res = client.Post(m_path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status >= 200 && res->status < 300) {
            CompletionResult r;
            r.text          = parse_chat_response(res->body);
            r.backend_name  = name();
            r.attempt_count = attempt;
            r.latency       = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started);
            return r;
        } else if (res->status == 401 || res->status == 403) {
            throw ConfigError("endpoint rejected the credentials (HTTP " + std::to_string(res->status) + ")");
        } else if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            throw ProtocolError("endpoint answered HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        if (attempt < max_attempts)
            std::this_thread::sleep_for(m_config.backoff_base * (1LL << std::min(attempt - 1, 20)));
    }
    throw BackendError("chat endpoint failed after " + std::to_string(max_attempts) + " attempts: " + last_error,
                       max_attempts);
}

} // namespace opdyn
