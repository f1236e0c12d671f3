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
#ifndef OPDYN_BACKENDS_HPP
#define OPDYN_BACKENDS_HPP

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace opdyn
{

struct CompletionRequest
{
    std::string system_prompt;
    std::string user_prompt;
    std::string model_id;
    double temperature = 0.0;
    std::optional<int> max_tokens;
    /// Free-form label for logs; not part of the cache key.
    std::string request_tag;

    void validate() const;
};

struct CompletionResult
{
    std::string text;
    std::string backend_name;
    bool from_cache = false;
    std::chrono::milliseconds latency{0};
    int attempt_count = 1;
};

class Backend
{
public:
    virtual ~Backend() = default;
    virtual CompletionResult complete(const CompletionRequest& req) = 0;
    virtual std::string name() const = 0;
    /// Whether complete() may be called from several threads at once.
    virtual bool concurrent_safe() const
    {
        return true;
    }
};

/// Replays a fixed list of replies in order and records every request.
class ScriptedBackend : public Backend
{
public:
    explicit ScriptedBackend(std::vector<std::string> responses);

    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override
    {
        return "scripted";
    }
    bool concurrent_safe() const override
    {
        return false;
    }

    const std::vector<CompletionRequest>& requests() const
    {
        return m_requests;
    }
    std::size_t remaining() const
    {
        return m_queue.size();
    }

private:
    std::deque<std::string> m_queue;
    std::vector<CompletionRequest> m_requests;
};

/// Answers with the arithmetic mean of its own and the partner's allocation.
class MidpointOracle : public Backend
{
public:
    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override
    {
        return "midpoint-oracle";
    }
};

/// Restates the agent's current opinion unchanged.
class StubbornOracle : public Backend
{
public:
    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override
    {
        return "stubborn-oracle";
    }
};

/// Allocation an oracle reads from one opinion written in the harness's
/// formats ("X% of the funding" or one of the initial templates).
std::optional<double> oracle_allocation(const std::string& opinion);

/// Shortest text that reads back as exactly `v`.
std::string format_number(double v);

/// Hex SHA-256 over backend name and every request field that can change the reply.
std::string cache_key(const std::string& backend_name, const CompletionRequest& req);

/// One JSON file per request digest under `dir`.
class CachingBackend : public Backend
{
public:
    CachingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir);

    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override
    {
        return m_inner->name();
    }
    bool concurrent_safe() const override
    {
        return m_inner->concurrent_safe();
    }

private:
    std::mutex& key_mutex(const std::string& key);

    std::shared_ptr<Backend> m_inner;
    std::filesystem::path m_dir;
    std::mutex m_map_mutex;
    std::map<std::string, std::unique_ptr<std::mutex>> m_key_mutexes;
};

/// Raises BackendError on every call after the first `fail_after`.
class FaultInjectingBackend : public Backend
{
public:
    FaultInjectingBackend(std::shared_ptr<Backend> inner, int fail_after);

    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override
    {
        return m_inner->name();
    }
    bool concurrent_safe() const override
    {
        return m_inner->concurrent_safe();
    }

private:
    std::shared_ptr<Backend> m_inner;
    int m_fail_after;
    std::mutex m_mutex;
    int m_calls = 0;
};

struct HttpEndpointConfig
{
    std::string base_url;
    std::string api_key;
    int retries = 3;
    std::chrono::milliseconds backoff_base{1000};
    std::chrono::seconds timeout{120};

    /// Fills base_url and api_key from OPDYN_BASE_URL / OPDYN_API_KEY when empty.
    void apply_environment();
};

/// Client for an OpenAI-compatible /chat/completions endpoint.
class HttpChatBackend : public Backend
{
public:
    explicit HttpChatBackend(HttpEndpointConfig config);

    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override
    {
        return "http-chat";
    }

    const HttpEndpointConfig& config() const
    {
        return m_config;
    }

private:
    HttpEndpointConfig m_config;
    std::string m_origin;
    std::string m_path;
};

/// Request body sent to the endpoint.
std::string build_chat_payload(const CompletionRequest& req);
/// Assistant text out of a response body; ProtocolError when malformed.
std::string parse_chat_response(const std::string& body);

} // namespace opdyn

#endif
