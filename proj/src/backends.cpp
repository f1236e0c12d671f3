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

#include "json.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace opdyn
{

namespace
{

using json = nlohmann::json;

constexpr std::string_view kOwnOpen     = "This is your current opinion: \"";
constexpr std::string_view kPartnerOpen = "Now, you interact with someone having this opinion: \"";
constexpr std::string_view kQuoteClose  = "\". ";

std::string between(const std::string& s, std::string_view open, std::string_view close)
{
    const auto a = s.find(open);
    if (a == std::string::npos)
        throw ProtocolError("oracle: prompt not in harness format (missing '" + std::string(open) + "')");
    const auto b = s.find(close, a + open.size());
    if (b == std::string::npos)
        throw ProtocolError("oracle: prompt not in harness format (unterminated quote)");
    return s.substr(a + open.size(), b - a - open.size());
}

bool is_closedform(const std::string& prompt)
{
    return prompt.find("State which option (a), (b), or (c)") != std::string::npos;
}

std::string item_a_of(const std::string& prompt)
{
    return between(prompt, "State how much funding should be given to ", " after this interaction");
}

double require_allocation(const std::string& opinion)
{
    const auto v = oracle_allocation(opinion);
    if (!v)
        throw ProtocolError("oracle: cannot read an allocation from \"" + opinion + "\"");
    return *v;
}

std::string option_reply(double allocation)
{
    const char label = allocation >= 100.0 ? 'a' : allocation <= 0.0 ? 'c' : 'b';
    return std::string("Option: (") + label + ")";
}

CompletionResult result(std::string text, std::string name)
{
    CompletionResult r;
    r.text         = std::move(text);
    r.backend_name = std::move(name);
    return r;
}

} // namespace

void CompletionRequest::validate() const
{
    if (!(temperature >= 0.0))
        throw ConfigError("temperature must be >= 0");
    if (max_tokens && *max_tokens <= 0)
        throw ConfigError("max_tokens must be positive");
    if (user_prompt.empty())
        throw ConfigError("empty user prompt");
}

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::optional<double> oracle_allocation(const std::string& opinion)
{
    constexpr std::string_view marker = "% of the funding";
    if (const auto pos = opinion.find(marker); pos != std::string::npos) {
        auto b = pos;
        while (b > 0 && (std::isdigit(static_cast<unsigned char>(opinion[b - 1])) || opinion[b - 1] == '.'))
            --b;
        double v = 0.0;
        const auto res = std::from_chars(opinion.data() + b, opinion.data() + pos, v);
        if (b < pos && res.ec == std::errc() && res.ptr == opinion.data() + pos)
            return v;
    }
    if (opinion.find("should have all the funding") != std::string::npos)
        return 100.0;
    if (opinion.find("should not have any funding") != std::string::npos)
        return 0.0;
    if (opinion.find("measured funding") != std::string::npos)
        return 50.0;
    return std::nullopt;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses)
    : m_queue(responses.begin(), responses.end())
{
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& req)
{
    m_requests.push_back(req);
    if (m_queue.empty())
        throw BackendError("scripted backend has no replies left", 1);
    auto text = std::move(m_queue.front());
    m_queue.pop_front();
    return result(std::move(text), name());
}

CompletionResult MidpointOracle::complete(const CompletionRequest& req)
{
    const auto& p      = req.user_prompt;
    const double own   = require_allocation(between(p, kOwnOpen, kQuoteClose));
    const double other = require_allocation(between(p, kPartnerOpen, kQuoteClose));
    const double m     = (own + other) / 2.0;
    if (is_closedform(p))
        return result(option_reply(m), name());
    return result("After this interaction, I think " + item_a_of(p) + " should receive " + format_number(m) +
                      "% of the funding.",
                  name());
}

CompletionResult StubbornOracle::complete(const CompletionRequest& req)
{
    const auto own = between(req.user_prompt, kOwnOpen, kQuoteClose);
    if (is_closedform(req.user_prompt))
        return result(option_reply(require_allocation(own)), name());
    return result(own, name());
}

std::string cache_key(const std::string& backend_name, const CompletionRequest& req)
{
    const json fields = {backend_name,
                         req.model_id,
                         req.system_prompt,
                         req.user_prompt,
                         format_number(req.temperature),
                         req.max_tokens ? json(*req.max_tokens) : json(nullptr)};
    const auto data = fields.dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw InternalError("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

CachingBackend::CachingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir)
    : m_inner(std::move(inner))
    , m_dir(std::move(dir))
{
    std::error_code ec;
    std::filesystem::create_directories(m_dir, ec);
    if (ec)
        throw IoError("cannot create cache directory " + m_dir.string() + ": " + ec.message());
}

std::mutex& CachingBackend::key_mutex(const std::string& key)
{
    std::lock_guard lock(m_map_mutex);
    auto& slot = m_key_mutexes[key];
    if (!slot)
        slot = std::make_unique<std::mutex>();
    return *slot;
}

CompletionResult CachingBackend::complete(const CompletionRequest& req)
{
    const auto key  = cache_key(m_inner->name(), req);
    const auto path = m_dir / (key + ".json");
    std::lock_guard lock(key_mutex(key));

    if (std::ifstream in(path); in) {
        try {
            const auto j = json::parse(in);
            if (j.value("key", "") == key) {
                auto r       = result(j.at("text").get<std::string>(), m_inner->name());
                r.from_cache = true;
                return r;
            }
        } catch (const json::exception&) {
            // Unreadable entry: fall through and overwrite it.
        }
    }

    auto r = m_inner->complete(req);
    const json entry = {{"key", key},
                        {"backend", m_inner->name()},
                        {"model", req.model_id},
                        {"system", req.system_prompt},
                        {"user", req.user_prompt},
                        {"temperature", req.temperature},
                        {"max_tokens", req.max_tokens ? json(*req.max_tokens) : json(nullptr)},
                        {"text", r.text}};
    std::ostringstream tid;
    tid << std::this_thread::get_id();
    auto tmp = path;
    tmp += ".tmp" + tid.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write cache entry " + tmp.string());
        out << entry.dump(2) << '\n';
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot store cache entry " + path.string() + ": " + ec.message());
    return r;
}

FaultInjectingBackend::FaultInjectingBackend(std::shared_ptr<Backend> inner, int fail_after)
    : m_inner(std::move(inner))
    , m_fail_after(fail_after)
{
}

CompletionResult FaultInjectingBackend::complete(const CompletionRequest& req)
{
    {
        std::lock_guard lock(m_mutex);
        if (m_calls >= m_fail_after)
            throw BackendError("injected failure after " + std::to_string(m_fail_after) + " calls", 1);
        ++m_calls;
    }
    return m_inner->complete(req);
}

} // namespace opdyn
