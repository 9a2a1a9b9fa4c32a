#include "metarev/gateway.hpp"

#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "metarev/errors.hpp"

namespace metarev::llm {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string canonical_temperature(double t) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t);
    return std::string(buf, ptr);
}

// FNV-1a, 64-bit. Collisions are guarded against by verifying the stored
// prompt on replay.
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

/// Splits "https://host:port/prefix" into (scheme://host:port, /prefix).
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = base_url.find('/', host_start);
    if (path_start == std::string::npos) {
        return {base_url, ""};
    }
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

}  // namespace

std::string request_fingerprint(const CompletionRequest& request) {
    std::uint64_t h = fnv1a(request.model_id);
    h = fnv1a("\x1e", h);
    h = fnv1a(canonical_temperature(request.temperature), h);
    h = fnv1a("\x1e", h);
    h = fnv1a(request.prompt, h);
    return to_hex(h);
}

std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                   const std::string& fingerprint) {
    return dir / (fingerprint + ".json");
}

void write_fixture(const std::filesystem::path& dir, const Fixture& fixture) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = fixture_path(dir, fixture.fingerprint);
    OrderedJson obj;
    obj["fingerprint"] = fixture.fingerprint;
    obj["model_id"] = fixture.model_id;
    obj["temperature"] = fixture.temperature;
    obj["prompt"] = fixture.prompt;
    obj["text"] = fixture.text;
    obj["prompt_tokens"] = fixture.usage.prompt_tokens;
    obj["completion_tokens"] = fixture.usage.completion_tokens;
    obj["truncated"] = fixture.truncated;
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw IoError("cannot open for writing: " + tmp);
        }
        out << obj.dump(2) << '\n';
        if (!out) {
            throw IoError("write failed: " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

Fixture read_fixture(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw IoError("cannot open for reading: " + file.string());
    }
    Json obj;
    try {
        obj = Json::parse(in);
    } catch (const Json::exception& e) {
        throw DecodeError(e.what(), 0);
    }
    Fixture f;
    f.fingerprint = obj.value("fingerprint", std::string{});
    f.model_id = obj.value("model_id", std::string{});
    f.temperature = obj.value("temperature", 0.0);
    f.prompt = obj.value("prompt", std::string{});
    f.text = obj.value("text", std::string{});
    f.usage.prompt_tokens = obj.value("prompt_tokens", 0L);
    f.usage.completion_tokens = obj.value("completion_tokens", 0L);
    f.truncated = obj.value("truncated", false);
    return f;
}

// ---------------------------------------------------------------------------
// Remote backend

struct RemoteBackend::Impl {
    RemoteOptions options;
    std::string host;
    std::string path_prefix;
    std::string api_key;

    std::mutex mu;
    std::condition_variable cv;
    int in_flight = 0;
    std::deque<std::chrono::steady_clock::time_point> recent;  // request start times

    explicit Impl(RemoteOptions opts) : options(std::move(opts)) {
        std::tie(host, path_prefix) = split_base_url(options.base_url);
        if (const char* key = std::getenv(options.api_key_env.c_str())) {
            api_key = key;
        }
    }

    // Blocks until both the concurrency cap and the per-minute budget admit
    // one more request.
    void acquire_slot() {
        std::unique_lock lock(mu);
        while (true) {
            const auto now = std::chrono::steady_clock::now();
            while (!recent.empty() && now - recent.front() > std::chrono::minutes(1)) {
                recent.pop_front();
            }
            if (in_flight < options.max_concurrent &&
                static_cast<int>(recent.size()) < options.requests_per_minute) {
                ++in_flight;
                recent.push_back(now);
                return;
            }
            if (in_flight >= options.max_concurrent) {
                cv.wait(lock);
            } else {
                const auto wake = recent.front() + std::chrono::minutes(1);
                cv.wait_until(lock, wake);
            }
        }
    }

    void release_slot() {
        {
            std::lock_guard lock(mu);
            --in_flight;
        }
        cv.notify_all();
    }
};

RemoteBackend::RemoteBackend(RemoteOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

RemoteBackend::~RemoteBackend() = default;

CompletionResult RemoteBackend::complete(const CompletionRequest& request) {
    const auto started = std::chrono::steady_clock::now();

    OrderedJson body;
    body["model"] = request.model_id;
    body["messages"] = OrderedJson::array({OrderedJson{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!impl_->api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->api_key);
    }

    std::string last_error;
    int backoff_ms = impl_->options.backoff_initial_ms;
    for (int attempt = 0; attempt <= impl_->options.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        impl_->acquire_slot();
        httplib::Client client(impl_->host);
        client.set_connection_timeout(impl_->options.timeout_seconds);
        client.set_read_timeout(impl_->options.timeout_seconds);
        auto res = client.Post(impl_->path_prefix + "/chat/completions", headers, payload,
                               "application/json");
        impl_->release_slot();

        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw BackendError("completion endpoint returned status " +
                               std::to_string(res->status) + ": " + res->body);
        }
        Json reply;
        try {
            reply = Json::parse(res->body);
        } catch (const Json::exception& e) {
            throw BackendError(std::string("unparseable completion response: ") + e.what());
        }
        CompletionResult result;
        result.backend_id = "remote";
        try {
            const auto& choice = reply.at("choices").at(0);
            result.text = choice.at("message").at("content").get<std::string>();
            result.truncated = choice.value("finish_reason", std::string{}) == "length";
        } catch (const Json::exception& e) {
            throw BackendError(std::string("unexpected completion schema: ") + e.what());
        }
        if (reply.contains("usage")) {
            result.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
            result.usage.completion_tokens = reply["usage"].value("completion_tokens", 0L);
        }
        result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
        if (result.text.empty() && !result.truncated) {
            throw BackendError("backend returned empty text without truncation");
        }
        return result;
    }
    throw BackendError("completion failed after " +
                       std::to_string(impl_->options.max_retries + 1) + " attempts: " +
                       last_error);
}

// ---------------------------------------------------------------------------
// Replay / record backends

ReplayBackend::ReplayBackend(std::filesystem::path fixtures_dir) : dir_(std::move(fixtures_dir)) {
    if (!std::filesystem::is_directory(dir_)) {
        throw IoError("fixtures directory does not exist: " + dir_.string());
    }
}

CompletionResult ReplayBackend::complete(const CompletionRequest& request) {
    const std::string fp = request_fingerprint(request);
    const auto path = fixture_path(dir_, fp);
    if (!std::filesystem::exists(path)) {
        throw ReplayMiss(fp);
    }
    const Fixture fixture = read_fixture(path);
    if (fixture.prompt != request.prompt || fixture.model_id != request.model_id) {
        throw ReplayMiss(fp + " (stored request does not match)");
    }
    CompletionResult result;
    result.text = fixture.text;
    result.usage = fixture.usage;
    result.truncated = fixture.truncated;
    result.backend_id = "replay";
    return result;
}

RecordBackend::RecordBackend(std::shared_ptr<CompletionBackend> upstream,
                             std::filesystem::path fixtures_dir)
    : upstream_(std::move(upstream)), dir_(std::move(fixtures_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
}

CompletionResult RecordBackend::complete(const CompletionRequest& request) {
    const std::string fp = request_fingerprint(request);
    const auto path = fixture_path(dir_, fp);
    if (std::filesystem::exists(path)) {
        const Fixture fixture = read_fixture(path);
        if (fixture.prompt == request.prompt && fixture.model_id == request.model_id) {
            CompletionResult result;
            result.text = fixture.text;
            result.usage = fixture.usage;
            result.truncated = fixture.truncated;
            result.backend_id = "record";
            return result;
        }
    }
    CompletionResult result = upstream_->complete(request);
    Fixture fixture;
    fixture.fingerprint = fp;
    fixture.model_id = request.model_id;
    fixture.temperature = request.temperature;
    fixture.prompt = request.prompt;
    fixture.text = result.text;
    fixture.usage = result.usage;
    fixture.truncated = result.truncated;
    write_fixture(dir_, fixture);
    result.backend_id = "record";
    return result;
}

}  // namespace metarev::llm
