#pragma once

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace metarev::llm {

struct CompletionRequest {
    std::string prompt;
    std::string model_id;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::string request_tag;  // pipeline step label, not part of the fingerprint
};

struct TokenUsage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct CompletionResult {
    std::string text;
    TokenUsage usage;
    std::chrono::milliseconds latency{0};
    std::string backend_id;
    bool truncated = false;  // the only case where empty text is legal
};

/// Content fingerprint of a request: hash of model id, temperature and
/// prompt (the tag is deliberately excluded, so the same prompt replays
/// regardless of which pipeline step issued it).
std::string request_fingerprint(const CompletionRequest& request);

class CompletionBackend {
  public:
    virtual ~CompletionBackend() = default;
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
    virtual std::string_view id() const = 0;
};

struct RemoteOptions {
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string api_key_env = "METAREV_API_KEY";
    int max_retries = 3;          // transient failures: connect errors, 429, 5xx
    int backoff_initial_ms = 500; // doubles per retry
    int requests_per_minute = 60;
    int max_concurrent = 4;
    int timeout_seconds = 120;
};

/// HTTP chat-completion client. Serializes the prompt as a single user
/// message; honors the request budget and concurrency cap across threads.
class RemoteBackend : public CompletionBackend {
  public:
    explicit RemoteBackend(RemoteOptions options);
    ~RemoteBackend() override;
    CompletionResult complete(const CompletionRequest& request) override;
    std::string_view id() const override { return "remote"; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Serves recorded completions from a fixtures directory, keyed by request
/// fingerprint. Throws ReplayMiss when no fixture matches.
class ReplayBackend : public CompletionBackend {
  public:
    explicit ReplayBackend(std::filesystem::path fixtures_dir);
    CompletionResult complete(const CompletionRequest& request) override;
    std::string_view id() const override { return "replay"; }

  private:
    std::filesystem::path dir_;
};

/// Replays existing fixtures and forwards everything else to the upstream
/// backend, recording the result as a new fixture on the way back.
class RecordBackend : public CompletionBackend {
  public:
    RecordBackend(std::shared_ptr<CompletionBackend> upstream, std::filesystem::path fixtures_dir);
    CompletionResult complete(const CompletionRequest& request) override;
    std::string_view id() const override { return "record"; }

  private:
    std::shared_ptr<CompletionBackend> upstream_;
    std::filesystem::path dir_;
};

/// Thin shared entry point the pipeline talks to; counts requests so tests
/// can assert completion budgets.
class Gateway {
  public:
    explicit Gateway(std::shared_ptr<CompletionBackend> backend)
        : backend_(std::move(backend)) {}

    CompletionResult complete(const CompletionRequest& request) {
        if (request.prompt.empty()) {
            throw std::invalid_argument("completion request carries an empty prompt");
        }
        ++count_;
        return backend_->complete(request);
    }

    std::size_t request_count() const { return count_.load(); }
    std::string_view backend_id() const { return backend_->id(); }

  private:
    std::shared_ptr<CompletionBackend> backend_;
    std::atomic<std::size_t> count_{0};
};

/// Fixture file helpers, shared by the replay/record backends and the
/// fixture generator.
struct Fixture {
    std::string fingerprint;
    std::string model_id;
    double temperature = 0.0;
    std::string prompt;
    std::string text;
    TokenUsage usage;
    bool truncated = false;
};

std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                   const std::string& fingerprint);
void write_fixture(const std::filesystem::path& dir, const Fixture& fixture);
Fixture read_fixture(const std::filesystem::path& file);

}  // namespace metarev::llm
