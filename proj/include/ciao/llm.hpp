#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ciao/money.hpp"

namespace ciao {

struct CompletionRequest {
    std::string model_id;
    std::string system_text;
    std::string user_text;
    int max_output_tokens = 8192;
    double temperature = 0.2;
    std::string label; // accounting tag (section id); never sent to the provider
};

struct CompletionResult {
    std::string text;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t latency_ms = 0;
    int attempts = 1;
};

/// One completion attempt against a concrete backend. Implementations throw
/// TransientProviderError for retryable failures (timeout, rate limit,
/// 5xx-class), AuthFailed for credential rejection, ProviderError otherwise.
class Provider {
public:
    virtual ~Provider() = default;
    virtual CompletionResult send(const CompletionRequest& request) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{2000};
    double backoff_factor = 4.0;
    /// Injectable for tests; defaults to an actual sleep.
    std::function<void(std::chrono::milliseconds)> sleep_fn;
    std::optional<std::uint64_t> jitter_seed;
};

/// Drives `provider.send` with retry on transient failures: up to
/// `max_attempts` total attempts, exponential backoff with full jitter
/// (uniform in [0, base * factor^(attempt-1)]). Throws ProviderExhausted with
/// the last underlying error once attempts run out, AuthFailed immediately,
/// OutputEmpty when the provider returns a blank completion.
CompletionResult complete(const CompletionRequest& request, Provider& provider,
                          const RetryPolicy& policy = {});

// HTTP chat-completions backend

struct HttpProviderConfig {
    std::string base_url = "https://api.openai.com";
    std::string completions_path = "/v1/chat/completions";
    std::string api_key;
    int timeout_seconds = 300;
};

/// Chat-completions-style HTTP JSON client (POST, bearer credential). The
/// request/response field mapping is documented in docs/provider-api.md.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config);
    CompletionResult send(const CompletionRequest& request) override;

private:
    HttpProviderConfig config_;
};

// Deterministic offline backend

/// One scripted step of the mock provider; steps are consumed per send() call
/// for a given label, the last step repeating once the script runs out.
/// `result` is one of: ok, rate-limit, timeout, server-error, auth-failed,
/// empty. An `ok` step without text synthesizes a deterministic, well-formed
/// section from the request.
struct MockStep {
    std::string result = "ok";
    std::optional<std::string> text;
    int delay_ms = 0;
};

class MockProvider : public Provider {
public:
    MockProvider() = default;

    /// Script format: JSON object mapping section id (or "*" for the default)
    /// to a list of steps: [{"result": "rate-limit"}, {"result": "ok", "text": "..."}].
    explicit MockProvider(const std::string& script_json);

    CompletionResult send(const CompletionRequest& request) override;

    int peak_in_flight() const { return peak_in_flight_.load(); }
    int total_sends() const { return total_sends_.load(); }

private:
    std::map<std::string, std::vector<MockStep>> scripts_;
    std::map<std::string, std::size_t> consumed_; // per label
    std::mutex mutex_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_in_flight_{0};
    std::atomic<int> total_sends_{0};
};

// Cost accounting

struct PriceTable {
    struct ModelPrice {
        Usd input_per_million;
        Usd output_per_million;
    };
    std::map<std::string, ModelPrice> models;

    /// JSON map: {"model-id": {"input_per_million": "1.25", "output_per_million": "10"}}.
    /// Prices may be decimal strings or numbers.
    static PriceTable parse(const std::string& json_text);
    static PriceTable load(const std::string& path);
};

struct CostCall {
    std::string label;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
};

struct CostLine {
    std::string label;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    Usd usd;
};

struct CostReport {
    std::vector<CostLine> per_call;
    Usd total_usd;
    std::int64_t total_input_tokens = 0;
    std::int64_t total_output_tokens = 0;
};

/// usd per call = input_tokens * p_in / 10^6 + output_tokens * p_out / 10^6,
/// computed in exact integer picodollars. Throws UnknownModelPrice when
/// `model_id` is absent from the table.
CostReport accumulate_cost(const std::vector<CostCall>& calls, const std::string& model_id,
                           const PriceTable& prices);

} // namespace ciao
