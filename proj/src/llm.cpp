#include "ciao/llm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ciao/errors.hpp"

namespace ciao {

namespace {

using nlohmann::json;

bool is_blank(const std::string& text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

void validate_request(const CompletionRequest& request) {
    if (request.model_id.empty()) {
        throw std::invalid_argument("model_id must be non-empty");
    }
    if (request.max_output_tokens <= 0) {
        throw std::invalid_argument("max_output_tokens must be positive");
    }
    if (request.temperature < 0.0 || request.temperature > 2.0) {
        throw std::invalid_argument("temperature must be in [0, 2]");
    }
}

std::int64_t heuristic_tokens(const std::string& text) {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

// Extracts the backticked value introduced by `prefix` from a prompt, e.g.
// the required heading out of "... heading: `## 3. Containers`.".
std::string extract_backticked(const std::string& prompt, const std::string& prefix) {
    const auto at = prompt.find(prefix);
    if (at == std::string::npos) {
        return {};
    }
    const auto start = at + prefix.size();
    const auto end = prompt.find('`', start);
    if (end == std::string::npos) {
        return {};
    }
    return prompt.substr(start, end - start);
}

std::string synthesize_echo(const CompletionRequest& request) {
    const std::string heading = extract_backticked(request.user_text, "heading: `");
    const std::string subsection = extract_backticked(request.user_text, "subsection heading `");
    const bool wants_diagram = request.user_text.find("labeled `plantuml`") != std::string::npos;

    std::string out;
    out.append(heading.empty() ? "## Generated Section" : heading);
    out.append("\n\nThis section was produced by the deterministic mock provider. It restates "
               "the requested goal without consulting a live model, so its prose carries no "
               "architectural claims about the repository.\n");
    if (!subsection.empty()) {
        out.append("\n").append(subsection).append("\n");
    }
    if (wants_diagram) {
        out.append("\n```plantuml\n"
                   "@startuml\n"
                   "actor Caller\n"
                   "rectangle \"Mock System\" as MS\n"
                   "Caller --> MS\n"
                   "@enduml\n"
                   "```\n");
    }
    return out;
}

bool known_step_result(const std::string& result) {
    return result == "ok" || result == "rate-limit" || result == "timeout" ||
           result == "server-error" || result == "auth-failed" || result == "empty";
}

std::vector<MockStep> parse_steps(const json& list) {
    std::vector<MockStep> steps;
    for (const auto& step_json : list) {
        MockStep step;
        step.result = step_json.value("result", std::string("ok"));
        if (!known_step_result(step.result)) {
            throw std::invalid_argument("unknown mock step result: '" + step.result + "'");
        }
        if (step_json.contains("text")) {
            step.text = step_json["text"].get<std::string>();
        }
        step.delay_ms = step_json.value("delay_ms", 0);
        steps.push_back(std::move(step));
    }
    return steps;
}

Usd price_from_json(const json& value) {
    if (value.is_string()) {
        return Usd::parse(value.get<std::string>());
    }
    if (value.is_number()) {
        std::ostringstream formatted;
        formatted.precision(6);
        formatted << std::fixed << value.get<double>();
        return Usd::parse(formatted.str());
    }
    throw std::invalid_argument("price must be a decimal string or number");
}

} // namespace

CompletionResult complete(const CompletionRequest& request, Provider& provider,
                          const RetryPolicy& policy) {
    validate_request(request);
    if (policy.max_attempts < 1) {
        throw std::invalid_argument("max_attempts must be at least 1");
    }

    const auto sleep_fn = policy.sleep_fn
                              ? policy.sleep_fn
                              : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    std::mt19937_64 rng(policy.jitter_seed ? *policy.jitter_seed : std::random_device{}());

    std::string last_error;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        try {
            auto result = provider.send(request);
            if (is_blank(result.text)) {
                throw OutputEmpty("provider returned a blank completion for '" + request.label +
                                  "'");
            }
            result.attempts = attempt;
            return result;
        } catch (const TransientProviderError& err) {
            last_error = err.what();
            if (attempt == policy.max_attempts) {
                break;
            }
            double ceiling_ms = static_cast<double>(policy.base_delay.count());
            for (int i = 1; i < attempt; ++i) {
                ceiling_ms *= policy.backoff_factor;
            }
            std::uniform_int_distribution<std::int64_t> jitter(
                0, std::max<std::int64_t>(0, static_cast<std::int64_t>(ceiling_ms)));
            sleep_fn(std::chrono::milliseconds(jitter(rng)));
        }
    }
    throw ProviderExhausted("gave up after " + std::to_string(policy.max_attempts) +
                            " attempts; last error: " + last_error);
}

// HttpProvider

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {}

CompletionResult HttpProvider::send(const CompletionRequest& request) {
    json body;
    body["model"] = request.model_id;
    body["messages"] = json::array({
        json{{"role", "system"}, {"content", request.system_text}},
        json{{"role", "user"}, {"content", request.user_text}},
    });
    body["max_tokens"] = request.max_output_tokens;
    body["temperature"] = request.temperature;

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    if (!config_.api_key.empty()) {
        client.set_bearer_token_auth(config_.api_key);
    }

    const auto started = std::chrono::steady_clock::now();
    auto response = client.Post(config_.completions_path, body.dump(), "application/json");
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();

    if (!response) {
        throw TransientProviderError("network failure: " + httplib::to_string(response.error()));
    }
    if (response->status == 401 || response->status == 403) {
        throw AuthFailed("provider rejected the credential (HTTP " +
                         std::to_string(response->status) + ")");
    }
    if (response->status == 408 || response->status == 429 || response->status >= 500) {
        throw TransientProviderError("HTTP " + std::to_string(response->status) + ": " +
                                     response->body.substr(0, 200));
    }
    if (response->status != 200) {
        throw ProviderError("HTTP " + std::to_string(response->status) + ": " +
                            response->body.substr(0, 200));
    }

    json parsed;
    try {
        parsed = json::parse(response->body);
    } catch (const json::parse_error& err) {
        throw ProviderError(std::string("unparseable provider response: ") + err.what());
    }

    CompletionResult result;
    try {
        result.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ProviderError("provider response has no choices[0].message.content");
    }
    if (parsed.contains("usage")) {
        result.input_tokens = parsed["usage"].value("prompt_tokens", std::int64_t{0});
        result.output_tokens = parsed["usage"].value("completion_tokens", std::int64_t{0});
    }
    if (result.input_tokens == 0) {
        result.input_tokens = heuristic_tokens(request.system_text) +
                              heuristic_tokens(request.user_text);
    }
    if (result.output_tokens == 0) {
        result.output_tokens = heuristic_tokens(result.text);
    }
    result.latency_ms = latency;
    return result;
}

// MockProvider

MockProvider::MockProvider(const std::string& script_json) {
    json parsed;
    try {
        parsed = json::parse(script_json);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("mock script is not valid JSON: ") + err.what());
    }
    if (!parsed.is_object()) {
        throw std::invalid_argument("mock script must be a JSON object keyed by section id");
    }

    for (const auto& [key, value] : parsed.items()) {
        if (!value.is_array()) {
            throw std::invalid_argument("mock script entry '" + key + "' must be a list of steps");
        }
        scripts_.emplace(key, parse_steps(value));
    }
}

CompletionResult MockProvider::send(const CompletionRequest& request) {
    const int now_in_flight = in_flight_.fetch_add(1) + 1;
    int expected_peak = peak_in_flight_.load();
    while (now_in_flight > expected_peak &&
           !peak_in_flight_.compare_exchange_weak(expected_peak, now_in_flight)) {
    }
    total_sends_.fetch_add(1);

    MockStep step;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = scripts_.find(request.label);
        if (it == scripts_.end()) {
            it = scripts_.find("*");
        }
        if (it != scripts_.end() && !it->second.empty()) {
            const auto position = consumed_[request.label]++;
            step = it->second[std::min(position, it->second.size() - 1)];
        }
    }

    if (step.delay_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(step.delay_ms));
    }
    in_flight_.fetch_sub(1);

    if (step.result == "rate-limit") {
        throw TransientProviderError("scripted rate limit (HTTP 429)");
    }
    if (step.result == "timeout") {
        throw TransientProviderError("scripted timeout");
    }
    if (step.result == "server-error") {
        throw TransientProviderError("scripted server error (HTTP 500)");
    }
    if (step.result == "auth-failed") {
        throw AuthFailed("scripted credential rejection");
    }

    CompletionResult result;
    if (step.result == "empty") {
        result.text.clear();
    } else {
        result.text = step.text ? *step.text : synthesize_echo(request);
    }
    result.input_tokens = heuristic_tokens(request.system_text) +
                          heuristic_tokens(request.user_text);
    result.output_tokens = heuristic_tokens(result.text);
    result.latency_ms = step.delay_ms;
    return result;
}

// Cost accounting

PriceTable PriceTable::parse(const std::string& json_text) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("price table is not valid JSON: ") + err.what());
    }
    if (!parsed.is_object()) {
        throw std::invalid_argument("price table must be a JSON object keyed by model id");
    }

    PriceTable table;
    for (const auto& [model, value] : parsed.items()) {
        ModelPrice price;
        price.input_per_million = price_from_json(value.at("input_per_million"));
        price.output_per_million = price_from_json(value.at("output_per_million"));
        if (price.input_per_million < Usd{} || price.output_per_million < Usd{}) {
            throw std::invalid_argument("prices must be non-negative for model " + model);
        }
        table.models.emplace(model, price);
    }
    return table;
}

PriceTable PriceTable::load(const std::string& path) {
    std::ifstream stream(path);
    if (!stream) {
        throw std::invalid_argument("cannot open price table: " + path);
    }
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return parse(buffer.str());
}

CostReport accumulate_cost(const std::vector<CostCall>& calls, const std::string& model_id,
                           const PriceTable& prices) {
    const auto it = prices.models.find(model_id);
    if (it == prices.models.end()) {
        throw UnknownModelPrice("no price entry for model: " + model_id);
    }
    const auto& price = it->second;

    // tokens * pico-USD-per-million / 10^6; exact when prices carry at most
    // six fraction digits, otherwise rounded to the nearest picodollar.
    const auto cost_side = [](std::int64_t tokens, Usd per_million) {
        const __int128 product = static_cast<__int128>(tokens) * per_million.pico();
        const __int128 rounded = (product + 500000) / 1000000;
        return Usd::from_pico(static_cast<std::int64_t>(rounded));
    };

    CostReport report;
    for (const auto& call : calls) {
        CostLine line;
        line.label = call.label;
        line.input_tokens = call.input_tokens;
        line.output_tokens = call.output_tokens;
        line.usd = cost_side(call.input_tokens, price.input_per_million) +
                   cost_side(call.output_tokens, price.output_per_million);
        report.total_usd += line.usd;
        report.total_input_tokens += call.input_tokens;
        report.total_output_tokens += call.output_tokens;
        report.per_call.push_back(std::move(line));
    }
    return report;
}

} // namespace ciao
