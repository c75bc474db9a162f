#include "chunkcrew/llm_client.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "chunkcrew/errors.hpp"

namespace crew {

std::string chat_completion(const LLMEndpointConfig& config, const std::string& system_prompt,
                            const std::string& user_prompt) {
  if (config.base_url.empty()) throw ConfigError("endpoint base_url is empty");

  httplib::Headers headers;
  if (!config.api_key_env.empty()) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("API key environment variable '" + config.api_key_env +
                        "' is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  nlohmann::json body;
  body["model"] = config.model_name;
  body["temperature"] = config.temperature;
  auto& messages = body["messages"] = nlohmann::json::array();
  if (!system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", user_prompt}});
  const std::string payload = body.dump();

  httplib::Client client(config.base_url);
  const auto timeout_ms = static_cast<int>(config.timeout_s * 1000.0);
  client.set_connection_timeout(0, timeout_ms * 1000);
  client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);

  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(config.retry_backoff_ms << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    auto res = client.Post("/v1/chat/completions", headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      auto j = nlohmann::json::parse(res->body, nullptr, false);
      if (j.is_discarded()) {
        throw ProtocolError("chat-completions response is not valid JSON", res->body);
      }
      try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw ProtocolError("chat-completions response missing choices[0].message.content",
                            res->body);
      }
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw EndpointError("chat-completions request failed with HTTP " +
                        std::to_string(res->status));
  }
  throw EndpointError("chat-completions request failed after " +
                      std::to_string(config.max_retries + 1) + " attempts (" + last_error +
                      ")");
}

}  // namespace crew
