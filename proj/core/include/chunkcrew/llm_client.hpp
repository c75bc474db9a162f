#pragma once

#include <string>

namespace crew {

struct LLMEndpointConfig {
  std::string base_url;                        // e.g. "http://127.0.0.1:8080"
  std::string model_name = "gpt-3.5-turbo";
  std::string api_key_env = "CHUNKCREW_API_KEY";  // empty => no auth header
  double temperature = 0.0;
  double timeout_s = 30.0;
  int max_retries = 2;
  int retry_backoff_ms = 100;  // doubled per attempt
};

/// POST {base_url}/v1/chat/completions and return choices[0].message.content.
/// Retries transient failures (connection errors, 429, 5xx) with exponential
/// backoff up to max_retries. Throws ConfigError when the API key variable is
/// set but unresolvable, EndpointError on exhausted retries or hard HTTP
/// failures, ProtocolError on a malformed response body.
std::string chat_completion(const LLMEndpointConfig& config, const std::string& system_prompt,
                            const std::string& user_prompt);

}  // namespace crew
