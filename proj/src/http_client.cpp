#include <httplib.h>

#include <json.hpp>

#include "ontoreveal/llm.hpp"

namespace ontoreveal {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint is not an http(s) URL: " + url);
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw std::invalid_argument("unsupported endpoint scheme: " + scheme);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool is_transient(int status) { return status == 408 || status == 429 || status >= 500; }

class HttpChatConnection final : public LlmConnection {
 public:
  explicit HttpChatConnection(const LlmProvider& provider)
      : url_(split_url(*provider.endpoint)),
        model_(*provider.model),
        api_key_(provider.api_key),
        timeout_(provider.timeout_seconds),
        max_retries_(provider.max_retries) {}

  std::string call(Phase /*phase*/, const std::string& prompt) override {
    json request = {
        {"model", model_},
        {"temperature", 0},
        {"top_p", 1},
        {"messages",
         json::array({{{"role", "system"}, {"content", std::string(kSystemMessage)}},
                      {{"role", "user"}, {"content", prompt}}})},
    };
    const std::string body = request.dump();

    httplib::Client client(url_.origin);
    auto seconds = static_cast<time_t>(timeout_);
    auto micros = static_cast<time_t>((timeout_ - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers headers;
    if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);

    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
      auto res = client.Post(url_.path, headers, body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (is_transient(res->status)) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        throw ProviderError("endpoint returned HTTP " + std::to_string(res->status));
      }
      return extract_content(res->body);
    }
    throw ProviderError("endpoint unreachable after " + std::to_string(max_retries_ + 1) +
                        " attempt(s): " + last_error);
  }

  std::string settings() const override {
    return "model=" + model_ + ", temperature=0, top_p=1";
  }

 private:
  static std::string extract_content(const std::string& body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ProviderError("endpoint response is not a JSON object");
    auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) {
      throw ProviderError("endpoint response has no choices");
    }
    const auto& first = (*choices)[0];
    if (first.contains("message") && first["message"].is_object() && first["message"].contains("content") &&
        first["message"]["content"].is_string()) {
      return first["message"]["content"].get<std::string>();
    }
    if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
    throw ProviderError("endpoint response's first choice has no text");
  }

  SplitUrl url_;
  std::string model_;
  std::optional<std::string> api_key_;
  double timeout_;
  int max_retries_;
};

}  // namespace

std::unique_ptr<LlmConnection> open_live_connection(const LlmProvider& provider) {
  return std::make_unique<HttpChatConnection>(provider);
}

}  // namespace ontoreveal
