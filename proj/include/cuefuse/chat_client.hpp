#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cuefuse {

/// One single-turn chat-completion request.
struct ChatRequest {
    std::string model;
    std::string prompt;
    std::optional<double> temperature;  // absent: provider default
    double timeout_s = 60.0;
    /// Deterministic draw number for this request within a query. Replay
    /// clients use it to pick a response independent of scheduling order.
    std::size_t draw_index = 0;
};

/// Chat-completion endpoint. Implementations must be safe to call from
/// several threads at once. Failures are reported as TransportError.
class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Wire settings for an OpenAI-style chat-completions endpoint.
struct ProviderProfile {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
};

/// JSON request body sent by HttpChatClient.
[[nodiscard]] std::string chat_request_body(const ChatRequest& request);
/// Extracts choices[0].message.content. Throws TransportError.
[[nodiscard]] std::string chat_response_text(const std::string& body);

class HttpChatClient final : public ChatClient {
  public:
    HttpChatClient(ProviderProfile profile, std::string api_key);
    std::string complete(const ChatRequest& request) override;

  private:
    ProviderProfile profile_;
    std::string api_key_;
    std::string scheme_host_port_;
    std::string path_;
};

/// Serves canned responses from a fixture file:
///
///   {"responses": [
///      {"prompt_sha256": "<hex>", "texts": ["...", ...]},
///      {"contains": ["substring", ...], "texts": ["...", ...]}]}
///
/// The first entry whose hash equals the prompt's SHA-256, or whose substrings
/// all occur in the prompt, answers with texts[draw_index % texts.size()].
/// Exact-hash entries are tried before substring entries.
class ReplayChatClient final : public ChatClient {
  public:
    struct Entry {
        std::optional<std::string> prompt_sha256;
        std::vector<std::string> contains;
        std::vector<std::string> texts;
    };

    explicit ReplayChatClient(std::vector<Entry> entries);
    /// Throws ParseError / IoError.
    static ReplayChatClient from_file(const std::string& path);
    static ReplayChatClient from_json_text(const std::string& text, const std::string& source);

    std::string complete(const ChatRequest& request) override;

    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

  private:
    std::vector<Entry> entries_;
};

/// Client that refuses every request; stands in when offline runs must be
/// served entirely from the sample cache.
class OfflineChatClient final : public ChatClient {
  public:
    std::string complete(const ChatRequest& request) override;
};

}  // namespace cuefuse
