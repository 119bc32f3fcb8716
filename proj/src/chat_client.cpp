#include "cuefuse/chat_client.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cuefuse/digest.hpp"
#include "cuefuse/error.hpp"

namespace cuefuse {

std::string chat_request_body(const ChatRequest& request) {
    nlohmann::ordered_json body;
    body["model"] = request.model;
    body["messages"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});
    if (request.temperature) body["temperature"] = *request.temperature;
    return body.dump();
}

std::string chat_response_text(const std::string& body) {
    try {
        const auto j = nlohmann::json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::TransportError,
                    std::string("unexpected chat-completion response: ") + e.what());
    }
}

HttpChatClient::HttpChatClient(ProviderProfile profile, std::string api_key)
    : profile_(std::move(profile)), api_key_(std::move(api_key)) {
    const std::string& url = profile_.endpoint_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorKind::ConfigError, "endpoint_url must include a scheme: '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string HttpChatClient::complete(const ChatRequest& request) {
    httplib::Client http(scheme_host_port_);
    const auto seconds = static_cast<time_t>(request.timeout_s);
    const auto micros = static_cast<time_t>((request.timeout_s - static_cast<double>(seconds)) * 1e6);
    http.set_connection_timeout(seconds, micros);
    http.set_read_timeout(seconds, micros);
    http.set_write_timeout(seconds, micros);

    httplib::Headers headers;
    if (!profile_.auth_header.empty()) {
        headers.emplace(profile_.auth_header, profile_.auth_prefix + api_key_);
    }
    auto res = http.Post(path_, headers, chat_request_body(request), "application/json");
    if (!res) {
        throw Error(ErrorKind::TransportError,
                    "request to " + profile_.endpoint_url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error(ErrorKind::TransportError, "request to " + profile_.endpoint_url +
                                                   " returned HTTP " + std::to_string(res->status));
    }
    return chat_response_text(res->body);
}

ReplayChatClient::ReplayChatClient(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) {
        if (e.texts.empty()) throw Error(ErrorKind::ParseError, "replay entry has no texts");
        if (!e.prompt_sha256 && e.contains.empty()) {
            throw Error(ErrorKind::ParseError, "replay entry needs prompt_sha256 or contains");
        }
    }
}

ReplayChatClient ReplayChatClient::from_json_text(const std::string& text, const std::string& source) {
    try {
        const auto j = nlohmann::json::parse(text);
        std::vector<Entry> entries;
        for (const auto& item : j.at("responses")) {
            Entry e;
            if (item.contains("prompt_sha256")) e.prompt_sha256 = item.at("prompt_sha256").get<std::string>();
            if (item.contains("contains")) e.contains = item.at("contains").get<std::vector<std::string>>();
            e.texts = item.at("texts").get<std::vector<std::string>>();
            entries.push_back(std::move(e));
        }
        return ReplayChatClient(std::move(entries));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, source + ": bad replay fixture: " + e.what());
    }
}

ReplayChatClient ReplayChatClient::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open replay fixture '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path);
}

std::string ReplayChatClient::complete(const ChatRequest& request) {
    const std::string hash = sha256_hex(request.prompt);
    for (const auto& e : entries_) {
        if (e.prompt_sha256 && *e.prompt_sha256 == hash) {
            return e.texts[request.draw_index % e.texts.size()];
        }
    }
    for (const auto& e : entries_) {
        if (e.prompt_sha256 || e.contains.empty()) continue;
        bool all = true;
        for (const auto& needle : e.contains) {
            if (request.prompt.find(needle) == std::string::npos) {
                all = false;
                break;
            }
        }
        if (all) return e.texts[request.draw_index % e.texts.size()];
    }
    throw Error(ErrorKind::TransportError, "replay fixture has no response for prompt " + hash);
}

std::string OfflineChatClient::complete(const ChatRequest& request) {
    throw Error(ErrorKind::TransportError,
                "offline mode: no cached sample or replay fixture for model '" + request.model + "'");
}

}  // namespace cuefuse
