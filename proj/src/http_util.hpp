#pragma once
// Internal HTTP plumbing shared by the remote embedding and chat clients.

#include "narrlens/common.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

namespace narrlens::detail {

// Splits "http://host:port/path" into client base and request path.
inline void split_endpoint(const std::string& endpoint, std::string& base, std::string& path) {
    std::size_t scheme = endpoint.find("://");
    std::size_t authority_start = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t slash = endpoint.find('/', authority_start);
    if (slash == std::string::npos) {
        base = endpoint;
        path = "/";
    } else {
        base = endpoint.substr(0, slash);
        path = endpoint.substr(slash);
    }
}

inline httplib::Headers auth_headers() {
    httplib::Headers headers;
    if (const char* key = std::getenv("NARRLENS_API_KEY")) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    return headers;
}

// POST with bounded retries and exponential backoff; returns the body.
inline std::string post_json_with_retries(const std::string& endpoint, const std::string& body,
                                          int timeout_ms, int retries) {
    std::string base, path;
    split_endpoint(endpoint, base, path);
    std::string last_error;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50 << (attempt - 1)));
        }
        httplib::Client client(base);
        client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        auto res = client.Post(path, auth_headers(), body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            continue;
        }
        return res->body;
    }
    throw Error("request to " + endpoint + " failed after " + std::to_string(retries + 1) +
                " attempts; last error: " + last_error);
}

} // namespace narrlens::detail
