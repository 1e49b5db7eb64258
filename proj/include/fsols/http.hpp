#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace fsols {

struct HttpResponse {
    int status = 0;  // 0 = transport failure (no response)
    std::string body;
};

/// Minimal GET-only transport. Implementations must be safe to call from one thread at a time.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

/// Live HTTP(S) transport over cpp-httplib.
class LiveTransport : public HttpTransport {
public:
    explicit LiveTransport(std::chrono::seconds timeout = std::chrono::seconds(30));
    HttpResponse get(const std::string& url) override;

private:
    std::chrono::seconds timeout_;
};

/// Replays recorded responses.
///
/// The fixture directory holds an `index.json`:
///
///     {"requests": [
///        {"url": "...", "status": 200, "body_file": "esummary_12345.json"},
///        {"url": "...", "status": 200, "body": [ ... ]},
///        {"url": "...", "responses": [{"status": 500}, {"status": 200, "body": "..."}]}
///     ]}
///
/// `body` may be a JSON string (served verbatim) or any other JSON value
/// (served serialized). With `responses`, calls walk the list and then repeat
/// the last entry. Unknown urls produce a ServiceError.
class FixtureTransport : public HttpTransport {
public:
    explicit FixtureTransport(const std::filesystem::path& dir);
    HttpResponse get(const std::string& url) override;

    std::size_t calls() const { return calls_; }

private:
    struct Entry {
        std::vector<HttpResponse> responses;
        std::size_t served = 0;
    };
    std::map<std::string, Entry> entries_;
    std::size_t calls_ = 0;
};

/// Enforces a minimum interval between requests.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second);
    void acquire();

private:
    std::chrono::steady_clock::duration interval_;
    std::chrono::steady_clock::time_point next_{};
    std::mutex mutex_;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_factor = 2.0;
};

/// GET with retries on transport failures, 429 and 5xx. Any other status is
/// returned to the caller. Throws ServiceError once retries are exhausted.
HttpResponse get_with_retry(HttpTransport& transport, const std::string& url, const RetryPolicy& policy,
                            RateLimiter* limiter = nullptr);

std::string url_encode(const std::string& s);

}  // namespace fsols
