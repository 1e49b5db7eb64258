#include "fsols/http.hpp"

#include "fsols/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <thread>

namespace fsols {

using nlohmann::json;

LiveTransport::LiveTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse LiveTransport::get(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ServiceError("malformed url: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_.count(), 0);
    client.set_read_timeout(timeout_.count(), 0);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) return {0, httplib::to_string(res.error())};
    return {res->status, res->body};
}

FixtureTransport::FixtureTransport(const std::filesystem::path& dir) {
    const auto index_path = dir / "index.json";
    std::ifstream in(index_path);
    if (!in) throw DataError("fixture index not found: " + index_path.string());
    json index;
    try {
        index = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("fixture index " + index_path.string() + ": " + e.what());
    }
    auto read_one = [&](const json& spec) {
        HttpResponse r;
        r.status = spec.value("status", 200);
        if (spec.contains("body_file")) {
            std::ifstream body(dir / spec["body_file"].get<std::string>(), std::ios::binary);
            if (!body) throw DataError("fixture body missing: " + spec["body_file"].get<std::string>());
            std::ostringstream ss;
            ss << body.rdbuf();
            r.body = ss.str();
        } else if (spec.contains("body")) {
            r.body = spec["body"].is_string() ? spec["body"].get<std::string>() : spec["body"].dump();
        }
        return r;
    };
    for (const auto& req : index.at("requests")) {
        Entry entry;
        if (req.contains("responses")) {
            for (const auto& r : req["responses"]) entry.responses.push_back(read_one(r));
        } else {
            entry.responses.push_back(read_one(req));
        }
        if (entry.responses.empty()) throw DataError("fixture without responses: " + req.value("url", ""));
        entries_[req.at("url").get<std::string>()] = std::move(entry);
    }
}

HttpResponse FixtureTransport::get(const std::string& url) {
    ++calls_;
    const auto it = entries_.find(url);
    if (it == entries_.end()) throw ServiceError("no fixture recorded for " + url);
    Entry& e = it->second;
    const std::size_t idx = std::min(e.served, e.responses.size() - 1);
    ++e.served;
    return e.responses[idx];
}

RateLimiter::RateLimiter(double requests_per_second)
    : interval_(requests_per_second > 0
                    ? std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(1.0 / requests_per_second))
                    : std::chrono::steady_clock::duration::zero()) {}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

HttpResponse get_with_retry(HttpTransport& transport, const std::string& url, const RetryPolicy& policy,
                            RateLimiter* limiter) {
    auto backoff = policy.initial_backoff;
    HttpResponse last;
    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::chrono::milliseconds::rep>(backoff.count() * policy.backoff_factor));
        }
        if (limiter) limiter->acquire();
        last = transport.get(url);
        const bool retryable = last.status == 0 || last.status == 429 || last.status >= 500;
        if (!retryable) return last;
    }
    std::ostringstream msg;
    msg << "GET " << url << " failed after " << policy.max_retries << " retries (last status " << last.status << ")";
    throw ServiceError(msg.str());
}

std::string url_encode(const std::string& s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (const unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/' || c == ':') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 15]);
        }
    }
    return out;
}

}  // namespace fsols
