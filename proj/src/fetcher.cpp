#include "termscribe/fetcher.hpp"

#include <thread>

#include "httplib.h"

namespace termscribe {

std::string url_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (ascii_alnum(static_cast<char>(c)) || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

namespace {

struct UrlParts {
  std::string scheme_host_port;  // e.g. "http://example.com:8080"
  std::string host;
  std::string path_query;  // "/a/b?q=1", never empty
};

std::optional<UrlParts> parse_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  std::string scheme = to_lower(url.substr(0, scheme_end));
  if (scheme != "http" && scheme != "https") return std::nullopt;
  std::size_t host_start = scheme_end + 3;
  std::size_t path_start = url.find_first_of("/?#", host_start);
  UrlParts parts;
  if (path_start == std::string::npos) {
    parts.scheme_host_port = url;
    parts.path_query = "/";
  } else {
    parts.scheme_host_port = url.substr(0, path_start);
    parts.path_query = url[path_start] == '/' ? url.substr(path_start)
                                              : "/" + url.substr(path_start);
    std::size_t frag = parts.path_query.find('#');
    if (frag != std::string::npos) parts.path_query.resize(frag);
    if (parts.path_query.empty()) parts.path_query = "/";
  }
  std::string hostport = parts.scheme_host_port.substr(host_start);
  std::size_t colon = hostport.find(':');
  parts.host = colon == std::string::npos ? hostport : hostport.substr(0, colon);
  return parts;
}

}  // namespace

Fetcher::Fetcher(double rate_limit_rps, std::chrono::milliseconds timeout,
                 std::string user_agent)
    : rate_limit_(rate_limit_rps),
      timeout_(timeout),
      user_agent_(std::move(user_agent)) {}

void Fetcher::wait_for_slot(const std::string& host) {
  if (rate_limit_ <= 0) return;
  auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / rate_limit_));
  std::chrono::steady_clock::time_point wake;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto now = std::chrono::steady_clock::now();
    auto& next = next_allowed_[host];
    wake = std::max(now, next);
    next = wake + interval;
  }
  std::this_thread::sleep_until(wake);
}

std::optional<RawPage> Fetcher::fetch(const std::string& url, Report* rep) {
  auto parts = parse_url(url);
  if (!parts) {
    report(rep, url + ": unsupported or malformed url, skipped");
    return std::nullopt;
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (parts->scheme_host_port.rfind("https", 0) == 0) {
    report(rep, url + ": https not supported in this build, skipped");
    return std::nullopt;
  }
#endif
  wait_for_slot(parts->host);

  httplib::Client client(parts->scheme_host_port);
  client.set_follow_location(true);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_default_headers({{"User-Agent", user_agent_}});

  auto res = client.Get(parts->path_query);
  if (!res) {
    report(rep, url + ": fetch failed (" + httplib::to_string(res.error()) +
                    "), skipped");
    return std::nullopt;
  }
  if (res->status != 200) {
    report(rep, url + ": http status " + std::to_string(res->status) +
                    ", skipped");
    return std::nullopt;
  }

  std::string charset;
  if (auto it = res->headers.find("Content-Type"); it != res->headers.end()) {
    std::string ct = to_lower(it->second);
    std::size_t pos = ct.find("charset=");
    if (pos != std::string::npos) {
      std::size_t end = ct.find_first_of("; \t", pos + 8);
      charset = ct.substr(pos + 8, end == std::string::npos ? std::string::npos
                                                            : end - pos - 8);
    }
  }

  RawPage page;
  page.url = url;
  page.content = decode_to_utf8(res->body, charset, rep, url);
  page.retrieved_at = std::chrono::system_clock::now();
  return page;
}

}  // namespace termscribe
