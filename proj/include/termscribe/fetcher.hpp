#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "termscribe/common.hpp"
#include "termscribe/corpus.hpp"

namespace termscribe {

std::string url_encode(std::string_view s);

// HTTP GET with per-host rate limiting. Non-200 responses and transport
// errors are skip-and-report, never exceptions.
class Fetcher {
 public:
  Fetcher(double rate_limit_rps, std::chrono::milliseconds timeout,
          std::string user_agent);

  std::optional<RawPage> fetch(const std::string& url, Report* rep = nullptr);

 private:
  void wait_for_slot(const std::string& host);

  double rate_limit_;
  std::chrono::milliseconds timeout_;
  std::string user_agent_;
  std::mutex mu_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_allowed_;
};

}  // namespace termscribe
