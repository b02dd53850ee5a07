#ifndef RESCYC_NET_HPP
#define RESCYC_NET_HPP

// Live HTTP transport. Kept out of the core headers so only targets that
// actually talk to the network pull in cpp-httplib and OpenSSL.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <string>

#include "rescyc/ingest.hpp"

namespace rescyc {

class LiveHttpTransport : public HttpTransport {
public:
  HttpResponse get(const std::string& url) override {
    const auto split = url.find('/', url.find("://") + 3);
    const std::string origin = split == std::string::npos ? url : url.substr(0, split);
    const std::string path = split == std::string::npos ? "/" : url.substr(split);
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(15);
    client.set_read_timeout(30);
    auto result = client.Get(path);
    if (!result) return {0, to_string(result.error())};
    return {result->status, result->body};
  }
};

} // namespace rescyc

#endif // RESCYC_NET_HPP
