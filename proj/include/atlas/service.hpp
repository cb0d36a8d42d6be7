#pragma once

#include "atlas/store.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace atlas {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080;                         // 0 picks a free port
    std::chrono::milliseconds timeout{60000};  // per extraction request
    std::size_t cache_capacity = 64;         // replayable responses kept in memory
};

/// HTTP front end over a store:
///   GET  /healthz
///   GET  /api/corpora
///   POST /api/extract   {"corpus": id, ...config keys}
///   GET  /api/map/{id}
class Service {
public:
    Service(Store store, ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the socket; returns the bound port or -1.
    int bind();
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace atlas
