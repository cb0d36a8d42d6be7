#include "atlas/service.hpp"

#include "atlas/error.hpp"
#include "atlas/hashing.hpp"
#include "atlas/narrative_lp.hpp"
#include "atlas/pipeline.hpp"

#include <httplib.h>
#include <json.hpp>

#include <future>
#include <list>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace atlas {

namespace {

using ojson = nlohmann::ordered_json;

// Small LRU of serialized responses keyed by map id.
class ResponseCache {
public:
    explicit ResponseCache(std::size_t capacity) : capacity_(capacity) {}

    void put(const std::string& key, std::string body) {
        std::lock_guard lock(mutex_);
        if (capacity_ == 0) return;
        if (auto it = index_.find(key); it != index_.end()) {
            order_.erase(it->second);
            index_.erase(it);
        }
        order_.emplace_front(key, std::move(body));
        index_[key] = order_.begin();
        while (order_.size() > capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
    }

    std::optional<std::string> get(const std::string& key) {
        std::lock_guard lock(mutex_);
        auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        order_.splice(order_.begin(), order_, it->second);
        return it->second->second;
    }

private:
    std::size_t capacity_;
    std::mutex mutex_;
    std::list<std::pair<std::string, std::string>> order_;
    std::unordered_map<std::string, std::list<std::pair<std::string, std::string>>::iterator> index_;
};

int status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidConfig:
        case ErrorKind::InvalidK:
        case ErrorKind::InvalidClusterCount:
            return 400;
        case ErrorKind::NotFound:
            return 404;
        case ErrorKind::Infeasible:
        case ErrorKind::EmptyFilteredCorpus:
        case ErrorKind::InsufficientEvents:
        case ErrorKind::UnembeddedEvent:
        case ErrorKind::EmptyMap:
            return 422;
        default:
            return 500;
    }
}

void send_json(httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, const std::string& kind,
                const std::string& stage = {}) {
    ojson body;
    body["error"] = message;
    body["kind"] = kind;
    if (!stage.empty()) body["stage"] = stage;
    send_json(res, status, body.dump());
}

}  // namespace

struct Service::Impl {
    Impl(Store s, ServiceOptions o) : store(std::move(s)), options(o), cache(o.cache_capacity) {}

    Store store;
    ServiceOptions options;
    ResponseCache cache;
    httplib::Server server;

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });

        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, R"({"status":"ok"})");
        });

        server.Get("/api/corpora", [this](const httplib::Request&, httplib::Response& res) {
            try {
                ojson list = ojson::array();
                for (const auto& info : store.list_corpora()) {
                    ojson item;
                    item["id"] = info.id;
                    ojson communities = ojson::array();
                    for (const auto& c : info.communities) communities.push_back({{"name", c.name}, {"count", c.count}});
                    item["communities"] = std::move(communities);
                    item["has_embeddings"] = info.has_embeddings;
                    list.push_back(std::move(item));
                }
                ojson body;
                body["corpora"] = std::move(list);
                send_json(res, 200, body.dump());
            } catch (const Error& e) {
                send_error(res, 500, e.what(), to_string(e.kind()));
            }
        });

        server.Post("/api/extract", [this](const httplib::Request& req, httplib::Response& res) { extract(req, res); });

        server.Get(R"(/api/map/([0-9A-Za-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (auto cached = cache.get(id)) return send_json(res, 200, *cached);
            if (auto doc = store.load_map(id)) {
                ojson body;
                body["map_id"] = id;
                body["map"] = ojson::parse(*doc);
                return send_json(res, 200, body.dump());
            }
            send_error(res, 404, "unknown map \"" + id + "\"", to_string(ErrorKind::NotFound));
        });
    }

    void extract(const httplib::Request& req, httplib::Response& res) {
        nlohmann::json request;
        try {
            request = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            return send_error(res, 400, "request body is not valid JSON", to_string(ErrorKind::InvalidConfig));
        }
        if (!request.is_object() || !request.contains("corpus") || !request["corpus"].is_string())
            return send_error(res, 400, "request needs a \"corpus\" id", to_string(ErrorKind::InvalidConfig));
        const std::string corpus_id = request["corpus"].get<std::string>();
        request.erase("corpus");

        ExtractionConfig config;
        try {
            config = config_from_json(request);
            validate(config);
        } catch (const Error& e) {
            return send_error(res, 400, e.what(), to_string(e.kind()), "config");
        }

        // The extraction owns copies of everything it touches, so a timed
        // out request can finish in the background without dangling state.
        using Reply = std::pair<std::string, std::string>;  // response body, map document
        auto task = std::make_shared<std::packaged_task<Reply()>>([store = store, corpus_id, config] {
            const CorpusSet corpora = store.load_corpus(corpus_id);
            const EmbeddingTable embeddings = store.load_embeddings(corpus_id);
            const ExtractionResult result = atlas::extract(config, corpora, embeddings);
            const std::string doc = to_document_text(result.map);
            ojson body;
            body["map_id"] = sha256_hex(doc);
            body["corpus"] = corpus_id;
            body["config"] = config_to_json(config);
            body["map"] = to_document(result.map);
            body["timing"] = result.telemetry.to_json();
            return Reply{body.dump(), doc};
        });
        auto future = task->get_future();
        std::thread([task] { (*task)(); }).detach();

        if (future.wait_for(options.timeout) != std::future_status::ready)
            return send_error(res, 504, "extraction timed out", "timeout");
        try {
            auto [body, doc] = future.get();
            cache.put(store.put_map(doc), body);
            send_json(res, 200, body);
        } catch (const Error& e) {
            ojson err;
            err["error"] = e.what();
            err["kind"] = to_string(e.kind());
            if (!e.stage().empty()) err["stage"] = e.stage();
            if (e.kind() == ErrorKind::Infeasible) {
                const std::string msg = e.what();
                err["constraint_class"] = msg.substr(0, msg.find(" constraint infeasible"));
                err["guidance"] = "lower minscore or mincover";
            }
            send_json(res, status_for(e.kind()), err.dump());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what(), "internal");
        }
    }
};

Service::Service(Store store, ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(store), options)) {
    impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind() {
    if (impl_->options.port == 0) return impl_->server.bind_to_any_port(impl_->options.host);
    return impl_->server.bind_to_port(impl_->options.host, impl_->options.port) ? impl_->options.port : -1;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace atlas
