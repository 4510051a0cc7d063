// HTTP/JSON what-if service: models, sessions with pins and objective
// toggles, and synchronous pipeline runs. A thin shell over the library; a
// run equals the CLI `keys`/`test` output for the same inputs.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "shortkit/config.hpp"
#include "shortkit/report.hpp"

namespace httplib {
class Server;
}

namespace shortkit {

struct ServiceConfig {
    std::string cors_origin = "*";
    std::string static_dir;  // served at / when set
    int run_timeout_seconds = 600;  // socket timeouts around a synchronous run
};

struct Session {
    std::string id;
    std::string model_id;
    std::shared_ptr<const GoalModel> model;
    CostAssignment costs;
    std::uint64_t seed = 1;
    RunConfig config;
    Prior pinned;  // insertion order
    ObjectiveMask objectives;
    std::optional<PipelineResult> results;
    bool stale = true;
    bool running = false;
    std::uint64_t version = 0;  // bumped by every state change

    std::mutex state;  // guards the fields above
    std::mutex run;    // held for the duration of a run
};

class Service {
public:
    explicit Service(ServiceConfig cfg = {});
    ~Service();

    // Registers routes, CORS handling and timeouts on `server`.
    void mount(httplib::Server& server);

    struct Reply {
        int status = 200;
        std::string body;
        std::string content_type = "application/json";
    };
    Reply post_model(const std::string& body);
    Reply create_session(const std::string& body);
    Reply add_pin(const std::string& id, const std::string& body);
    Reply remove_pin(const std::string& id, const std::string& node);
    Reply set_objectives(const std::string& id, const std::string& body);
    Reply run(const std::string& id);
    Reply get(const std::string& id);
    Reply curve_csv(const std::string& id);

private:
    std::shared_ptr<Session> find(const std::string& id);
    Json session_json(Session& s);  // caller holds s.state

    ServiceConfig cfg_;
    std::mutex mu_;  // guards the maps and counters
    std::map<std::string, std::shared_ptr<const GoalModel>> models_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_model_ = 1, next_session_ = 1;
};

// Blocks serving on host:port until the process is stopped.
void serve(const ServiceConfig& cfg, const std::string& host, int port);

}  // namespace shortkit
