#include "shortkit/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <stdexcept>

namespace shortkit {

namespace {

using Reply = Service::Reply;

Reply error(int status, const std::string& code, const std::string& message, Json extra = {}) {
    Json j;
    j["code"] = code;
    j["message"] = message;
    if (extra.is_object())
        for (auto& [k, v] : extra.items()) j[k] = v;
    return {status, dump(j)};
}

Reply ok(const Json& j, int status = 200) { return {status, dump(j)}; }

Json parse_body(const std::string& body) {
    try {
        return Json::parse(body.empty() ? std::string("{}") : body);
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed JSON body: ") + e.what());
    }
}

Json validation_json(const std::vector<Violation>& v) {
    Json j;
    j["valid"] = v.empty();
    Json list = Json::array();
    for (const auto& x : v) list.push_back({{"subject", x.subject}, {"rule", x.rule}});
    j["violations"] = std::move(list);
    return j;
}

// Maps library exceptions onto the error contract.
template <class F>
Reply guarded(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        return error(400, "bad_request", e.what());
    } catch (const ModelError& e) {
        return error(400, "bad_request", e.what());
    } catch (const ParseError& e) {
        return error(400, "bad_request", e.what());
    } catch (const std::exception& e) {
        return error(500, "internal", e.what());
    }
}

}  // namespace

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {}
Service::~Service() = default;

std::shared_ptr<Session> Service::find(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

Json Service::session_json(Session& s) {
    Json j;
    j["id"] = s.id;
    j["model_id"] = s.model_id;
    j["seed"] = s.seed;
    j["pinned"] = to_json(*s.model, s.pinned);
    Json obj = Json::array();
    for (std::size_t k = 0; k < kObjectives; ++k)
        if (s.objectives.on[k]) obj.push_back(kObjectiveNames[k]);
    j["objectives"] = std::move(obj);
    j["stale"] = s.stale;
    j["running"] = s.running;
    j["results"] = s.results ? to_json(*s.model, *s.results) : Json(nullptr);
    return j;
}

Reply Service::post_model(const std::string& body) {
    return guarded([&] {
        GoalModel m;
        try {
            m = parse_model_any(body, false);
        } catch (const std::exception& e) {
            Json v;
            v["valid"] = false;
            v["violations"] = Json::array({{{"subject", "input"}, {"rule", e.what()}}});
            return error(400, "invalid_model", e.what(), {{"validation", v}});
        }
        auto bad = validate(m);
        if (!bad.empty())
            return error(400, "invalid_model", "model violates " + std::to_string(bad.size()) + " rule(s)",
                         {{"validation", validation_json(bad)}});
        Json j;
        {
            std::lock_guard lock(mu_);
            const auto id = "m" + std::to_string(next_model_++);
            j["model_id"] = id;
            models_[id] = std::make_shared<const GoalModel>(m);
        }
        j["validation"] = validation_json(bad);
        j["nodes"] = m.node_count();
        j["edges"] = m.edge_count();
        j["leaves"] = m.leaves().size();
        return ok(j, 201);
    });
}

Reply Service::create_session(const std::string& body) {
    return guarded([&] {
        auto b = parse_body(body);
        if (!b.is_object() || !b.contains("model_id") || !b["model_id"].is_string())
            return error(400, "bad_request", "body needs a model_id string");
        const auto mid = b["model_id"].get<std::string>();
        std::shared_ptr<const GoalModel> model;
        {
            std::lock_guard lock(mu_);
            auto it = models_.find(mid);
            if (it == models_.end()) return error(404, "not_found", "unknown model '" + mid + "'");
            model = it->second;
        }
        auto s = std::make_shared<Session>();
        s->model_id = mid;
        s->model = model;
        try {
            if (b.contains("seed")) s->seed = b["seed"].get<std::uint64_t>();
        } catch (const Json::exception&) {
            return error(400, "bad_request", "seed must be an unsigned integer");
        }
        if (b.contains("config")) s->config = parse_run_config(b["config"]);
        s->costs = sample_costs(*model, cost_seed(s->seed));
        {
            std::lock_guard lock(mu_);
            s->id = "s" + std::to_string(next_session_++);
            sessions_[s->id] = s;
        }
        std::lock_guard lock(s->state);
        return ok(session_json(*s), 201);
    });
}

Reply Service::add_pin(const std::string& id, const std::string& body) {
    return guarded([&] {
        auto s = find(id);
        if (!s) return error(404, "not_found", "unknown session '" + id + "'");
        auto b = parse_body(body);
        if (!b.is_object() || !b.contains("decision") || !b["decision"].is_string())
            return error(400, "invalid_pin", "body needs a decision (leaf id)");
        const auto node_id = b["decision"].get<std::string>();
        auto n = s->model->find(node_id);
        if (!n || s->model->kind(*n) != NodeKind::Leaf)
            return error(400, "invalid_pin", "'" + node_id + "' is not a leaf of this model");
        Label pol = Label::Satisfied;
        const auto p = b.contains("polarity") && b["polarity"].is_string() ? b["polarity"].get<std::string>()
                                                                          : std::string("satisfied");
        if (p == "denied")
            pol = Label::Denied;
        else if (p != "satisfied")
            return error(400, "invalid_pin", "polarity must be satisfied or denied");

        std::lock_guard lock(s->state);
        auto it = std::find_if(s->pinned.begin(), s->pinned.end(), [&](const Decision& d) { return d.node == *n; });
        if (it != s->pinned.end())
            it->polarity = pol;
        else
            s->pinned.push_back({*n, pol});
        s->stale = true;
        ++s->version;
        return ok(session_json(*s));
    });
}

Reply Service::remove_pin(const std::string& id, const std::string& node) {
    return guarded([&] {
        auto s = find(id);
        if (!s) return error(404, "not_found", "unknown session '" + id + "'");
        std::lock_guard lock(s->state);
        auto it = std::find_if(s->pinned.begin(), s->pinned.end(),
                               [&](const Decision& d) { return s->model->node(d.node).id == node; });
        if (it == s->pinned.end()) return error(404, "not_found", "'" + node + "' is not pinned");
        s->pinned.erase(it);
        s->stale = true;
        ++s->version;
        return ok(session_json(*s));
    });
}

Reply Service::set_objectives(const std::string& id, const std::string& body) {
    return guarded([&] {
        auto s = find(id);
        if (!s) return error(404, "not_found", "unknown session '" + id + "'");
        auto b = parse_body(body);
        if (!b.is_object() || !b.contains("enabled") || !b["enabled"].is_array())
            return error(400, "bad_request", "body needs an enabled array");
        std::string csv;
        for (const auto& e : b["enabled"]) {
            if (!e.is_string()) return error(400, "bad_request", "objective names must be strings");
            csv += e.get<std::string>() + ",";
        }
        auto mask = parse_objectives(csv);
        if (!mask.any()) return error(400, "bad_request", "at least one objective must stay enabled");
        std::lock_guard lock(s->state);
        if (!(mask == s->objectives)) {
            s->objectives = mask;
            s->stale = true;
            ++s->version;
        }
        return ok(session_json(*s));
    });
}

Reply Service::run(const std::string& id) {
    return guarded([&] {
        auto s = find(id);
        if (!s) return error(404, "not_found", "unknown session '" + id + "'");
        std::unique_lock run_lock(s->run, std::try_to_lock);
        if (!run_lock.owns_lock()) return error(409, "run_in_progress", "a run is already in progress");

        PipelineConfig cfg;
        Prior pinned;
        std::uint64_t v0;
        {
            std::lock_guard lock(s->state);
            cfg = s->config.pipeline;
            cfg.objectives = s->objectives;
            pinned = s->pinned;
            v0 = s->version;
            s->running = true;
        }
        PipelineResult r;
        try {
            r = run_pipeline(*s->model, s->costs, cfg, s->seed, pinned);
        } catch (...) {
            std::lock_guard lock(s->state);
            s->running = false;
            throw;
        }
        auto body = dump(to_json(*s->model, r));
        std::lock_guard lock(s->state);
        s->results = std::move(r);
        s->stale = s->version != v0;  // pins moved while we ran
        s->running = false;
        return Reply{200, std::move(body)};
    });
}

Reply Service::get(const std::string& id) {
    auto s = find(id);
    if (!s) return error(404, "not_found", "unknown session '" + id + "'");
    std::lock_guard lock(s->state);
    return ok(session_json(*s));
}

Reply Service::curve_csv(const std::string& id) {
    auto s = find(id);
    if (!s) return error(404, "not_found", "unknown session '" + id + "'");
    std::lock_guard lock(s->state);
    if (!s->results) return error(409, "no_results", "session has not been run");
    return {200, shortkit::curve_csv(s->results->curve), "text/csv"};
}

void Service::mount(httplib::Server& server) {
    auto send = [](httplib::Response& res, const Reply& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.set_default_headers({{"Access-Control-Allow-Origin", cfg_.cors_origin}});
    server.set_read_timeout(cfg_.run_timeout_seconds, 0);
    server.set_write_timeout(cfg_.run_timeout_seconds, 0);
    server.Options(".*", [this](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.Post("/models", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, post_model(req.body));
    });
    server.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, create_session(req.body));
    });
    server.Get(R"(/sessions/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, get(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/curve\.csv)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                   send(res, curve_csv(req.matches[1]));
               });
    server.Post(R"(/sessions/([^/]+)/pins)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, add_pin(req.matches[1], req.body));
    });
    server.Delete(R"(/sessions/([^/]+)/pins/([^/]+))",
                  [this, send](const httplib::Request& req, httplib::Response& res) {
                      send(res, remove_pin(req.matches[1], req.matches[2]));
                  });
    server.Post(R"(/sessions/([^/]+)/objectives)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                    send(res, set_objectives(req.matches[1], req.body));
                });
    server.Post(R"(/sessions/([^/]+)/run)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, run(req.matches[1]));
    });
    if (!cfg_.static_dir.empty() && !server.set_mount_point("/", cfg_.static_dir))
        throw std::runtime_error("cannot serve static files from " + cfg_.static_dir);
    // unmatched routes and other bodiless errors still answer in JSON
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        const auto r = error(res.status, res.status == 404 ? "not_found" : "error",
                             httplib::status_message(res.status));
        res.set_content(r.body, r.content_type);
        return httplib::Server::HandlerResponse::Handled;
    });
}

void serve(const ServiceConfig& cfg, const std::string& host, int port) {
    Service svc(cfg);
    httplib::Server server;
    svc.mount(server);
    if (!server.listen(host, port))
        throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace shortkit
