#include "profilernet/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include "profilernet/error.hpp"
#include "profilernet/io.hpp"
#include "profilernet/profiling.hpp"

namespace profilernet::service {

using json = nlohmann::ordered_json;

namespace {

ApiResponse error_response(const std::string& code, const std::string& message) {
  json j;
  j["error"] = {{"code", code}, {"message", message}};
  return {400, j.dump()};
}

// Maps library errors onto the API's error codes.
template <class Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const UnknownVariable& e) {
    return error_response("unknown_variable", e.what());
  } catch (const BadState& e) {
    return error_response("bad_state", e.what());
  } catch (const ImpossibleEvidence& e) {
    return error_response("impossible_evidence", e.what());
  } catch (const Error& e) {
    return error_response("bad_request", e.what());
  }
}

Evidence parse_request_evidence(const Network& net, std::string_view body) {
  json j;
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    j = json::object();
  } else {
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("malformed JSON: ") + e.what());
    }
  }
  if (!j.is_object()) throw InvalidArgument("request body must be an object");
  Evidence ev;
  if (!j.contains("evidence")) return ev;
  const auto& jev = j["evidence"];
  if (!jev.is_object()) throw InvalidArgument("'evidence' must be an object");
  for (const auto& [id, value] : jev.items()) {
    const auto& var = net.variable(id);
    std::size_t state = 0;
    if (value.is_string()) {
      state = io::parse_state(var, value.get<std::string>());
    } else if (value.is_number_integer()) {
      const auto n = value.get<long long>();
      if (n < 1 || static_cast<std::size_t>(n) > var.cardinality()) {
        throw BadState("state index " + std::to_string(n) +
                       " is out of range for '" + id + "'");
      }
      state = static_cast<std::size_t>(n - 1);
    } else {
      throw BadState("state of '" + id + "' must be a label or an index");
    }
    ev[id] = state;
  }
  return ev;
}

json evidence_json(const Network& net, const Evidence& ev) {
  json j = json::object();
  for (const auto& var : net.variables) {
    if (auto it = ev.find(var.id); it != ev.end()) {
      j[var.id] = var.states[it->second];
    }
  }
  return j;
}

}  // namespace

std::string infer_json(const VariableElimination& engine, const Evidence& ev) {
  const Network& net = engine.network();
  const auto dense = dense_evidence(net, ev);
  json j;
  j["evidence"] = evidence_json(net, ev);
  json posteriors = json::object();
  for (std::size_t v = 0; v < net.variables.size(); ++v) {
    if (dense[v] != kMissing) continue;
    posteriors[net.variables[v].id] = engine.posterior(dense, v);
  }
  if (posteriors.empty()) {
    // Everything is observed; still reject impossible evidence.
    if (!net.variables.empty()) engine.posterior(dense, 0);
  }
  j["posteriors"] = std::move(posteriors);
  return j.dump();
}

Service::Service(Network net) : engine_(std::move(net)) {}

ApiResponse Service::health() const {
  return {200, json{{"status", "ok"}}.dump()};
}

ApiResponse Service::network() const {
  const Network& net = model();
  json j;
  j["name"] = net.meta("name").value_or("");
  j["variables"] = json::array();
  for (const auto& var : net.variables) {
    j["variables"].push_back({{"id", var.id},
                              {"name", var.display_name},
                              {"category", to_string(var.category)},
                              {"role", to_string(var.role)},
                              {"states", var.states}});
  }
  j["edges"] = json::array();
  for (const auto& e : net.structure.edges) {
    j["edges"].push_back({e.parent, e.child});
  }
  return {200, j.dump()};
}

ApiResponse Service::infer(std::string_view body) const {
  return guarded([&] {
    const Evidence ev = parse_request_evidence(model(), body);
    return ApiResponse{200, infer_json(engine_, ev)};
  });
}

ApiResponse Service::predict(std::string_view body) const {
  return guarded([&] {
    const Network& net = model();
    const Evidence ev = parse_request_evidence(net, body);
    json j;
    j["evidence"] = evidence_json(net, ev);
    j["predictions"] = json::array();
    for (const auto& p : predict_profile(net, ev)) {
      j["predictions"].push_back(
          {{"variable", p.variable_id},
           {"state", net.variable(p.variable_id).states[p.predicted_state]},
           {"confidence", p.confidence}});
    }
    return ApiResponse{200, j.dump()};
  });
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;
  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body, "application/json");
  };
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Get("/health", [&service, reply](const httplib::Request&,
                                       httplib::Response& res) {
    reply(res, service.health());
  });
  srv.Get("/network", [&service, reply](const httplib::Request&,
                                        httplib::Response& res) {
    reply(res, service.network());
  });
  srv.Post("/infer", [&service, reply](const httplib::Request& req,
                                       httplib::Response& res) {
    reply(res, service.infer(req.body));
  });
  srv.Post("/predict", [&service, reply](const httplib::Request& req,
                                         httplib::Response& res) {
    reply(res, service.predict(req.body));
  });
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = srv.bind_to_any_port(host);
  } else if (!srv.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace profilernet::service
