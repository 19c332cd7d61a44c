#include "sej/http_service.hpp"

#include <cstdio>

#include "httplib.h"
#include "sej/error.hpp"

namespace sej {

std::pair<int, nlohmann::json> error_response(std::exception_ptr error) {
  auto body = [](const char* code, const std::string& message) {
    return nlohmann::json{{"code", code}, {"message", message}};
  };
  try {
    std::rethrow_exception(error);
  } catch (const ProtocolError& e) {
    auto j = body("protocol_violation", e.what());
    j["expected"] = e.expected();
    return {409, j};
  } catch (const ConflictError& e) {
    return {409, body("conflict", e.what())};
  } catch (const NotFoundError& e) {
    return {404, body("not_found", e.what())};
  } catch (const AuthError& e) {
    return {e.missing_token() ? 401 : 403, body(e.missing_token() ? "unauthorized" : "forbidden", e.what())};
  } catch (const ValidationError& e) {
    return {422, body("validation_failed", e.what())};
  } catch (const nlohmann::json::exception& e) {
    return {422, body("validation_failed", std::string("malformed request body: ") + e.what())};
  } catch (const std::exception& e) {
    return {500, body("internal_error", e.what())};
  }
}

std::string bearer_token(const std::string& header) {
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return {};
  return header.substr(prefix.size());
}

namespace {

using Handler = std::function<nlohmann::json(const httplib::Request&, const std::string& token)>;

httplib::Server::Handler wrap(Handler handler, int success_status = 200) {
  return [handler = std::move(handler), success_status](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto result = handler(req, bearer_token(req.get_header_value("Authorization")));
      res.status = success_status;
      res.set_content(result.dump(), "application/json");
    } catch (...) {
      auto [status, body] = error_response(std::current_exception());
      res.status = status;
      res.set_content(body.dump(), "application/json");
    }
  };
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  auto j = nlohmann::json::parse(req.body);
  if (!j.is_object()) throw ValidationError("request body must be a JSON object");
  return j;
}

}  // namespace

void install_routes(httplib::Server& server, SessionService& service) {
  server.Post("/sessions", wrap(
                               [&service](const httplib::Request& req, const std::string&) {
                                 const auto body = parse_body(req);
                                 const auto participant = body.at("participant_id").get<std::string>();
                                 const auto questions = body.at("question_ids").get<std::vector<std::string>>();
                                 const auto created = service.create_session(participant, questions);
                                 return nlohmann::json{{"session_id", created.session_id},
                                                       {"participant_token", created.participant_token},
                                                       {"facilitator_token", created.facilitator_token},
                                                       {"next", created.state.expected_next()}};
                               },
                               201));

  server.Get(R"(/sessions/([^/]+))", wrap([&service](const httplib::Request& req, const std::string& token) {
               return service.view(req.matches[1], token);
             }));

  server.Post(R"(/sessions/([^/]+)/responses)",
              wrap([&service](const httplib::Request& req, const std::string& token) {
                const auto body = parse_body(req);
                const auto task = parse_task_field(body.at("task"));
                if (!task) throw ValidationError("task must be one of 1..4, Task1..Task4 or A..D");
                const auto& selection = body.at("selection");
                if (!selection.is_number_integer()) throw ValidationError("selection must be an integer");
                return service.submit_response(req.matches[1], token, body.at("question_id").get<std::string>(),
                                               *task, selection.get<int>());
              }));

  server.Post(R"(/sessions/([^/]+)/knowledge)",
              wrap([&service](const httplib::Request& req, const std::string& token) {
                const auto body = parse_body(req);
                const auto& level = body.at("level");
                if (!level.is_number_integer()) throw ValidationError("level must be an integer");
                return service.submit_knowledge(req.matches[1], token, body.at("question_id").get<std::string>(),
                                                level.get<int>());
              }));

  server.Post(R"(/sessions/([^/]+)/finalize)",
              wrap([&service](const httplib::Request& req, const std::string& token) {
                return service.finalize(req.matches[1], token);
              }));

  server.Post(R"(/questions/([^/]+)/outcome)",
              wrap([&service](const httplib::Request& req, const std::string& token) {
                const auto body = parse_body(req);
                const auto& outcome = body.at("outcome");
                if (!outcome.is_number_integer()) throw ValidationError("outcome must be 0 or 1");
                return service.record_outcome(req.matches[1], outcome.get<int>(), token);
              }));

  server.Get("/reports/summary", wrap([&service](const httplib::Request&, const std::string& token) {
               return service.summary_report(token);
             }));
}

bool serve(SessionService& service, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, service);
  return server.listen(host, port);
}

}  // namespace sej
