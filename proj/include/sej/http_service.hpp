#pragma once

// HTTP+JSON front end for SessionService. Tokens travel as
// `Authorization: Bearer <token>`; errors are {code, message, expected?}.

#include <exception>
#include <string>
#include <utility>

#include "json.hpp"
#include "sej/session.hpp"

namespace httplib {
class Server;
}

namespace sej {

// HTTP status and JSON body for an exception thrown by the service.
std::pair<int, nlohmann::json> error_response(std::exception_ptr error);

// Extracts the token from an Authorization header value; empty if absent.
std::string bearer_token(const std::string& header);

void install_routes(httplib::Server& server, SessionService& service);

// Blocks until the server is stopped.
bool serve(SessionService& service, const std::string& host, int port);

}  // namespace sej
