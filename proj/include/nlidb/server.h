#pragma once

#include <memory>
#include <string>

#include "nlidb/workspace.h"

namespace httplib {
class Server;
}

namespace nlidb {

// Registers the JSON API on `server`:
//
//   POST /api/translate  {"db", "query", "tagger": "gold"|"auto", "explain"}
//   POST /api/explain    {"db", "query", "token_index", "tagger"}
//   GET  /api/schema/{db}/graph
//   GET  /api/dbs
//
// Failures answer {"error", "stage"} with a 4xx status.
void RegisterRoutes(httplib::Server &server, const Workspace &workspace);

// Blocks serving on host:port until the server is stopped.
void Serve(const Workspace &workspace, const std::string &host, int port);

}  // namespace nlidb
