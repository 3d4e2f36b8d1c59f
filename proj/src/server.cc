#include "nlidb/server.h"

#include "httplib.h"
#include "json.hpp"
#include "nlidb/error.h"
#include "nlidb/service.h"

namespace nlidb {

using json = nlohmann::json;

namespace {

constexpr char kJson[] = "application/json; charset=utf-8";

void Reply(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

// Parses the body and resolves "db"; errors carry stage "request".
json ParseBody(const httplib::Request &req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error("request", "body must be a JSON object");
  }
  return body;
}

template <typename T>
T Field(const json &body, const char *key, T fallback, bool required) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) throw Error("request", std::string("missing field \"") + key + "\"");
    return fallback;
  }
  try {
    return it->get<T>();
  } catch (const json::exception &) {
    throw Error("request", std::string("field \"") + key + "\" has the wrong type");
  }
}

std::shared_ptr<const WorkspaceBundle> Bundle(const Workspace &workspace, const std::string &db) {
  auto bundle = workspace.Find(db);
  if (!bundle) throw Error("request", "unknown db \"" + db + "\"");
  return bundle;
}

template <typename F>
void Guard(httplib::Response &res, F &&f) {
  try {
    f();
  } catch (const Error &e) {
    const bool unknown_db = e.stage() == "request" &&
                            std::string_view(e.what()).rfind("unknown db", 0) == 0;
    Reply(res, unknown_db ? 404 : 400, ErrorJson(e));
  } catch (const std::exception &e) {
    Reply(res, 400, ErrorJson(Error("internal", e.what())));
  }
}

}  // namespace

void RegisterRoutes(httplib::Server &server, const Workspace &workspace) {
  server.Post("/api/translate", [&workspace](const httplib::Request &req, httplib::Response &res) {
    Guard(res, [&] {
      const json body = ParseBody(req);
      auto bundle = Bundle(workspace, Field<std::string>(body, "db", "", true));
      TranslateRequest request;
      request.query = Field<std::string>(body, "query", "", true);
      request.tagger = ParseTaggerMode(Field<std::string>(body, "tagger", "auto", false));
      request.explain = Field<bool>(body, "explain", false, false);
      Reply(res, 200, HandleTranslate(*bundle, request));
    });
  });

  server.Post("/api/explain", [&workspace](const httplib::Request &req, httplib::Response &res) {
    Guard(res, [&] {
      const json body = ParseBody(req);
      auto bundle = Bundle(workspace, Field<std::string>(body, "db", "", true));
      const auto query = Field<std::string>(body, "query", "", true);
      const auto index = Field<int64_t>(body, "token_index", 0, true);
      if (index < 0) throw Error("request", "token_index must be non-negative");
      const auto tagger = ParseTaggerMode(Field<std::string>(body, "tagger", "auto", false));
      Reply(res, 200, HandleExplain(*bundle, query, static_cast<size_t>(index), tagger));
    });
  });

  server.Get(R"(/api/schema/([^/]+)/graph)",
             [&workspace](const httplib::Request &req, httplib::Response &res) {
               Guard(res, [&] { Reply(res, 200, GraphJson(*Bundle(workspace, req.matches[1]))); });
             });

  server.Get("/api/dbs", [&workspace](const httplib::Request &, httplib::Response &res) {
    Reply(res, 200, json{{"dbs", workspace.Names()}});
  });
}

void Serve(const Workspace &workspace, const std::string &host, int port) {
  httplib::Server server;
  RegisterRoutes(server, workspace);
  if (!server.listen(host, port)) {
    throw Error("serve", "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace nlidb
