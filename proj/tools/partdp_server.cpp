// Copyright 2026 The partdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// partdp-server: serves the session API. Settings come from an optional
// JSON config file and PARTDP_* environment variables (see server_config.hpp);
// --bind/--port on the command line win over both.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "partdp/http_api.hpp"
#include "partdp/server_config.hpp"
#include "partdp/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP API for participatory differential-privacy configuration"};
  std::string config_path;
  std::optional<std::string> bind;
  std::optional<int> port;
  app.add_option("--config,-c", config_path, "JSON config file");
  app.add_option("--bind", bind, "Bind address");
  app.add_option("--port,-p", port, "TCP port (0 picks a free one)");
  CLI11_PARSE(app, argc, argv);

  partdp::ServerSettings settings;
  try {
    if (!config_path.empty()) settings.load_file(config_path);
    settings.apply_env();
    if (bind) settings.bind = *bind;
    if (port) settings.port = *port;

    partdp::Service service(settings.service_config());
    httplib::Server server;
    partdp::install_routes(server, service);
    if (!settings.webui_dir.empty() && !server.set_mount_point("/", settings.webui_dir)) {
      std::cerr << "warning: web UI directory " << settings.webui_dir << " not found\n";
    }

    int bound = settings.port;
    if (bound == 0) {
      bound = server.bind_to_any_port(settings.bind);
    } else if (!server.bind_to_port(settings.bind, bound)) {
      bound = -1;
    }
    if (bound < 0) {
      std::cerr << "cannot bind " << settings.bind << ":" << settings.port << "\n";
      return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << settings.bind << ":" << bound << std::endl;
    server.listen_after_bind();
    g_server = nullptr;

    service.persist_all();
  } catch (const partdp::Error& e) {
    std::cerr << partdp::error_json(e).dump() << "\n";
    return 2;
  }
  return 0;
}
