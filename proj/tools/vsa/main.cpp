/*
 * Copyright 2026 The VSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// vsa: dealer, servers, ledger, client roles, end-to-end runs, benchmarks
// and audits from one binary.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "common.hpp"
#include "vsa/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Vehicle sharing with secret-shared token generation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  vsa::cli::AddInfraCommands(app);
  vsa::cli::AddRoleCommands(app);
  vsa::cli::AddRunCommands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const vsa::cli::ExitStatus& s) {
    return s.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return vsa::cli::kExitError;
  }
  return 0;
}
