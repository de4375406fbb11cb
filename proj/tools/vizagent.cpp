// vizagent: command-line front door to the visualization agent.
#include "vizagent/service.hpp"
#include "vizagent/text.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vizagent;

namespace {

struct GlobalOptions {
  std::string data_dir;
  bool json_output = false;
  std::string backend;
  std::string fixtures;
  std::string endpoint;
  std::string model;
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

AgentConfig agent_config(const GlobalOptions& g) {
  AgentConfig cfg;
  cfg.data_dir = g.data_dir;
  cfg.backend = config_from_env();
  if (!g.backend.empty()) {
    const auto mode = backend_mode_from_string(g.backend);
    if (!mode) throw Error(ErrorCode::ConfigError, "--backend must be http, replay or mock");
    cfg.backend.mode = *mode;
  }
  if (!g.fixtures.empty()) cfg.backend.fixture_path = g.fixtures;
  if (!g.endpoint.empty()) cfg.backend.endpoint = g.endpoint;
  if (!g.model.empty()) cfg.backend.model = g.model;
  return cfg;
}

Study load_any_study(const std::string& path, const std::string& manifest) {
  if (fs::path(path).extension() == ".csv") {
    if (manifest.empty()) throw Error(ErrorCode::InvalidArgument, "CSV ingestion needs --manifest");
    return load_csv(read_file(path), read_file(manifest));
  }
  return load_study_file(path);
}

void print_error(const Error& e, bool as_json) {
  if (as_json) {
    json err{{"code", std::string(to_string(e.code()))}, {"message", e.detail()}};
    if (!e.stage().empty()) err["stage"] = e.stage();
    std::cout << json{{"error", err}}.dump(2) << "\n";
  } else {
    std::cerr << "error: " << e.what() << "\n";
  }
}

int cmd_ingest(const GlobalOptions& g, const std::string& path, const std::string& manifest) {
  Study s = load_any_study(path, manifest);
  Agent agent(agent_config(g));
  const std::string id = s.id;
  agent.add_study(std::move(s));
  const auto summary = study_summary_json(*agent.study(id));
  if (g.json_output) {
    std::cout << summary.dump(2) << "\n";
  } else {
    std::cout << "ingested study '" << id << "' (" << summary["designs"].get<std::size_t>() << " designs, "
              << summary["columns"].size() << " columns) into " << g.data_dir << "\n";
  }
  return 0;
}

int cmd_ask(const GlobalOptions& g, const std::string& study_ref, const std::string& prompt, const std::string& out,
            bool repair, bool llm_fallback) {
  Agent agent(agent_config(g));
  std::string study_id = study_ref;
  if (fs::is_regular_file(study_ref)) {
    Study s = load_study_file(study_ref);
    study_id = s.id;
    agent.add_study(std::move(s), false);
  }
  GenerateOptions opts;
  opts.repair = repair;
  opts.llm_fallback = llm_fallback;
  const auto result = agent.generate(study_id, prompt, opts);
  if (!out.empty() && result.svg) write_file_atomic(out, *result.svg);

  if (g.json_output) {
    std::cout << result_to_json(result).dump(2) << "\n";
  } else {
    std::cout << "result " << result.id << "\n";
    std::cout << "class: " << to_string(result.request.request_class) << " (confidence "
              << format_fixed(result.request.confidence, 2) << ")\n";
    if (result.refused) {
      std::cout << result.refusal << "\n";
      if (!result.llm_text.empty()) std::cout << result.llm_text << "\n";
      return 0;
    }
    std::cout << "backend: " << result.backend << "\n\n" << result.report->rendered_text << "\n";
    if (result.spec_error) std::cout << "spec error: " << *result.spec_error << "\n";
    std::cout << "violations: " << result.violations.size() << " (" << count_errors(result.violations) << " errors)\n";
    for (const auto& v : result.violations) {
      std::cout << "  [" << v.rule_id << "] " << to_string(v.severity) << ": " << v.message << " (at " << v.element << ")\n";
    }
    if (result.render_error) std::cout << "render error: " << *result.render_error << "\n";
    if (!out.empty() && result.svg) std::cout << "wrote " << out << "\n";
  }
  if (result.spec_error || result.render_error) return 1;
  return 0;
}

int cmd_render(const GlobalOptions& g, const std::string& id, const std::string& out) {
  AgentConfig cfg = agent_config(g);
  cfg.backend.mode = BackendMode::Mock;
  Agent agent(cfg);
  const std::string svg = agent.result_svg(id);
  if (out.empty()) {
    std::cout << svg;
  } else {
    write_file_atomic(out, svg);
    if (g.json_output) std::cout << json{{"id", id}, {"svg", out}}.dump(2) << "\n";
    else std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_eval(const GlobalOptions& g, const std::string& path, bool csv) {
  const std::string text = read_file(path);
  if (g.json_output) {
    std::cout << evaluate_scores_json(text).dump(2) << "\n";
  } else if (csv && !looks_like_scenario_means(text)) {
    std::cout << format_table_csv(scenario_table(parse_scores_jsonl(text)));
  } else {
    std::cout << evaluate_scores_text(text);
  }
  return 0;
}

int cmd_corpus_index(const GlobalOptions& g, const std::string& dir, const std::string& out) {
  const auto index = Index::build(load_corpus(dir));
  if (!out.empty()) write_file_atomic(out, index.to_json());
  if (g.json_output) {
    std::cout << json{{"documents", index.document_count()}, {"terms", index.vocabulary().size()}, {"out", out}}.dump(2) << "\n";
  } else {
    std::cout << "indexed " << index.document_count() << " documents, " << index.vocabulary().size() << " terms\n";
    if (!out.empty()) std::cout << "wrote " << out << "\n";
  }
  return 0;
}

HttpService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const GlobalOptions& g, ServerOptions options) {
  Agent agent(agent_config(g));
  HttpService service(agent, options);
  const int port = service.bind();
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << options.host << ":" << port << std::endl;
  service.listen();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-codified visualization agent for design-space-exploration studies"};
  app.require_subcommand(1);

  GlobalOptions g;
  g.data_dir = env_or("VIZAGENT_DATA_DIR", "vizagent-data");
  app.add_option("--data-dir", g.data_dir, "Directory for studies and results (env VIZAGENT_DATA_DIR)");
  app.add_flag("--json", g.json_output, "Machine-readable JSON output");
  app.add_option("--backend", g.backend, "LLM backend: http, replay or mock (env VIZAGENT_LLM_MODE)");
  app.add_option("--fixtures", g.fixtures, "Replay fixture JSONL (env VIZAGENT_LLM_FIXTURES)");
  app.add_option("--endpoint", g.endpoint, "HTTP backend base URL (env VIZAGENT_LLM_ENDPOINT)");
  app.add_option("--model", g.model, "Model name sent to the HTTP backend (env VIZAGENT_LLM_MODEL)");

  std::string path, manifest, study, prompt, out, id;
  bool repair = false, fallback = false, csv = false;

  auto* ingest = app.add_subcommand("ingest", "Validate a study file (JSON, or CSV with --manifest) and store it");
  ingest->add_option("path", path, "Study file")->required();
  ingest->add_option("--manifest", manifest, "Column manifest for CSV input");

  auto* ask = app.add_subcommand("ask", "Run the full pipeline for one prompt");
  ask->add_option("study", study, "Study id in the data directory, or a study file")->required();
  ask->add_option("prompt", prompt, "Natural-language request")->required();
  ask->add_option("--out", out, "Write the SVG here");
  ask->add_flag("--repair", repair, "Regenerate once when error-severity rules are violated");
  ask->add_flag("--llm-fallback", fallback, "Send unsupported prompts to the LLM instead of refusing");

  auto* render = app.add_subcommand("render", "Emit the SVG of a stored result");
  render->add_option("result_id", id, "Result id")->required();
  render->add_option("--out", out, "Write the SVG here instead of stdout");

  auto* eval = app.add_subcommand("eval", "Aggregate rubric scores or scenario means");
  eval->add_option("scores_path", path, "JSONL of rubric scores or scenario means")->required();
  eval->add_flag("--csv", csv, "CSV table instead of text");

  auto* corpus = app.add_subcommand("corpus-index", "Build the retrieval index over a snippet directory");
  corpus->add_option("path", path, "Corpus directory")->required();
  corpus->add_option("--out", out, "Write the index JSON here");

  ServerOptions server;
  server.port = std::atoi(env_or("VIZAGENT_PORT", "8080").c_str());
  auto* serve = app.add_subcommand("serve", "Start the HTTP JSON API");
  serve->add_option("--host", server.host, "Bind address");
  serve->add_option("--port", server.port, "Port (env VIZAGENT_PORT; 0 picks a free port)");
  serve->add_option("--static", server.static_dir, "Web console bundle to serve at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return cmd_ingest(g, path, manifest);
    if (*ask) return cmd_ask(g, study, prompt, out, repair, fallback);
    if (*render) return cmd_render(g, id, out);
    if (*eval) return cmd_eval(g, path, csv);
    if (*corpus) return cmd_corpus_index(g, path, out);
    if (*serve) return cmd_serve(g, server);
  } catch (const Error& e) {
    print_error(e, g.json_output);
    return is_user_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    if (g.json_output) std::cout << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump(2) << "\n";
    else std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
