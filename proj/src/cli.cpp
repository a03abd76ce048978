#include "juris/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "juris/controller.hpp"
#include "juris/errors.hpp"
#include "juris/kb.hpp"
#include "juris/metrics.hpp"
#include "juris/model_client.hpp"
#include "juris/prompts.hpp"
#include "juris/scenarios.hpp"
#include "juris/text.hpp"
#include "juris/tools.hpp"

namespace juris::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CommonOptions {
    std::string corpus = std::string(JURIS_DATA_DIR) + "/corpus";
    std::string prompts_dir = std::string(JURIS_DATA_DIR) + "/prompts";
};

struct ModelOptions {
    std::string replay_file;
    std::string endpoint;
    std::string model_name = "default";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--corpus", opts.corpus, "corpus directory");
    cmd->add_option("--prompts", opts.prompts_dir, "prompt directory");
}

void add_model(CLI::App* cmd, ModelOptions& opts, bool required) {
    auto* replay = cmd->add_option("--replay", opts.replay_file, "replay script file");
    auto* endpoint = cmd->add_option("--endpoint", opts.endpoint, "chat-completions base URL");
    cmd->add_option("--model-name", opts.model_name, "model name for the endpoint");
    replay->excludes(endpoint);
    if (required) {
        // Exactly one of the two sources must be set.
        cmd->callback([&opts]() {
            if (opts.replay_file.empty() == opts.endpoint.empty()) {
                throw CLI::ValidationError("model",
                                           "exactly one of --replay or --endpoint is required");
            }
        });
    }
}

struct Clients {
    std::shared_ptr<model::ModelClient> main;
    std::shared_ptr<model::ModelClient> verifier;
    std::shared_ptr<model::ModelClient> judge;
};

Clients make_clients(const ModelOptions& opts) {
    Clients c;
    if (!opts.replay_file.empty()) {
        auto set = model::load_script_file(opts.replay_file);
        c.main = set.main;
        c.verifier = set.verifier;
        c.judge = set.judge;
    } else {
        model::EndpointConfig config;
        config.base_url = opts.endpoint;
        config.model = opts.model_name;
        auto shared = std::make_shared<model::HttpModelClient>(config);
        c.main = shared;
        c.verifier = shared;  // same base model, separate handle is allowed
        c.judge = shared;
    }
    return c;
}

int fail(const Error& e) {
    std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
    return 3;
}

std::string derive_episode_id(const std::string& env_path) {
    return fs::path(env_path).stem().string();
}

int cmd_ingest(const std::string& dir) {
    auto base = kb::KnowledgeBase::ingest(dir);
    const auto& c = base->counts();
    json out{{"articles", c.articles},     {"charges", c.charges},
             {"cases", c.cases},           {"map_entries", c.map_entries},
             {"templates", c.templates},   {"procedures", c.procedures}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_run(const CommonOptions& common, const ModelOptions& model_opts,
            const std::string& scenario_name, const std::vector<std::string>& env_paths,
            const std::string& out_path, int budget, int cap, int parallel) {
    auto scenario = scenarios::load_scenario(scenario_name);
    auto base = std::shared_ptr<const kb::KnowledgeBase>(kb::KnowledgeBase::ingest(common.corpus));
    prompts::PromptLibrary prompt_lib(common.prompts_dir);
    tools::ToolRegistry registry;

    controller::ControllerConfig config;
    if (budget > 0) config.exploration_budget = budget;
    if (cap > 0) config.round_cap_override = cap;

    bool multi = env_paths.size() > 1;
    if (multi && !fs::is_directory(out_path)) {
        fs::create_directories(out_path);
    }

    auto run_one = [&](const std::string& env_path) {
        auto clients = make_clients(model_opts);
        auto env = scenarios::ScriptedEnvironment::from_file(env_path);
        auto trace = controller::run_episode(scenario, *env, base, registry, prompt_lib,
                                             clients.main, clients.verifier, config,
                                             derive_episode_id(env_path));
        auto path = multi ? fs::path(out_path) / (derive_episode_id(env_path) + ".json")
                          : fs::path(out_path);
        controller::write_trace(path, trace);
        std::cout << "trace written: " << path.string() << " (" << trace.rounds.size()
                  << " rounds, " << controller::to_string(trace.termination) << ")\n";
    };

    if (parallel <= 1 || env_paths.size() == 1) {
        for (auto& p : env_paths) run_one(p);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int i = 0; i < parallel; ++i) {
            pool.emplace_back([&]() {
                for (;;) {
                    auto idx = next.fetch_add(1);
                    if (idx >= env_paths.size()) return;
                    run_one(env_paths[idx]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return 0;
}

int cmd_eval(const CommonOptions& common, const std::vector<std::string>& trace_args,
             const std::string& gold_path, const std::string& report_path) {
    std::vector<controller::Trace> traces;
    for (auto& arg : trace_args) {
        if (fs::is_directory(arg)) {
            std::vector<fs::path> files;
            for (auto& entry : fs::directory_iterator(arg)) {
                if (entry.path().extension() == ".json") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (auto& f : files) traces.push_back(controller::read_trace(f));
        } else {
            traces.push_back(controller::read_trace(arg));
        }
    }
    auto gold = metrics::load_gold_file(gold_path);
    auto base = kb::KnowledgeBase::ingest(common.corpus);
    auto report = metrics::aggregate_report(traces, gold, base.get());
    std::cout << report.to_table();
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw Error(ErrorCode::io_error, "cannot write report: " + report_path);
        out << report.to_json().dump(2) << "\n";
        std::cout << "report written: " << report_path << "\n";
    }
    return 0;
}

int cmd_tool(const CommonOptions& common, const ModelOptions& model_opts,
             const std::string& name, const std::string& args_json) {
    json args = json::parse(args_json, nullptr, false);
    if (args.is_discarded() || !args.is_object()) {
        throw Error(ErrorCode::invalid_argument, "--args must be a JSON object");
    }
    auto base = kb::KnowledgeBase::ingest(common.corpus);
    prompts::PromptLibrary prompt_lib(common.prompts_dir);
    tools::ToolRegistry registry;
    memory::MemoryStore memory_store;

    Clients clients;
    if (!model_opts.replay_file.empty() || !model_opts.endpoint.empty()) {
        clients = make_clients(model_opts);
    }

    tools::ToolContext ctx;
    ctx.kb = base.get();
    ctx.memory = &memory_store;
    ctx.model = clients.main ? clients.main.get() : nullptr;
    ctx.prompts = &prompt_lib;

    auto result = registry.invoke(name, args, ctx);
    std::cout << protocol::render_result(result) << "\n";
    return result.is_error ? 3 : 0;
}

int cmd_replay(const CommonOptions& common, const std::string& trace_path,
               const std::string& out_path) {
    auto original = controller::read_trace(trace_path);
    auto base = std::shared_ptr<const kb::KnowledgeBase>(kb::KnowledgeBase::ingest(common.corpus));
    prompts::PromptLibrary prompt_lib(common.prompts_dir);
    tools::ToolRegistry registry;
    auto regenerated = controller::replay_trace(original, base, registry, prompt_lib);
    if (!out_path.empty()) controller::write_trace(out_path, regenerated);
    bool identical = regenerated.to_json() == original.to_json();
    std::cout << (identical ? "replay identical" : "replay diverged") << "\n";
    return identical ? 0 : 3;
}

int cmd_chat(const CommonOptions& common, const ModelOptions& model_opts,
             const std::string& scenario_name, const std::string& out_path) {
    auto scenario = scenarios::load_scenario(scenario_name);
    auto base = std::shared_ptr<const kb::KnowledgeBase>(kb::KnowledgeBase::ingest(common.corpus));
    prompts::PromptLibrary prompt_lib(common.prompts_dir);
    tools::ToolRegistry registry;
    auto clients = make_clients(model_opts);

    controller::ControllerConfig config;
    controller::Episode episode(scenario, base, &registry, &prompt_lib, clients.main,
                                clients.verifier, config, "chat");

    std::cout << "chat: " << scenarios::to_string(scenario.kind) << " ("
              << scenario.agent_role << ")\n";
    std::cout << "you are the environment; empty line or /quit ends the session\n";
    std::string line;
    while (episode.rounds_run() < scenario.round_cap) {
        std::cout << "> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        if (text::trim(line).empty() || line == "/quit") break;
        auto round = episode.run_round({"user", line, std::nullopt});
        std::cout << round.response << "\n";
    }
    auto trace = episode.finish(controller::Termination::task_complete);
    if (!out_path.empty()) {
        controller::write_trace(out_path, trace);
        std::cout << "trace written: " << out_path << "\n";
    }
    return 0;
}

int cmd_manifest(const std::string& out_path) {
    tools::ToolRegistry registry;
    auto manifest = registry.manifest();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw Error(ErrorCode::io_error, "cannot write manifest: " + out_path);
        out << manifest.dump(2) << "\n";
    } else {
        std::cout << manifest.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"legal research agent with enforced step-level verification"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* ingest = app.add_subcommand("ingest", "ingest and validate a corpus directory");
    std::string ingest_dir;
    ingest->add_option("dir", ingest_dir, "corpus directory")->required();

    auto* run = app.add_subcommand("run", "run scripted episodes and write traces");
    CommonOptions run_common;
    ModelOptions run_model;
    std::string run_scenario, run_out = "trace.json";
    std::vector<std::string> run_envs;
    int run_budget = 0, run_cap = 0, run_parallel = 1;
    add_common(run, run_common);
    add_model(run, run_model, true);
    run->add_option("--scenario", run_scenario, "scenario kind (KQ|LC|CD|DD|CI|CR)")->required();
    run->add_option("--env", run_envs, "environment transcript file(s)")->required();
    run->add_option("--out", run_out, "trace output path (directory for multiple envs)");
    run->add_option("--budget", run_budget, "exploration budget per round");
    run->add_option("--cap", run_cap, "round cap override");
    run->add_option("--parallel", run_parallel, "episodes to run concurrently");

    auto* eval = app.add_subcommand("eval", "score traces against gold labels");
    CommonOptions eval_common;
    std::vector<std::string> eval_traces;
    std::string eval_gold, eval_report = "report.json";
    add_common(eval, eval_common);
    eval->add_option("--traces", eval_traces, "trace files or directories")->required();
    eval->add_option("--gold", eval_gold, "gold label JSONL file")->required();
    eval->add_option("--report", eval_report, "structured report output path");

    auto* tool = app.add_subcommand("tool", "invoke a single tool");
    CommonOptions tool_common;
    ModelOptions tool_model;
    std::string tool_name, tool_args = "{}";
    add_common(tool, tool_common);
    add_model(tool, tool_model, false);
    tool->add_option("name", tool_name, "tool name")->required();
    tool->add_option("--args", tool_args, "JSON object of arguments");

    auto* replay = app.add_subcommand("replay", "re-run a recorded trace and compare");
    CommonOptions replay_common;
    std::string replay_trace, replay_out;
    add_common(replay, replay_common);
    replay->add_option("trace", replay_trace, "trace file")->required();
    replay->add_option("--out", replay_out, "write the regenerated trace here");

    auto* chat = app.add_subcommand("chat", "interactive REPL; the human plays the environment");
    CommonOptions chat_common;
    ModelOptions chat_model;
    std::string chat_scenario = "KQ", chat_out;
    add_common(chat, chat_common);
    add_model(chat, chat_model, true);
    chat->add_option("--scenario", chat_scenario, "scenario kind");
    chat->add_option("--out", chat_out, "trace output path");

    auto* manifest = app.add_subcommand("manifest", "emit the machine-readable tool manifest");
    std::string manifest_out;
    manifest->add_option("--out", manifest_out, "manifest output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ingest) return cmd_ingest(ingest_dir);
        if (*run) {
            return cmd_run(run_common, run_model, run_scenario, run_envs, run_out, run_budget,
                           run_cap, run_parallel);
        }
        if (*eval) return cmd_eval(eval_common, eval_traces, eval_gold, eval_report);
        if (*tool) return cmd_tool(tool_common, tool_model, tool_name, tool_args);
        if (*replay) return cmd_replay(replay_common, replay_trace, replay_out);
        if (*chat) return cmd_chat(chat_common, chat_model, chat_scenario, chat_out);
        if (*manifest) return cmd_manifest(manifest_out);
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        std::cerr << "error: runtime: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace juris::cli
