#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dlimp/checks.hpp"
#include "dlimp/errors.hpp"
#include "dlimp/model.hpp"
#include "dlimp/printer.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnknown = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int exit_code_for(dlimp::OverallStatus status) {
  switch (status) {
    case dlimp::OverallStatus::Pass: return kExitPass;
    case dlimp::OverallStatus::Fail: return kExitFail;
    case dlimp::OverallStatus::Unknown: return kExitUnknown;
  }
  return kExitUsage;
}

int cmd_parse(const std::string& path, const std::string& expr_term,
              const std::string& expr_formula, const std::string& expr_program) {
  using namespace dlimp;
  SymbolTable builtins = Registry::builtins().symbols();
  if (!expr_term.empty()) {
    std::cout << print(parse_term(expr_term, builtins)) << "\n";
    return kExitPass;
  }
  if (!expr_formula.empty()) {
    std::cout << print(parse_formula(expr_formula, builtins)) << "\n";
    return kExitPass;
  }
  if (!expr_program.empty()) {
    std::cout << print(parse_program(expr_program, builtins)) << "\n";
    return kExitPass;
  }

  ParsedModel parsed = parse_model(read_file(path));
  std::cout << "parsed: " << path << "\n";
  std::cout << print_model(parsed.model);
  if (!parsed.model.implicits.empty()) {
    std::cout << "\ndesugared:\n";
    for (const ImplicitDecl& decl : parsed.model.implicits) {
      DefinedFamily family = family_of_implicit(decl);
      for (const Identifier& name : decl.names) {
        int index = -1;
        for (size_t j = 0; j < family.names.size(); ++j) {
          if (family.names[j] == name) index = static_cast<int>(j);
        }
        std::cout << "  " << name << " ~> " << format_interpretation(family, index)
                  << "\n";
      }
    }
  }
  return kExitPass;
}

int run_report(const std::string& path, const dlimp::RunOptions& options,
               const std::string& format) {
  dlimp::ParsedModel parsed = dlimp::parse_model(read_file(path));
  dlimp::RunReport report = dlimp::run_model_checks(parsed, path, options);
  std::cout << (format == "json" ? report.to_json() : report.to_text());
  return exit_code_for(report.overall);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"implicit ODE-defined function definitions: parse, derive lemmas, "
               "and check models numerically"};
  app.require_subcommand(1);

  std::string path;
  std::string expr_term, expr_formula, expr_program;
  std::string format = "text";
  dlimp::RunOptions options;
  std::uint64_t seed_flag = 0;
  int runs_flag = 0;
  double horizon_flag = 0;
  double tol_flag = 0;

  CLI::App* parse_cmd = app.add_subcommand("parse", "parse a model file or expression");
  parse_cmd->add_option("path", path, "model file (.dlm)");
  parse_cmd->add_option("--expr-term", expr_term, "parse a term and print its AST");
  parse_cmd->add_option("--expr-formula", expr_formula, "parse a formula");
  parse_cmd->add_option("--expr-program", expr_program, "parse a hybrid program");

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("path", path, "model file (.dlm)")->required();
    cmd->add_option("--seed", seed_flag, "RNG seed");
    cmd->add_option("--tol", tol_flag, "integration tolerance");
    cmd->add_flag("--assume-existence", options.assume_existence,
                  "accept families without existence certificates (tainted)");
    cmd->add_option("--format", format, "report format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* lemmas_cmd =
      app.add_subcommand("lemmas", "derive and validate the per-family lemmas");
  add_run_flags(lemmas_cmd);

  CLI::App* check_cmd =
      app.add_subcommand("check", "run the model's declared checks");
  add_run_flags(check_cmd);
  check_cmd->add_option("--runs", runs_flag, "number of seeded simulations");
  check_cmd->add_option("--horizon", horizon_flag, "simulation horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (parse_cmd->parsed() && path.empty() && expr_term.empty() &&
      expr_formula.empty() && expr_program.empty()) {
    std::cerr << "parse: a model path or an --expr-* option is required\n";
    return kExitUsage;
  }

  for (CLI::App* cmd : {lemmas_cmd, check_cmd}) {
    if (!cmd->parsed()) continue;
    if (cmd->count("--seed")) options.seed = seed_flag;
    if (cmd->count("--tol")) options.tolerance = tol_flag;
  }
  if (check_cmd->parsed()) {
    if (check_cmd->count("--runs")) options.runs = runs_flag;
    if (check_cmd->count("--horizon")) options.horizon = horizon_flag;
  }

  try {
    if (parse_cmd->parsed()) {
      return cmd_parse(path, expr_term, expr_formula, expr_program);
    }
    if (lemmas_cmd->parsed()) {
      options.lemmas_only = true;
      return run_report(path, options, format);
    }
    if (check_cmd->parsed()) {
      return run_report(path, options, format);
    }
  } catch (const dlimp::SyntaxError& e) {
    std::cerr << e.what() << "\n";
    if (!e.expected.empty()) {
      std::cerr << "expected:";
      for (const std::string& token : e.expected) std::cerr << " " << token;
      std::cerr << "\n";
    }
    return kExitFail;
  } catch (const dlimp::DeclarationError& e) {
    std::cerr << e.what() << "\n";
    return kExitFail;
  } catch (const dlimp::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
