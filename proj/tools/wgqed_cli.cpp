// wgqed: run scenarios, sweep parameters, compare result tables.

#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "wgqed/result_io.hpp"
#include "wgqed/scenario.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-differential waveguide-QED simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  app.add_option("--out", out_dir, "Output directory (default: $WGQED_OUT or ./out)");

  auto* run = app.add_subcommand("run", "Run a scenario file");
  std::string scenario_path;
  std::vector<std::string> only;
  run->add_option("scenario", scenario_path, "Scenario file (.toml or .json)")->required()->check(CLI::ExistingFile);
  run->add_option("--method", only, "Restrict to these methods");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario template over a parameter grid");
  std::string template_path;
  std::vector<std::string> vary;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("template", template_path, "Scenario template")->required()->check(CLI::ExistingFile);
  sweep->add_option("--vary", vary, "key=v1,v2,... (repeatable; dotted keys such as array.gamma_tau12)")->required();
  sweep->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "Deviation report between two result CSVs");
  std::string a_path, b_path;
  double tol = 1e-6;
  cmp->add_option("a", a_path, "First CSV")->required()->check(CLI::ExistingFile);
  cmp->add_option("b", b_path, "Second CSV")->required()->check(CLI::ExistingFile);
  cmp->add_option("--tol", tol, "Pass threshold on every column's max deviation");

  CLI11_PARSE(app, argc, argv);
  const std::filesystem::path out = out_dir.empty() ? wgqed::output_root() : std::filesystem::path(out_dir);

  try {
    if (*run) {
      auto s = wgqed::load_scenario(scenario_path);
      if (!only.empty()) {
        std::vector<wgqed::Method> keep;
        for (const auto& m : only) {
          const auto mm = wgqed::parse_method(m);
          if (std::find(s.methods.begin(), s.methods.end(), mm) == s.methods.end())
            throw wgqed::ScenarioError("method", "'" + m + "' is not listed in the scenario");
          keep.push_back(mm);
        }
        s.methods = keep;
      }
      for (const auto& p : wgqed::run_scenario(s, out, std::cerr)) std::cout << p.string() << '\n';
    } else if (*sweep) {
      std::vector<wgqed::SweepAxis> axes;
      for (const auto& v : vary) axes.push_back(wgqed::parse_vary(v));
      const auto doc = wgqed::load_document(template_path);
      const auto stem = std::filesystem::path(template_path).stem().string();
      for (const auto& p : wgqed::run_sweep(doc, axes, out, jobs, std::cerr, stem)) std::cout << p.string() << '\n';
    } else if (*cmp) {
      const auto rep = wgqed::compare_tables(wgqed::read_csv(a_path), wgqed::read_csv(b_path), tol);
      std::cout << wgqed::to_json(rep).dump(2) << '\n';
      return rep.pass ? 0 : kExitFail;
    }
  } catch (const wgqed::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return 0;
}
