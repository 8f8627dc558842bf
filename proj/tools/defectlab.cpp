// defectlab: command-line front end for the defect-extension toolkit.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "defectlab/groupcalc.hpp"
#include "defectlab/io.hpp"

#ifndef DEFECTLAB_DATA_DIR
#define DEFECTLAB_DATA_DIR "data/specs"
#endif

namespace fs = std::filesystem;
using namespace defectlab;

namespace {

struct Options {
  std::string precision;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  std::string format = "text";
  std::string data_dir = DEFECTLAB_DATA_DIR;
};

void emit(const Options& opt, const json& j) {
  if (opt.format == "json") std::cout << j.dump(2) << "\n";
  else render_text(std::cout, j);
}

int run_spec(const Options& opt, const json& spec_json) {
  AnySpec spec = parse_spec(spec_json);
  if (auto* k = std::get_if<KummerSpec>(&spec)) {
    KummerReport rep = check_thm14_part2(k->data);
    json j;
    if (!k->name.empty()) j["name"] = k->name;
    j.update(kummer_json(k->data, rep));
    emit(opt, j);
    return rep.consistent() ? 0 : 1;
  }
  DefectReport rep;
  std::string name;
  if (auto* s = std::get_if<SyntheticSpec>(&spec)) {
    name = s->name;
    rep = classify_synthetic(s->p, s->sigma_e);
  } else {
    auto& f = std::get<FieldSpec>(spec);
    name = f.name;
    RunConfig cfg;
    cfg.samples = opt.samples;
    cfg.seed = opt.seed;
    cfg.precision = f.precision;
    if (!opt.precision.empty()) cfg.precision = parse_precision(opt.precision, f.ext->p);
    rep = classify_extension(f.ext, cfg);
  }
  json j;
  if (!name.empty()) j["name"] = name;
  j.update(report_json(rep));
  emit(opt, j);
  if (rep.verdict == Verdict::inconclusive) return 2;
  return rep.coherent() ? 0 : 1;
}

std::vector<fs::path> bundled_specs(const Options& opt) {
  std::vector<fs::path> out;
  if (!fs::is_directory(opt.data_dir)) throw error(error_kind::invalid_argument, "data directory " + opt.data_dir + " not found");
  for (const auto& e : fs::directory_iterator(opt.data_dir))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defectlab: Artin-Schreier and Kummer defect extensions, cuts and ramification ideals"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--precision", opt.precision, "target for v(theta - c): p^-N or a positive rational (default p^-10)");
  app.add_option("--samples", opt.samples, "number of sampled ramification values")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--data-dir", opt.data_dir, "directory of bundled spec files");

  std::string spec_file;
  auto* classify = app.add_subcommand("classify", "analyse an extension spec or an injected ramification jump");
  classify->add_option("spec", spec_file, "spec file (JSON)")->required();

  std::vector<std::string> expr;
  auto* group = app.add_subcommand("group", "segment calculus: upclose, scale_up, negate, shift, lemma_sd, is_prime, is_idempotent, power");
  group->add_option("expr", expr, "operation and arguments")->required();

  std::string kummer_file;
  auto* kummer = app.add_subcommand("kummer-check", "Kummer value data: Sigma_E and the elementary conditions");
  kummer->add_option("file", kummer_file, "value-data file (JSON)")->required();

  auto* examples = app.add_subcommand("examples", "bundled example specs");
  examples->require_subcommand(1);
  auto* ex_list = examples->add_subcommand("list", "list bundled specs");
  std::string ex_name;
  auto* ex_run = examples->add_subcommand("run", "run a bundled spec");
  ex_run->add_option("name", ex_name, "spec name (file stem)")->required();

  for (auto* sub : {classify, group, kummer, ex_run}) sub->fallthrough();
  examples->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*classify) return run_spec(opt, read_json_file(spec_file));
    if (*kummer) {
      json j = read_json_file(kummer_file);
      if (!j.contains("vp")) throw parse_error(kummer_file + ": Kummer value data needs \"vp\"");
      return run_spec(opt, j);
    }
    if (*group) {
      std::string result = run_group_calc(expr);
      if (opt.format == "json") std::cout << json{{"result", result}}.dump(2) << "\n";
      else std::cout << result << "\n";
      return 0;
    }
    if (*ex_list) {
      for (const auto& p : bundled_specs(opt)) {
        json j = read_json_file(p.string());
        std::cout << p.stem().string() << "\t" << j.value("description", std::string()) << "\n";
      }
      return 0;
    }
    if (*ex_run) {
      for (const auto& p : bundled_specs(opt))
        if (p.stem().string() == ex_name) return run_spec(opt, read_json_file(p.string()));
      throw error(error_kind::invalid_argument, "no bundled spec named '" + ex_name + "'");
    }
  } catch (const error& e) {
    std::cerr << "defectlab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "defectlab: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
